// Copyright 2026 The BandSparse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef BANDSPARSE_NUMERICS_H_
#define BANDSPARSE_NUMERICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bandsparse/exec.h"
#include "bandsparse/matrix.h"

namespace bandsparse {

// a (m x k) times b (k x n). Throws ShapeError when a.cols() != b.rows().
template <typename T>
BasicMatrix<T> matmul(const BasicMatrix<T>& a, const BasicMatrix<T>& b,
                      Exec exec = Exec::kSerial);

// a (m x k) times b^T where b is (n x k); the attention-logit product.
template <typename T>
BasicMatrix<T> matmul_transposed(const BasicMatrix<T>& a,
                                 const BasicMatrix<T>& b,
                                 Exec exec = Exec::kSerial);

// Row-wise softmax with row-max subtraction. Entries equal to -inf, or whose
// mask byte is 0, get probability 0. A row with no admissible entry throws
// EmptyRowError.
template <typename T>
BasicMatrix<T> softmax_rows(const BasicMatrix<T>& logits,
                            const ByteMatrix* mask = nullptr,
                            Exec exec = Exec::kSerial);

// In-place softmax of one row; entries with keep[i] == 0 (when keep is
// non-empty) or -inf are zeroed.
template <typename T>
void softmax_inplace(std::span<T> row, std::span<const std::uint8_t> keep = {});

// sqrt(mean of squares over all entries); for an N x d matrix this is
// sqrt((1/N) sum_u ||x_u||^2 / d). Throws ShapeError on an empty matrix.
template <typename T>
double rms(const BasicMatrix<T>& x);

// Columns of x at the given indices, in the given order.
template <typename T>
BasicMatrix<T> select_columns(const BasicMatrix<T>& x,
                              std::span<const std::size_t> indices);

// Largest |a - b| over all entries; shapes must agree.
template <typename T>
double max_abs_diff(const BasicMatrix<T>& a, const BasicMatrix<T>& b);

}  // namespace bandsparse

#endif  // BANDSPARSE_NUMERICS_H_
