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


#ifndef BANDSPARSE_TENSOR_IO_H_
#define BANDSPARSE_TENSOR_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bandsparse/block_mask.h"
#include "bandsparse/matrix.h"

namespace bandsparse {

// PRSM1 container:
//   bytes 0..3  'P' 'R' 'S' 'M'
//   byte  4     version (1)
//   byte  5     dtype (0 = float32, 1 = float64, 2 = uint8)
//   byte  6     ndim
//   ndim x uint32 little-endian dims
//   row-major little-endian payload
enum class DType : std::uint8_t { kFloat32 = 0, kFloat64 = 1, kUInt8 = 2 };

inline constexpr std::uint8_t kPrsmVersion = 1;

struct TensorHeader {
  DType dtype = DType::kFloat64;
  std::vector<std::uint32_t> dims;

  std::size_t element_count() const;
};

void write_matrix(std::ostream& out, const Matrix& m,
                  DType dtype = DType::kFloat64);
void write_matrix(std::ostream& out, const MatrixF& m);
void write_mask(std::ostream& out, const BlockMask& mask);

TensorHeader read_header(std::istream& in);

// Reads a 2-D float32 or float64 tensor, widening to double. Rejects
// non-finite values, trailing bytes and truncated payloads with FormatError.
Matrix read_matrix(std::istream& in);
BlockMask read_mask(std::istream& in);

void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 DType dtype = DType::kFloat64);
void save_mask(const std::filesystem::path& path, const BlockMask& mask);
Matrix load_matrix(const std::filesystem::path& path);
BlockMask load_mask(const std::filesystem::path& path);

}  // namespace bandsparse

#endif  // BANDSPARSE_TENSOR_IO_H_
