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


#include "bandsparse/numerics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "parallel.h"

namespace bandsparse {

int parallel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <typename T>
BasicMatrix<T> matmul(const BasicMatrix<T>& a, const BasicMatrix<T>& b,
                      Exec exec) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
  BasicMatrix<T> out(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  internal::for_each_index(a.rows(), exec, [&](std::size_t i) {
    auto dst = out.row(i);
    const auto lhs = a.row(i);
    for (std::size_t p = 0; p < inner; ++p) {
      const T scale = lhs[p];
      const auto rhs = b.row(p);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += scale * rhs[j];
    }
  });
  return out;
}

template <typename T>
BasicMatrix<T> matmul_transposed(const BasicMatrix<T>& a,
                                 const BasicMatrix<T>& b, Exec exec) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_transposed: column counts " +
                     std::to_string(a.cols()) + " and " +
                     std::to_string(b.cols()) + " differ");
  }
  BasicMatrix<T> out(a.rows(), b.rows());
  internal::for_each_index(a.rows(), exec, [&](std::size_t i) {
    const auto lhs = a.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto rhs = b.row(j);
      T acc{};
      for (std::size_t p = 0; p < lhs.size(); ++p) acc += lhs[p] * rhs[p];
      dst[j] = acc;
    }
  });
  return out;
}

template <typename T>
void softmax_inplace(std::span<T> row, std::span<const std::uint8_t> keep) {
  const bool masked = !keep.empty();
  T hi = -std::numeric_limits<T>::infinity();
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (masked && !keep[i]) continue;
    hi = std::max(hi, row[i]);
  }
  if (hi == -std::numeric_limits<T>::infinity()) {
    throw EmptyRowError("softmax: row has no admissible entry");
  }
  T total{};
  for (std::size_t i = 0; i < row.size(); ++i) {
    if ((masked && !keep[i]) || row[i] == -std::numeric_limits<T>::infinity()) {
      row[i] = T{};
      continue;
    }
    row[i] = std::exp(row[i] - hi);
    total += row[i];
  }
  for (auto& x : row) x /= total;
}

template <typename T>
BasicMatrix<T> softmax_rows(const BasicMatrix<T>& logits, const ByteMatrix* mask,
                            Exec exec) {
  if (mask != nullptr &&
      (mask->rows() != logits.rows() || mask->cols() != logits.cols())) {
    throw ShapeError("softmax_rows: mask shape differs from logits");
  }
  BasicMatrix<T> out = logits;
  internal::for_each_index(out.rows(), exec, [&](std::size_t r) {
    std::span<const std::uint8_t> keep;
    if (mask != nullptr) keep = mask->row(r);
    softmax_inplace(out.row(r), keep);
  });
  return out;
}

template <typename T>
double rms(const BasicMatrix<T>& x) {
  if (x.empty()) throw ShapeError("rms of an empty matrix");
  double sum = 0.0;
  for (const T v : x.values()) sum += static_cast<double>(v) * v;
  return std::sqrt(sum / static_cast<double>(x.size()));
}

template <typename T>
BasicMatrix<T> select_columns(const BasicMatrix<T>& x,
                              std::span<const std::size_t> indices) {
  for (const std::size_t c : indices) {
    if (c >= x.cols()) {
      throw ShapeError("select_columns: index " + std::to_string(c) +
                       " out of range for " + std::to_string(x.cols()) +
                       " columns");
    }
  }
  BasicMatrix<T> out(x.rows(), indices.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto src = x.row(r);
    auto dst = out.row(r);
    for (std::size_t i = 0; i < indices.size(); ++i) dst[i] = src[indices[i]];
  }
  return out;
}

template <typename T>
double max_abs_diff(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("max_abs_diff: shape mismatch");
  }
  double worst = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(av[i]) - bv[i]));
  }
  return worst;
}

#define BANDSPARSE_INSTANTIATE(T)                                            \
  template BasicMatrix<T> matmul(const BasicMatrix<T>&, const BasicMatrix<T>&, \
                                 Exec);                                      \
  template BasicMatrix<T> matmul_transposed(const BasicMatrix<T>&,           \
                                            const BasicMatrix<T>&, Exec);    \
  template BasicMatrix<T> softmax_rows(const BasicMatrix<T>&,                \
                                       const ByteMatrix*, Exec);             \
  template void softmax_inplace(std::span<T>, std::span<const std::uint8_t>); \
  template double rms(const BasicMatrix<T>&);                                \
  template BasicMatrix<T> select_columns(const BasicMatrix<T>&,              \
                                         std::span<const std::size_t>);      \
  template double max_abs_diff(const BasicMatrix<T>&, const BasicMatrix<T>&);

BANDSPARSE_INSTANTIATE(float)
BANDSPARSE_INSTANTIATE(double)

#undef BANDSPARSE_INSTANTIATE

}  // namespace bandsparse
