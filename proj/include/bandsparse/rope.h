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


#ifndef BANDSPARSE_ROPE_H_
#define BANDSPARSE_ROPE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bandsparse/matrix.h"

namespace bandsparse {

// Where the two components of frequency pair j live inside a head vector.
//   kInterleaved: dims (2j, 2j + 1)
//   kHalfSplit:   dims (j, j + d/2)
enum class PairLayout { kInterleaved, kHalfSplit };

struct RopeConfig {
  double base = 1e6;
  std::size_t head_dim = 128;
  PairLayout layout = PairLayout::kInterleaved;

  // Throws ConfigError unless head_dim is even and >= 2 and base > 1.
  void validate() const;
  std::size_t pair_count() const { return head_dim / 2; }
  // Dimension indices (first, second) of pair j.
  std::pair<std::size_t, std::size_t> pair_dims(std::size_t j) const;
};

enum class BandKind { kHigh, kLow, kFull };

struct BandSpec {
  BandKind kind = BandKind::kFull;
  // Number of dimensions (twice the number of pairs); ignored for kFull.
  std::size_t width = 0;
};

// theta_j = base^(-2j/d), j = 0 .. d/2 - 1. Requires base > 0, even d >= 2.
std::vector<double> frequencies(double base, std::size_t head_dim);
std::vector<double> frequencies(const RopeConfig& cfg);

// Rotates every frequency pair of row n by positions[n] * theta_j.
template <typename T>
BasicMatrix<T> apply_rope(const BasicMatrix<T>& x,
                          std::span<const std::int64_t> positions,
                          const RopeConfig& cfg);

// Same, with positions 0 .. rows-1.
template <typename T>
BasicMatrix<T> apply_rope(const BasicMatrix<T>& x, const RopeConfig& cfg);

// Sorted dimension indices carrying the width/2 highest-frequency pairs
// (kHigh), the width/2 lowest-frequency pairs (kLow), or every dimension
// (kFull). Throws ConfigError for an odd, zero or oversized width.
std::vector<std::size_t> band_indices(const RopeConfig& cfg,
                                      const BandSpec& band);

PairLayout parse_layout(std::string_view name);
std::string_view to_string(PairLayout layout);

}  // namespace bandsparse

#endif  // BANDSPARSE_ROPE_H_
