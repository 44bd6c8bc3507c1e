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


#ifndef BANDSPARSE_COST_H_
#define BANDSPARSE_COST_H_

#include <cstddef>
#include <span>

#include "bandsparse/block_mask.h"

namespace bandsparse {

// Tile-level FLOP count of causal attention: every computed (u, v) tile costs
// len_u * len_v * (2 d + 2 d_v) (q k^T plus p v), diagonal tiles included in
// full as a tiled kernel computes them before masking.
struct TileFlops {
  double dense = 0.0;
  double sparse = 0.0;
  double ratio() const { return dense / sparse; }
};

TileFlops tile_flops(const BlockMask& mask, std::size_t length,
                     std::size_t block_size, std::size_t head_dim,
                     std::size_t value_dim);

// Least-squares slope of log(y) against log(x). Needs >= 2 distinct positive
// x values and positive y.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace bandsparse

#endif  // BANDSPARSE_COST_H_
