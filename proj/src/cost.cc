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


#include "bandsparse/cost.h"

#include <algorithm>
#include <cmath>

#include "bandsparse/errors.h"

namespace bandsparse {

TileFlops tile_flops(const BlockMask& mask, std::size_t length,
                     std::size_t block_size, std::size_t head_dim,
                     std::size_t value_dim) {
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
  const std::size_t n = (length + block_size - 1) / block_size;
  if (mask.block_count() != n) throw ShapeError("mask does not match length");
  const double per_pair = 2.0 * static_cast<double>(head_dim + value_dim);
  auto len = [&](std::size_t u) {
    return static_cast<double>(std::min(block_size, length - u * block_size));
  };
  TileFlops f;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v <= u; ++v) {
      const double cost = len(u) * len(v) * per_pair;
      f.dense += cost;
      if (mask.test(u, v)) f.sparse += cost;
    }
  }
  return f;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ShapeError("slope fit needs two equally sized series of >= 2 points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw ConfigError("slope fit needs positive values");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ConfigError("slope fit needs distinct x values");
  return sxy / sxx;
}

}  // namespace bandsparse
