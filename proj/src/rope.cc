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


#include "bandsparse/rope.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "bandsparse/errors.h"

namespace bandsparse {

void RopeConfig::validate() const {
  if (head_dim < 2 || head_dim % 2 != 0) {
    throw ConfigError("head_dim must be even and >= 2, got " +
                      std::to_string(head_dim));
  }
  if (!(base > 1.0) || !std::isfinite(base)) {
    throw ConfigError("rope base must be a finite value > 1");
  }
}

std::pair<std::size_t, std::size_t> RopeConfig::pair_dims(std::size_t j) const {
  if (layout == PairLayout::kInterleaved) return {2 * j, 2 * j + 1};
  return {j, j + head_dim / 2};
}

std::vector<double> frequencies(double base, std::size_t head_dim) {
  if (head_dim < 2 || head_dim % 2 != 0) {
    throw ConfigError("head_dim must be even and >= 2");
  }
  if (!(base > 0.0) || !std::isfinite(base)) {
    throw ConfigError("rope base must be positive and finite");
  }
  std::vector<double> thetas(head_dim / 2);
  const double d = static_cast<double>(head_dim);
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    thetas[j] = std::pow(base, -2.0 * static_cast<double>(j) / d);
  }
  return thetas;
}

std::vector<double> frequencies(const RopeConfig& cfg) {
  cfg.validate();
  return frequencies(cfg.base, cfg.head_dim);
}

template <typename T>
BasicMatrix<T> apply_rope(const BasicMatrix<T>& x,
                          std::span<const std::int64_t> positions,
                          const RopeConfig& cfg) {
  cfg.validate();
  if (x.cols() != cfg.head_dim) {
    throw ShapeError("apply_rope: x has " + std::to_string(x.cols()) +
                     " columns, head_dim is " + std::to_string(cfg.head_dim));
  }
  if (positions.size() != x.rows()) {
    throw ShapeError("apply_rope: one position per row required");
  }
  const auto thetas = frequencies(cfg);
  BasicMatrix<T> out = x;
  for (std::size_t n = 0; n < x.rows(); ++n) {
    const double pos = static_cast<double>(positions[n]);
    for (std::size_t j = 0; j < thetas.size(); ++j) {
      const auto [a, b] = cfg.pair_dims(j);
      const double angle = pos * thetas[j];
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      const double xa = x(n, a);
      const double xb = x(n, b);
      out(n, a) = static_cast<T>(xa * c - xb * s);
      out(n, b) = static_cast<T>(xa * s + xb * c);
    }
  }
  return out;
}

template <typename T>
BasicMatrix<T> apply_rope(const BasicMatrix<T>& x, const RopeConfig& cfg) {
  std::vector<std::int64_t> positions(x.rows());
  for (std::size_t n = 0; n < positions.size(); ++n) {
    positions[n] = static_cast<std::int64_t>(n);
  }
  return apply_rope(x, std::span<const std::int64_t>(positions), cfg);
}

std::vector<std::size_t> band_indices(const RopeConfig& cfg,
                                      const BandSpec& band) {
  cfg.validate();
  const std::size_t d = cfg.head_dim;
  std::vector<std::size_t> dims;
  if (band.kind == BandKind::kFull) {
    dims.resize(d);
    for (std::size_t i = 0; i < d; ++i) dims[i] = i;
    return dims;
  }
  if (band.width == 0 || band.width % 2 != 0 || band.width > d) {
    throw ConfigError("band width must be even and in [2, " +
                      std::to_string(d) + "], got " +
                      std::to_string(band.width));
  }
  const std::size_t pairs = band.width / 2;
  const std::size_t first =
      band.kind == BandKind::kHigh ? 0 : cfg.pair_count() - pairs;
  for (std::size_t j = first; j < first + pairs; ++j) {
    const auto [a, b] = cfg.pair_dims(j);
    dims.push_back(a);
    dims.push_back(b);
  }
  std::sort(dims.begin(), dims.end());
  return dims;
}

PairLayout parse_layout(std::string_view name) {
  if (name == "interleaved") return PairLayout::kInterleaved;
  if (name == "half-split" || name == "halfsplit") return PairLayout::kHalfSplit;
  throw ConfigError("unknown pair layout '" + std::string(name) + "'");
}

std::string_view to_string(PairLayout layout) {
  return layout == PairLayout::kInterleaved ? "interleaved" : "half-split";
}

template BasicMatrix<float> apply_rope(const BasicMatrix<float>&,
                                       std::span<const std::int64_t>,
                                       const RopeConfig&);
template BasicMatrix<double> apply_rope(const BasicMatrix<double>&,
                                        std::span<const std::int64_t>,
                                        const RopeConfig&);
template BasicMatrix<float> apply_rope(const BasicMatrix<float>&,
                                       const RopeConfig&);
template BasicMatrix<double> apply_rope(const BasicMatrix<double>&,
                                        const RopeConfig&);

}  // namespace bandsparse
