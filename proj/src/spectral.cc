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


#include "bandsparse/spectral.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "bandsparse/errors.h"

namespace bandsparse {

double attenuation_exact(double theta, std::size_t block_size) {
  const double b = static_cast<double>(block_size);
  const double den = std::sin(0.5 * theta);
  // Near the removable singularities (theta = 2 pi k) the ratio tends to +-B.
  if (std::abs(den) < 1e-12) return 1.0;
  const double value = std::abs(std::sin(0.5 * b * theta) / den) / b;
  return std::clamp(value, 0.0, 1.0);
}

double attenuation_sinc(double theta, std::size_t block_size) {
  const double x = 0.5 * static_cast<double>(block_size) * theta;
  if (x == 0.0) return 1.0;
  return std::abs(std::sin(x) / x);
}

std::optional<double> cutoff_dimension(const RopeConfig& cfg,
                                       std::size_t block_size) {
  cfg.validate();
  const double b = static_cast<double>(block_size);
  if (b <= 2.0 * std::numbers::pi) return std::nullopt;
  return static_cast<double>(cfg.head_dim) * std::log(b / (2.0 * std::numbers::pi)) /
         std::log(cfg.base);
}

std::string_view to_string(Zone zone) {
  switch (zone) {
    case Zone::kDead: return "dead";
    case Zone::kTransition: return "transition";
    case Zone::kSemantic: return "semantic";
  }
  return "?";
}

std::vector<std::size_t> AttenuationProfile::dims_in(Zone zone) const {
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < dim_zones.size(); ++i) {
    if (dim_zones[i] == zone) dims.push_back(i);
  }
  return dims;
}

AttenuationProfile build_profile(const RopeConfig& cfg, std::size_t block_size,
                                 ZoneThresholds thresholds) {
  cfg.validate();
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
  if (!(thresholds.dead > 0.0 && thresholds.dead < thresholds.semantic &&
        thresholds.semantic < 1.0)) {
    throw ConfigError("zone thresholds must satisfy 0 < dead < semantic < 1");
  }
  AttenuationProfile p;
  p.block_size = block_size;
  p.thetas = frequencies(cfg);
  p.cutoff_dim = cutoff_dimension(cfg, block_size);
  const std::size_t pairs = p.thetas.size();
  p.lambdas_exact.resize(pairs);
  p.lambdas_sinc.resize(pairs);
  p.pair_zones.assign(pairs, Zone::kTransition);
  for (std::size_t j = 0; j < pairs; ++j) {
    p.lambdas_exact[j] = attenuation_exact(p.thetas[j], block_size);
    p.lambdas_sinc[j] = attenuation_sinc(p.thetas[j], block_size);
  }

  std::size_t j = 0;
  if (p.cutoff_dim) {
    while (j < pairs && 2.0 * static_cast<double>(j) < *p.cutoff_dim) {
      p.pair_zones[j++] = Zone::kDead;
    }
    // j > 0 keeps a dead zone contiguous with the cutoff run.
    while (j > 0 && j < pairs && p.lambdas_exact[j] < thresholds.dead) {
      p.pair_zones[j++] = Zone::kDead;
    }
  }
  for (; j < pairs; ++j) {
    if (p.lambdas_exact[j] >= thresholds.semantic) p.pair_zones[j] = Zone::kSemantic;
  }

  p.dim_zones.resize(cfg.head_dim);
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto [a, b] = cfg.pair_dims(k);
    p.dim_zones[a] = p.pair_zones[k];
    p.dim_zones[b] = p.pair_zones[k];
  }
  return p;
}

void write_profile_csv(std::ostream& out, const AttenuationProfile& profile) {
  const auto old_precision = out.precision(17);
  out << "pair_index,dim_index,theta,lambda_exact,lambda_sinc,zone\n";
  for (std::size_t j = 0; j < profile.thetas.size(); ++j) {
    out << j << ',' << 2 * j << ',' << profile.thetas[j] << ','
        << profile.lambdas_exact[j] << ',' << profile.lambdas_sinc[j] << ','
        << to_string(profile.pair_zones[j]) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace bandsparse
