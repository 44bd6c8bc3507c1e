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


#ifndef BANDSPARSE_SPECTRAL_H_
#define BANDSPARSE_SPECTRAL_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "bandsparse/rope.h"

namespace bandsparse {

// Magnitude of the mean of B unit phasors advancing by theta per step:
// (1/B) |sin(B theta / 2) / sin(theta / 2)|, equal to 1 in the theta -> 0
// limit (and at every multiple of 2 pi).
double attenuation_exact(double theta, std::size_t block_size);

// |sinc(B theta / (2 pi))| with the normalized sinc sin(pi u) / (pi u).
double attenuation_sinc(double theta, std::size_t block_size);

// Dimension index 2j at which B * theta_j = 2 pi, i.e.
// d * ln(B / 2 pi) / ln(base). Returns nullopt when B <= 2 pi: pooling never
// completes a full rotation, so there is no dead zone.
std::optional<double> cutoff_dimension(const RopeConfig& cfg,
                                       std::size_t block_size);

enum class Zone { kDead, kTransition, kSemantic };
std::string_view to_string(Zone zone);

struct ZoneThresholds {
  double dead = 0.1;
  double semantic = 0.9;
};

struct AttenuationProfile {
  std::size_t block_size = 0;
  std::vector<double> thetas;         // per pair
  std::vector<double> lambdas_exact;  // per pair
  std::vector<double> lambdas_sinc;   // per pair
  std::optional<double> cutoff_dim;   // in 2j units
  std::vector<Zone> pair_zones;       // per pair
  std::vector<Zone> dim_zones;        // per dimension, via the pair layout

  // Dimension indices whose zone is `zone`, ascending.
  std::vector<std::size_t> dims_in(Zone zone) const;
};

// Pairs with 2j below the cutoff are Dead, and the dead run continues upward
// while lambda_exact < thresholds.dead (the first main-lobe pair past the
// zero is still cancelled). Remaining pairs with lambda_exact >=
// thresholds.semantic are Semantic; the rest are Transition.
// Throws ConfigError unless 0 < dead < semantic < 1.
AttenuationProfile build_profile(const RopeConfig& cfg, std::size_t block_size,
                                 ZoneThresholds thresholds = {});

// CSV with header pair_index,dim_index,theta,lambda_exact,lambda_sinc,zone;
// one row per pair, dim_index = 2j (the pair's position in frequency order).
void write_profile_csv(std::ostream& out, const AttenuationProfile& profile);

}  // namespace bandsparse

#endif  // BANDSPARSE_SPECTRAL_H_
