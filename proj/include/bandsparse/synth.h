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


#ifndef BANDSPARSE_SYNTH_H_
#define BANDSPARSE_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bandsparse/attention.h"
#include "bandsparse/matrix.h"
#include "bandsparse/rope.h"
#include "bandsparse/spectral.h"

namespace bandsparse {

enum class Pattern { kSlash, kVertical, kBlock, kMixed };

Pattern parse_pattern(std::string_view name);
std::string_view to_string(Pattern pattern);

// Magnitudes of the planted components. Logit values are the post-scaling
// (divided by sqrt(d)) attention logits the component produces at its peak.
struct ComponentScales {
  double noise_std = 0.3;       // i.i.d. per token and dimension
  double background_std = 0.5;  // per stationarity window, independent q/k
  double slash_logit = 18.0;    // q.k / sqrt(d) at the slash offset
  double needle_logit = 6.0;    // query . needle key / sqrt(d)
  double needle_key_gain = 8.0; // needle key scale / query scale
  double topic_std = 1.41421356237309505;  // per dimension of a topic vector
};

struct WorkloadSpec {
  Pattern pattern = Pattern::kMixed;
  std::size_t length = 4096;
  RopeConfig rope;
  std::uint64_t seed = 0;
  // Pre-rotation content is held constant over windows of this many tokens.
  std::size_t stationarity = 128;
  // Relative distance n - m at which slash scores peak.
  std::size_t slash_offset = 96;
  // Number of highest-frequency pairs carrying the slash content.
  std::size_t slash_pairs = 24;
  // Sink needles at tokens [0, sink_count) plus extra needles at uniformly
  // drawn positions.
  std::size_t sink_count = 4;
  std::size_t extra_needles = 4;
  std::size_t topic_count = 4;
  ComponentScales scales;

  // Throws ConfigError on zero length, stationarity, or an invalid rope.
  void validate() const;
};

// Equal WorkloadSpecs give bitwise-equal tensors.
// Returns post-RoPE q, k and standard-normal v (L x d).
AttentionInputs generate(const WorkloadSpec& spec);

void to_json(nlohmann::json& j, const WorkloadSpec& spec);

struct ZoneEnergy {
  Zone zone = Zone::kDead;
  std::size_t dims = 0;
  bool present = false;  // false when the zone has no dims or no energy
  double token_rms = 0.0;
  double pooled_rms = 0.0;
};

struct EnergyReport {
  std::vector<ZoneEnergy> zones;  // Dead, Transition, Semantic
  double full_token_rms = 0.0;
  double full_pooled_rms = 0.0;

  const ZoneEnergy& at(Zone zone) const;
};

// RMS of q restricted to each zone's dims, before and after block mean
// pooling with the profile's block size.
EnergyReport energy_report(const Matrix& q, const AttenuationProfile& profile);

// Per pair: RMS pair magnitude after pooling / RMS pair magnitude before.
std::vector<double> empirical_attenuation(const Matrix& q,
                                          const RopeConfig& cfg,
                                          std::size_t block_size);

}  // namespace bandsparse

#endif  // BANDSPARSE_SYNTH_H_
