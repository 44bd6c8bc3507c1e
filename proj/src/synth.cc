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


#include "bandsparse/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bandsparse/errors.h"
#include "bandsparse/estimator.h"
#include "bandsparse/numerics.h"
#include "bandsparse/rng.h"

namespace bandsparse {
namespace {

bool has_slash(Pattern p) { return p == Pattern::kSlash || p == Pattern::kMixed; }
bool has_vertical(Pattern p) { return p == Pattern::kVertical || p == Pattern::kMixed; }
bool has_block(Pattern p) { return p == Pattern::kBlock || p == Pattern::kMixed; }

// Adds `content` to rows [begin, end) of x.
void add_rows(Matrix& x, std::size_t begin, std::size_t end,
              std::span<const double> content, double gain = 1.0) {
  for (std::size_t r = begin; r < end; ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += gain * content[c];
  }
}

void fill_pairs(std::vector<double>& vec, const RopeConfig& cfg,
                std::size_t first_pair, std::size_t last_pair, SplitMix64& rng,
                double stddev) {
  for (std::size_t j = first_pair; j < last_pair; ++j) {
    const auto [a, b] = cfg.pair_dims(j);
    vec[a] = stddev * rng.normal();
    vec[b] = stddev * rng.normal();
  }
}

void add_noise(Matrix& x, SplitMix64& rng, double stddev) {
  if (stddev == 0.0) return;
  for (auto& value : x.values()) value += stddev * rng.normal();
}

void add_background(Matrix& x, const WorkloadSpec& spec, SplitMix64& rng) {
  const double sd = spec.scales.background_std;
  if (sd == 0.0) return;
  std::vector<double> content(spec.rope.head_dim);
  for (std::size_t begin = 0; begin < spec.length; begin += spec.stationarity) {
    for (auto& c : content) c = sd * rng.normal();
    add_rows(x, begin, std::min(begin + spec.stationarity, spec.length), content);
  }
}

// Constant content in the highest-frequency pairs. The query copy is rotated
// back by slash_offset positions, so after RoPE the score q_n . k_m peaks at
// n - m = slash_offset.
void add_slash(Matrix& q, Matrix& k, const WorkloadSpec& spec, SplitMix64& rng) {
  const RopeConfig& cfg = spec.rope;
  const auto thetas = frequencies(cfg);
  const double magnitude = std::sqrt(
      spec.scales.slash_logit * std::sqrt(static_cast<double>(cfg.head_dim)) /
      static_cast<double>(spec.slash_pairs));
  std::vector<double> qc(cfg.head_dim, 0.0);
  std::vector<double> kc(cfg.head_dim, 0.0);
  const double offset = static_cast<double>(spec.slash_offset);
  for (std::size_t j = 0; j < spec.slash_pairs; ++j) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    const auto [a, b] = cfg.pair_dims(j);
    kc[a] = magnitude * std::cos(phase);
    kc[b] = magnitude * std::sin(phase);
    qc[a] = magnitude * std::cos(phase - offset * thetas[j]);
    qc[b] = magnitude * std::sin(phase - offset * thetas[j]);
  }
  add_rows(q, 0, spec.length, qc);
  add_rows(k, 0, spec.length, kc);
}

// A direction in the lowest-frequency quarter of pairs, shared weakly by all
// queries and strongly by a few needle keys.
void add_vertical(Matrix& q, Matrix& k, const WorkloadSpec& spec,
                  SplitMix64& rng) {
  const RopeConfig& cfg = spec.rope;
  const std::size_t pairs = cfg.pair_count();
  const std::size_t first = pairs - std::max<std::size_t>(1, pairs / 4);
  std::vector<double> g(cfg.head_dim, 0.0);
  fill_pairs(g, cfg, first, pairs, rng, 1.0);
  const double target_sq = 2.0 * static_cast<double>(pairs - first);
  double norm_sq = 0.0;
  for (const double x : g) norm_sq += x * x;
  const double rescale = std::sqrt(target_sq / norm_sq);
  for (auto& x : g) x *= rescale;

  const double query_gain = std::sqrt(
      spec.scales.needle_logit * std::sqrt(static_cast<double>(cfg.head_dim)) /
      (spec.scales.needle_key_gain * target_sq));
  const double key_gain = spec.scales.needle_key_gain * query_gain;
  add_rows(q, 0, spec.length, g, query_gain);

  std::vector<std::uint8_t> is_needle(spec.length, 0);
  const std::size_t sinks = std::min(spec.sink_count, spec.length);
  for (std::size_t n = 0; n < sinks; ++n) is_needle[n] = 1;
  const std::size_t extra = std::min(spec.extra_needles, spec.length - sinks);
  for (std::size_t placed = 0; placed < extra;) {
    const auto n = static_cast<std::size_t>(rng.below(spec.length));
    if (is_needle[n]) continue;
    is_needle[n] = 1;
    ++placed;
  }
  for (std::size_t n = 0; n < spec.length; ++n) {
    if (is_needle[n]) add_rows(k, n, n + 1, g, key_gain);
  }
}

// One of topic_count vectors in the low-frequency half per stationarity
// window, shared by q and k: windows on the same topic attend to each other.
void add_topics(Matrix& q, Matrix& k, const WorkloadSpec& spec, SplitMix64& rng) {
  const RopeConfig& cfg = spec.rope;
  const std::size_t pairs = cfg.pair_count();
  std::vector<std::vector<double>> topics(spec.topic_count,
                                          std::vector<double>(cfg.head_dim, 0.0));
  for (auto& t : topics) fill_pairs(t, cfg, pairs / 2, pairs, rng, spec.scales.topic_std);
  for (std::size_t begin = 0; begin < spec.length; begin += spec.stationarity) {
    const auto& t = topics[rng.below(spec.topic_count)];
    const std::size_t end = std::min(begin + spec.stationarity, spec.length);
    add_rows(q, begin, end, t);
    add_rows(k, begin, end, t);
  }
}

double zone_rms(const Matrix& x, const std::vector<std::size_t>& dims) {
  if (dims.empty()) return 0.0;
  return rms(select_columns(x, dims));
}

}  // namespace

Pattern parse_pattern(std::string_view name) {
  if (name == "slash") return Pattern::kSlash;
  if (name == "vertical") return Pattern::kVertical;
  if (name == "block") return Pattern::kBlock;
  if (name == "mixed") return Pattern::kMixed;
  throw ConfigError("unknown pattern '" + std::string(name) +
                    "' (expected slash, vertical, block or mixed)");
}

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::kSlash: return "slash";
    case Pattern::kVertical: return "vertical";
    case Pattern::kBlock: return "block";
    case Pattern::kMixed: return "mixed";
  }
  return "?";
}

void WorkloadSpec::validate() const {
  rope.validate();
  if (length == 0) throw ConfigError("length must be >= 1");
  if (stationarity == 0) throw ConfigError("stationarity must be >= 1");
  if (has_slash(pattern) && (slash_pairs == 0 || slash_pairs > rope.pair_count())) {
    throw ConfigError("slash_pairs must lie in [1, head_dim / 2]");
  }
  if (has_block(pattern) && topic_count == 0) {
    throw ConfigError("topic_count must be >= 1");
  }
  const auto& s = scales;
  for (const double x : {s.noise_std, s.background_std, s.slash_logit,
                         s.needle_logit, s.topic_std}) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ConfigError("component scales must be finite and >= 0");
    }
  }
  if (!(s.needle_key_gain > 0.0) || !std::isfinite(s.needle_key_gain)) {
    throw ConfigError("needle_key_gain must be positive");
  }
}

AttentionInputs generate(const WorkloadSpec& spec) {
  spec.validate();
  const std::size_t len = spec.length;
  const std::size_t d = spec.rope.head_dim;
  // Independent substreams keep each component's draws fixed when other
  // components are switched on or off.
  SplitMix64 master(spec.seed);
  SplitMix64 noise_rng(master.next());
  SplitMix64 background_rng(master.next());
  SplitMix64 slash_rng(master.next());
  SplitMix64 vertical_rng(master.next());
  SplitMix64 topic_rng(master.next());
  SplitMix64 value_rng(master.next());

  Matrix q(len, d);
  Matrix k(len, d);
  add_noise(q, noise_rng, spec.scales.noise_std);
  add_noise(k, noise_rng, spec.scales.noise_std);
  add_background(q, spec, background_rng);
  add_background(k, spec, background_rng);
  if (has_slash(spec.pattern)) add_slash(q, k, spec, slash_rng);
  if (has_vertical(spec.pattern)) add_vertical(q, k, spec, vertical_rng);
  if (has_block(spec.pattern)) add_topics(q, k, spec, topic_rng);

  AttentionInputs in;
  in.q = apply_rope(q, spec.rope);
  in.k = apply_rope(k, spec.rope);
  in.v = Matrix(len, d);
  for (auto& x : in.v.values()) x = value_rng.normal();
  return in;
}

void to_json(nlohmann::json& j, const WorkloadSpec& spec) {
  const auto& s = spec.scales;
  j = nlohmann::json{
      {"pattern", to_string(spec.pattern)},
      {"length", spec.length},
      {"head_dim", spec.rope.head_dim},
      {"rope_base", spec.rope.base},
      {"layout", to_string(spec.rope.layout)},
      {"seed", spec.seed},
      {"stationarity", spec.stationarity},
      {"slash_offset", spec.slash_offset},
      {"slash_pairs", spec.slash_pairs},
      {"sink_count", spec.sink_count},
      {"extra_needles", spec.extra_needles},
      {"topic_count", spec.topic_count},
      {"scales",
       {{"noise_std", s.noise_std},
        {"background_std", s.background_std},
        {"slash_logit", s.slash_logit},
        {"needle_logit", s.needle_logit},
        {"needle_key_gain", s.needle_key_gain},
        {"topic_std", s.topic_std}}},
      {"rng", "splitmix64"}};
}

const ZoneEnergy& EnergyReport::at(Zone zone) const {
  for (const auto& z : zones) {
    if (z.zone == zone) return z;
  }
  throw ConfigError("zone missing from energy report");
}

EnergyReport energy_report(const Matrix& q, const AttenuationProfile& profile) {
  if (q.cols() != profile.dim_zones.size()) {
    throw ShapeError("energy_report: q width does not match the profile");
  }
  const Matrix pooled = block_mean_pool(q, profile.block_size);
  EnergyReport report;
  report.full_token_rms = rms(q);
  report.full_pooled_rms = rms(pooled);
  for (const Zone zone : {Zone::kDead, Zone::kTransition, Zone::kSemantic}) {
    const auto dims = profile.dims_in(zone);
    ZoneEnergy e;
    e.zone = zone;
    e.dims = dims.size();
    e.token_rms = zone_rms(q, dims);
    e.pooled_rms = zone_rms(pooled, dims);
    e.present = !dims.empty() && e.token_rms > 0.0;
    report.zones.push_back(e);
  }
  return report;
}

std::vector<double> empirical_attenuation(const Matrix& q, const RopeConfig& cfg,
                                          std::size_t block_size) {
  cfg.validate();
  if (q.cols() != cfg.head_dim) {
    throw ShapeError("empirical_attenuation: q width differs from head_dim");
  }
  const Matrix pooled = block_mean_pool(q, block_size);
  std::vector<double> ratios(cfg.pair_count(), 0.0);
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    const auto [a, b] = cfg.pair_dims(j);
    const std::vector<std::size_t> dims = {a, b};
    const double token = zone_rms(q, dims);
    ratios[j] = token > 0.0 ? zone_rms(pooled, dims) / token : 0.0;
  }
  return ratios;
}

}  // namespace bandsparse
