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


#include "bandsparse/estimator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bandsparse/errors.h"
#include "bandsparse/numerics.h"
#include "parallel.h"

namespace bandsparse {
namespace {

void check_width(const char* name, std::size_t width, std::size_t head_dim) {
  if (width == 0 || width % 2 != 0 || width > head_dim) {
    throw ConfigError(std::string(name) + " must be even and in [2, " +
                      std::to_string(head_dim) + "], got " +
                      std::to_string(width));
  }
}

std::vector<BandSpec> branches_for(const EstimatorConfig& cfg) {
  switch (cfg.band_mode) {
    case BandMode::kDual:
      return {{BandKind::kHigh, cfg.d_high}, {BandKind::kLow, cfg.d_low}};
    case BandMode::kHighOnly:
      return {{BandKind::kHigh, cfg.d_high}};
    case BandMode::kLowOnly:
      return {{BandKind::kLow, cfg.d_low}};
    case BandMode::kFullSpectrum:
      return {{BandKind::kFull, 0}};
  }
  return {};
}

}  // namespace

BandMode parse_band_mode(std::string_view name) {
  if (name == "dual") return BandMode::kDual;
  if (name == "high") return BandMode::kHighOnly;
  if (name == "low") return BandMode::kLowOnly;
  if (name == "full") return BandMode::kFullSpectrum;
  throw ConfigError("unknown band mode '" + std::string(name) +
                    "' (expected dual, high, low or full)");
}

std::string_view to_string(BandMode mode) {
  switch (mode) {
    case BandMode::kDual: return "dual";
    case BandMode::kHighOnly: return "high";
    case BandMode::kLowOnly: return "low";
    case BandMode::kFullSpectrum: return "full";
  }
  return "?";
}

void EstimatorConfig::validate(std::size_t head_dim) const {
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw ConfigError("top_p must lie in (0, 1]");
  }
  if (band_mode == BandMode::kDual || band_mode == BandMode::kHighOnly) {
    check_width("d_high", d_high, head_dim);
  }
  if (band_mode == BandMode::kDual || band_mode == BandMode::kLowOnly) {
    check_width("d_low", d_low, head_dim);
  }
}

Matrix block_mean_pool(const Matrix& x, std::size_t block_size, Exec exec) {
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
  if (x.rows() == 0) throw ShapeError("block_mean_pool: empty input");
  const std::size_t len = x.rows();
  const std::size_t cols = x.cols();
  const std::size_t n = (len + block_size - 1) / block_size;
  Matrix out(n, cols);
  internal::for_each_index(n, exec, [&](std::size_t u) {
    const std::size_t begin = u * block_size;
    const std::size_t end = std::min(begin + block_size, len);
    auto dst = out.row(u);
    for (std::size_t r = begin; r < end; ++r) {
      const auto src = x.row(r);
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (auto& value : dst) value *= inv;
  });
  return out;
}

PooledProjections pool_projections(const Matrix& q, const Matrix& k,
                                   std::size_t block_size, Exec exec) {
  if (q.rows() != k.rows() || q.cols() != k.cols()) {
    throw ShapeError("q and k must have the same shape");
  }
  PooledProjections p;
  p.q_pooled = block_mean_pool(q, block_size, exec);
  p.k_pooled = block_mean_pool(k, block_size, exec);
  p.block_size = block_size;
  p.block_count = p.q_pooled.rows();
  p.last_block_len = q.rows() - (p.block_count - 1) * block_size;
  return p;
}

double calibration_temperature(const Matrix& q_band, const Matrix& k_band,
                               const Matrix& q_full, const Matrix& k_full,
                               std::size_t d_band, std::size_t d) {
  if (d == 0 || d_band == 0 || d_band > d) {
    throw ShapeError("calibration: band width must lie in [1, d]");
  }
  const double q_full_rms = rms(q_full);
  const double k_full_rms = rms(k_full);
  if (q_full_rms == 0.0 || k_full_rms == 0.0) {
    throw ShapeError("calibration: full-spectrum projections have zero energy");
  }
  const double tau = std::sqrt(static_cast<double>(d_band) / static_cast<double>(d)) *
                     (rms(q_band) / q_full_rms) * (rms(k_band) / k_full_rms);
  return std::max(tau, kMinTemperature);
}

Matrix coarse_scores(const Matrix& q_band, const Matrix& k_band, double tau,
                     std::size_t d_band, Exec exec) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive");
  if (q_band.rows() != k_band.rows() || q_band.cols() != k_band.cols()) {
    throw ShapeError("coarse_scores: q and k bands differ in shape");
  }
  if (d_band == 0) throw ShapeError("coarse_scores: zero band width");
  const std::size_t n = q_band.rows();
  const double scale = 1.0 / (tau * std::sqrt(static_cast<double>(d_band)));
  Matrix scores(n, n);
  internal::for_each_index(n, exec, [&](std::size_t u) {
    const auto qu = q_band.row(u);
    auto row = scores.row(u);
    for (std::size_t v = 0; v <= u; ++v) {
      const auto kv = k_band.row(v);
      double dot = 0.0;
      for (std::size_t c = 0; c < qu.size(); ++c) dot += qu[c] * kv[c];
      row[v] = dot * scale;
    }
    softmax_inplace(row.subspan(0, u + 1));
  });
  return scores;
}

BlockMask top_p_mask(const Matrix& scores, double p) {
  if (scores.rows() != scores.cols()) {
    throw ShapeError("top_p_mask: scores must be square");
  }
  const std::size_t n = scores.rows();
  BlockMask mask(n);
  std::vector<std::size_t> order;
  for (std::size_t u = 0; u < n; ++u) {
    const auto row = scores.row(u);
    order.resize(u + 1);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return row[a] > row[b];
    });
    double before = 0.0;
    for (const std::size_t v : order) {
      // Zero-mass blocks sit at the tail where `before` is the whole row;
      // rounding must not let them in. At p = 1 every positive block
      // qualifies even when `before` has rounded up to 1.
      if (row[v] <= 0.0 || (p < 1.0 && before >= p)) break;
      mask.set(u, v);
      before += row[v];
    }
  }
  return mask;
}

Estimate estimate_from_pooled(const PooledProjections& pooled,
                              const EstimatorConfig& cfg,
                              const RopeConfig& rope_cfg, Exec exec) {
  rope_cfg.validate();
  const std::size_t d = rope_cfg.head_dim;
  cfg.validate(d);
  if (pooled.q_pooled.cols() != d || pooled.k_pooled.cols() != d) {
    throw ShapeError("projections have " + std::to_string(pooled.q_pooled.cols()) +
                     " columns, head_dim is " + std::to_string(d));
  }
  if (pooled.block_size != cfg.block_size) {
    throw ConfigError("pooled block size differs from the estimator's");
  }

  Estimate est;
  est.mask = BlockMask(pooled.block_count);
  for (const BandSpec& band : branches_for(cfg)) {
    BranchResult br;
    br.band = band.kind;
    br.width = band.kind == BandKind::kFull ? d : band.width;
    const auto dims = band_indices(rope_cfg, band);
    const Matrix q_band = select_columns(pooled.q_pooled, dims);
    const Matrix k_band = select_columns(pooled.k_pooled, dims);
    if (cfg.calibration && band.kind != BandKind::kFull) {
      br.tau = calibration_temperature(q_band, k_band, pooled.q_pooled,
                                       pooled.k_pooled, br.width, d);
    }
    br.scores = coarse_scores(q_band, k_band, br.tau, br.width, exec);
    br.mask = top_p_mask(br.scores, cfg.top_p);
    est.mask |= br.mask;
    est.branches.push_back(std::move(br));
  }
  if (cfg.force_diagonal) est.mask.force_diagonal();
  return est;
}

Estimate estimate_detailed(const Matrix& q, const Matrix& k,
                           const EstimatorConfig& cfg,
                           const RopeConfig& rope_cfg, Exec exec) {
  cfg.validate(rope_cfg.head_dim);
  return estimate_from_pooled(pool_projections(q, k, cfg.block_size, exec), cfg,
                              rope_cfg, exec);
}

BlockMask dual_band_estimate(const Matrix& q, const Matrix& k,
                             const EstimatorConfig& cfg,
                             const RopeConfig& rope_cfg, Exec exec) {
  return estimate_detailed(q, k, cfg, rope_cfg, exec).mask;
}

BlockMask full_spectrum_estimate(const Matrix& q, const Matrix& k,
                                 const EstimatorConfig& cfg, Exec exec) {
  EstimatorConfig full = cfg;
  full.band_mode = BandMode::kFullSpectrum;
  RopeConfig rope;
  rope.head_dim = q.cols();
  return estimate_detailed(q, k, full, rope, exec).mask;
}

}  // namespace bandsparse
