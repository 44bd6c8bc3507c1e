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
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "bandsparse/attention.h"
#include "bandsparse/errors.h"
#include "bandsparse/numerics.h"
#include "bandsparse/rng.h"
#include "bandsparse/spectral.h"
#include "bandsparse/synth.h"

namespace bandsparse {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                     double scale = 1.0) {
  SplitMix64 rng(seed);
  Matrix m(rows, cols);
  for (auto& x : m.values()) x = scale * rng.normal();
  return m;
}

// Selected set of one row under the nucleus rule, enumerated independently:
// the shortest descending prefix whose mass reaches p, positive entries only.
std::vector<std::size_t> oracle_row(const std::vector<double>& probs, double p) {
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return probs[a] != probs[b] ? probs[a] > probs[b] : a < b;
  });
  std::size_t positive = 0;
  for (const double x : probs) positive += x > 0.0;
  std::size_t k = positive;
  double prefix = 0.0;
  for (std::size_t i = 0; i < positive; ++i) {
    prefix += probs[order[i]];
    if (prefix >= p) {
      k = i + 1;
      break;
    }
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + k);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// Random causal probability row of length n; `kind` selects smooth, peaked,
// tied (dyadic, exactly summing to 1) or sparse rows.
std::vector<double> random_row(std::size_t n, int kind, SplitMix64& rng) {
  std::vector<double> row(n);
  if (kind == 2) {
    const std::uint64_t total = 64;
    std::vector<std::uint64_t> counts(n, 0);
    for (std::uint64_t i = 0; i < total; ++i) counts[rng.below(std::min<std::size_t>(n, 4))]++;
    for (std::size_t i = 0; i < n; ++i) row[i] = static_cast<double>(counts[i]) / total;
    return row;
  }
  const double scale = kind == 1 ? 4.0 : 1.0;
  for (auto& x : row) x = std::exp(scale * rng.normal());
  if (kind == 3) {
    for (auto& x : row) {
      if (rng.uniform() < 0.5) x = 0.0;
    }
    row[rng.below(n)] = 1.0;
  }
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  for (auto& x : row) x /= sum;
  return row;
}

TEST(BlockMeanPool, ScalarColumnWithPartialBlock) {
  const Matrix x{{1}, {2}, {3}, {4}, {5}};
  EXPECT_EQ(block_mean_pool(x, 2), (Matrix{{1.5}, {3.5}, {5}}));
}

TEST(BlockMeanPool, IdenticalRowsPoolToThemselves) {
  const Matrix x(6, 3, 0.7);
  const Matrix p = block_mean_pool(x, 4);
  for (const double v : p.values()) EXPECT_DOUBLE_EQ(v, 0.7);
}

TEST(BlockMeanPool, CommutesWithBandSlicing) {
  const Matrix x = random_matrix(300, 128, 1);
  const auto dims = band_indices(RopeConfig{}, {BandKind::kLow, 96});
  EXPECT_EQ(block_mean_pool(select_columns(x, dims), 64),
            select_columns(block_mean_pool(x, 64), dims));
}

TEST(BlockMeanPool, Errors) {
  EXPECT_THROW(block_mean_pool(Matrix(4, 2), 0), ConfigError);
  EXPECT_THROW(block_mean_pool(Matrix(0, 2), 4), ShapeError);
}

TEST(PoolProjections, BlockCounts) {
  const Matrix q = random_matrix(300, 8, 2);
  const auto p = pool_projections(q, q, 128);
  EXPECT_EQ(p.block_count, 3u);
  EXPECT_EQ(p.last_block_len, 300u - 2u * 128u);
  EXPECT_EQ(pool_projections(q, q, 100).last_block_len, 100u);
  EXPECT_THROW(pool_projections(q, Matrix(299, 8), 128), ShapeError);
}

TEST(Calibration, FullBandIsExactlyOne) {
  const Matrix q = random_matrix(10, 32, 3);
  const Matrix k = random_matrix(10, 32, 4);
  EXPECT_EQ(calibration_temperature(q, k, q, k, 32, 32), 1.0);
}

TEST(Calibration, UniformEnergyQuarterBandIsHalf) {
  SplitMix64 rng(5);
  Matrix q(16, 128);
  Matrix k(16, 128);
  for (auto& x : q.values()) x = rng.uniform() < 0.5 ? -1.0 : 1.0;
  for (auto& x : k.values()) x = rng.uniform() < 0.5 ? -2.0 : 2.0;
  const auto dims = band_indices(RopeConfig{}, {BandKind::kHigh, 32});
  const double tau = calibration_temperature(select_columns(q, dims),
                                             select_columns(k, dims), q, k, 32, 128);
  EXPECT_NEAR(tau, 0.5, 1e-12);
}

TEST(Calibration, ZeroEnergyThrowsAndFloorHolds) {
  const Matrix zero(4, 8);
  const Matrix one(4, 8, 1.0);
  EXPECT_THROW(calibration_temperature(zero, zero, zero, one, 8, 8), ShapeError);
  EXPECT_EQ(calibration_temperature(Matrix(4, 2), Matrix(4, 2), one, one, 2, 8),
            kMinTemperature);
}

TEST(Calibration, DeadZoneTemperatureOnStationaryWorkload) {
  WorkloadSpec spec;
  spec.pattern = Pattern::kSlash;
  spec.seed = 42;
  spec.scales.noise_std = 0.0;
  const auto in = generate(spec);
  const auto profile = build_profile(RopeConfig{}, 128);
  const auto dead = profile.dims_in(Zone::kDead);
  const auto pooled = pool_projections(in.q, in.k, 128);
  const Matrix qz = select_columns(pooled.q_pooled, dead);
  const Matrix kz = select_columns(pooled.k_pooled, dead);
  const double tau =
      calibration_temperature(qz, kz, pooled.q_pooled, pooled.k_pooled, dead.size(), 128);
  // Direct evaluation of the same quantity.
  auto ms = [](const Matrix& m) {
    double s = 0.0;
    for (const double v : m.values()) s += v * v;
    return std::sqrt(s / static_cast<double>(m.size()));
  };
  const double expected = std::sqrt(dead.size() / 128.0) * ms(qz) / ms(pooled.q_pooled) *
                          ms(kz) / ms(pooled.k_pooled);
  EXPECT_NEAR(tau, expected, 1e-12);
  EXPECT_LT(tau, 0.1);
  EXPECT_NEAR(tau, 0.0295477, 1e-6);
}

TEST(Calibration, RestoresLogitScale) {
  // Pooled inputs whose leading 30 dims are attenuated 20x.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Matrix q = random_matrix(32, 128, 10 + seed);
    Matrix k = random_matrix(32, 128, 20 + seed);
    for (std::size_t r = 0; r < 32; ++r) {
      for (std::size_t c = 0; c < 30; ++c) {
        q(r, c) *= 0.05;
        k(r, c) *= 0.05;
      }
    }
    auto mean_abs_logit = [](const Matrix& a, const Matrix& b, double scale) {
      const Matrix l = matmul_transposed(a, b);
      double s = 0.0;
      for (const double v : l.values()) s += std::abs(v) * scale;
      return s / static_cast<double>(l.size());
    };
    const double full = mean_abs_logit(q, k, 1.0 / std::sqrt(128.0));
    for (const BandSpec band : {BandSpec{BandKind::kHigh, 64}, BandSpec{BandKind::kLow, 96}}) {
      const auto dims = band_indices(RopeConfig{}, band);
      const Matrix qz = select_columns(q, dims);
      const Matrix kz = select_columns(k, dims);
      const double tau = calibration_temperature(qz, kz, q, k, band.width, 128);
      const double scaled =
          mean_abs_logit(qz, kz, 1.0 / std::sqrt(double(band.width))) / tau;
      EXPECT_GT(scaled, 0.5 * full);
      EXPECT_LT(scaled, 2.0 * full);
    }
  }
}

TEST(CoarseScores, SingleBlock) {
  const Matrix s = coarse_scores(Matrix{{0.3, -1.0}}, Matrix{{2.0, 1.0}}, 0.7, 2);
  EXPECT_EQ(s, (Matrix{{1.0}}));
}

TEST(CoarseScores, IdenticalRowsGiveUniformCausalRows) {
  const Matrix x(5, 4, 0.5);
  const Matrix s = coarse_scores(x, x, 3.0, 4);
  for (std::size_t u = 0; u < 5; ++u) {
    for (std::size_t v = 0; v < 5; ++v) {
      EXPECT_DOUBLE_EQ(s(u, v), v <= u ? 1.0 / (u + 1) : 0.0);
    }
  }
}

TEST(CoarseScores, RowsAreCausalDistributions) {
  const Matrix s = coarse_scores(random_matrix(40, 16, 6), random_matrix(40, 16, 7), 0.3, 16);
  for (std::size_t u = 0; u < 40; ++u) {
    double sum = 0.0;
    for (std::size_t v = 0; v < 40; ++v) {
      if (v > u) EXPECT_EQ(s(u, v), 0.0);
      sum += s(u, v);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(CoarseScores, TemperaturePreservesRanking) {
  const Matrix q = random_matrix(24, 16, 8);
  const Matrix k = random_matrix(24, 16, 9);
  const Matrix a = coarse_scores(q, k, 1.0, 16);
  for (const double tau : {0.5, 0.1, 3.0}) {
    const Matrix b = coarse_scores(q, k, tau, 16);
    for (std::size_t u = 0; u < 24; ++u) {
      std::vector<std::size_t> oa(u + 1);
      std::vector<std::size_t> ob(u + 1);
      std::iota(oa.begin(), oa.end(), std::size_t{0});
      std::iota(ob.begin(), ob.end(), std::size_t{0});
      std::stable_sort(oa.begin(), oa.end(), [&](auto x, auto y) { return a(u, x) > a(u, y); });
      std::stable_sort(ob.begin(), ob.end(), [&](auto x, auto y) { return b(u, x) > b(u, y); });
      EXPECT_EQ(oa, ob) << "tau=" << tau << " row " << u;
    }
  }
}

TEST(CoarseScores, Errors) {
  EXPECT_THROW(coarse_scores(Matrix(2, 2), Matrix(2, 2), 0.0, 2), ConfigError);
  EXPECT_THROW(coarse_scores(Matrix(2, 2), Matrix(3, 2), 1.0, 2), ShapeError);
}

TEST(TopP, HandExample) {
  Matrix s(4, 4);
  const double row[] = {0.5, 0.3, 0.15, 0.05};
  for (std::size_t v = 0; v < 4; ++v) s(3, v) = row[v];
  s(0, 0) = 1.0;
  s(1, 0) = s(1, 1) = 0.5;
  s(2, 0) = s(2, 1) = s(2, 2) = 1.0 / 3.0;
  const BlockMask m = top_p_mask(s, 0.9);
  EXPECT_TRUE(m.test(3, 0) && m.test(3, 1) && m.test(3, 2));
  EXPECT_FALSE(m.test(3, 3));
}

TEST(TopP, ExactBoundaryIsExcluded) {
  Matrix s(4, 4);
  s(0, 0) = 1.0;
  s(1, 0) = s(1, 1) = 0.5;
  s(2, 0) = s(2, 1) = s(2, 2) = 1.0 / 3.0;
  s(3, 0) = 0.125;
  s(3, 1) = 0.5;
  s(3, 2) = 0.25;
  s(3, 3) = 0.125;
  const BlockMask m = top_p_mask(s, 0.75);
  EXPECT_EQ(m.row_count(3), 2u);
  EXPECT_TRUE(m.test(3, 1) && m.test(3, 2));
}

TEST(TopP, TiesGoToLowerIndex) {
  Matrix s(3, 3);
  s(0, 0) = 1.0;
  s(1, 0) = s(1, 1) = 0.5;
  s(2, 0) = s(2, 1) = s(2, 2) = 1.0 / 3.0;
  const BlockMask m = top_p_mask(s, 0.5);
  EXPECT_TRUE(m.test(1, 0));
  EXPECT_FALSE(m.test(1, 1));
  EXPECT_TRUE(m.test(2, 0) && m.test(2, 1));
  EXPECT_FALSE(m.test(2, 2));
}

TEST(TopP, FullThresholdSelectsAllPositive) {
  const Matrix s = coarse_scores(random_matrix(30, 8, 11), random_matrix(30, 8, 12), 1.0, 8);
  EXPECT_EQ(top_p_mask(s, 1.0), BlockMask::full_causal(30));
}

TEST(TopP, ZeroProbabilityNeverSelected) {
  Matrix s(2, 2);
  s(0, 0) = 1.0;
  s(1, 0) = 1.0;
  s(1, 1) = 0.0;
  for (const double p : {0.1, 0.9, 1.0}) EXPECT_FALSE(top_p_mask(s, p).test(1, 1));
}

TEST(TopP, MatchesBruteForceOracle) {
  SplitMix64 rng(2024);
  std::size_t rows_checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.below(64);
    const int kind = trial % 4;
    Matrix s(n, n);
    std::vector<std::vector<double>> rows(n);
    for (std::size_t u = 0; u < n; ++u) {
      rows[u] = random_row(u + 1, kind, rng);
      for (std::size_t v = 0; v <= u; ++v) s(u, v) = rows[u][v];
    }
    const double p = kind == 2 ? 0.25 * (1 + rng.below(3)) : 0.01 + 0.98 * rng.uniform();
    const BlockMask m = top_p_mask(s, p);
    for (std::size_t u = 0; u < n; ++u) {
      std::vector<std::size_t> got;
      for (std::size_t v = 0; v <= u; ++v) {
        if (m.test(u, v)) got.push_back(v);
      }
      ASSERT_EQ(got, oracle_row(rows[u], p)) << "trial " << trial << " row " << u;
      ++rows_checked;
    }
  }
  EXPECT_GE(rows_checked, 1000u);
}

TEST(TopP, DensityMonotoneInP) {
  const Matrix s = coarse_scores(random_matrix(48, 16, 13), random_matrix(48, 16, 14), 0.5, 16);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double d = top_p_mask(s, i / 100.0).density();
    EXPECT_GE(d, prev);
    prev = d;
  }
}

class EstimateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    spec_.length = 2048;
    spec_.seed = 3;
    in_ = generate(spec_);
  }
  WorkloadSpec spec_;
  AttentionInputs in_;
  RopeConfig rope_;
};

TEST_F(EstimateTest, FullThresholdGivesFullMask) {
  for (const auto mode : {BandMode::kDual, BandMode::kHighOnly, BandMode::kLowOnly,
                          BandMode::kFullSpectrum}) {
    EstimatorConfig cfg;
    cfg.top_p = 1.0;
    cfg.band_mode = mode;
    EXPECT_EQ(dual_band_estimate(in_.q, in_.k, cfg, rope_), BlockMask::full_causal(16));
  }
}

TEST_F(EstimateTest, DualIsUnionOfSingleBands) {
  EstimatorConfig cfg;
  cfg.force_diagonal = false;
  for (const double p : {0.3, 0.8, 0.95}) {
    cfg.top_p = p;
    cfg.band_mode = BandMode::kHighOnly;
    const BlockMask hi = dual_band_estimate(in_.q, in_.k, cfg, rope_);
    cfg.band_mode = BandMode::kLowOnly;
    const BlockMask lo = dual_band_estimate(in_.q, in_.k, cfg, rope_);
    cfg.band_mode = BandMode::kDual;
    EXPECT_EQ(dual_band_estimate(in_.q, in_.k, cfg, rope_), hi | lo);
  }
}

TEST_F(EstimateTest, FullSpectrumModeMatchesBaseline) {
  EstimatorConfig cfg;
  cfg.band_mode = BandMode::kFullSpectrum;
  for (const bool cal : {true, false}) {
    cfg.calibration = cal;
    EXPECT_EQ(dual_band_estimate(in_.q, in_.k, cfg, rope_),
              full_spectrum_estimate(in_.q, in_.k, cfg));
  }
  const auto est = estimate_detailed(in_.q, in_.k, cfg, rope_);
  ASSERT_EQ(est.branches.size(), 1u);
  EXPECT_EQ(est.branches[0].tau, 1.0);
}

TEST_F(EstimateTest, UncalibratedBranchesUseUnitTemperature) {
  EstimatorConfig cfg;
  cfg.calibration = false;
  for (const auto& br : estimate_detailed(in_.q, in_.k, cfg, rope_).branches) {
    EXPECT_EQ(br.tau, 1.0);
  }
  cfg.calibration = true;
  const auto est = estimate_detailed(in_.q, in_.k, cfg, rope_);
  EXPECT_LT(est.branches[0].tau, 1.0);  // high band loses energy to pooling
}

TEST_F(EstimateTest, DiagonalForcingIsLastStep) {
  EstimatorConfig cfg;
  cfg.top_p = 0.05;
  cfg.force_diagonal = false;
  const BlockMask raw = dual_band_estimate(in_.q, in_.k, cfg, rope_);
  cfg.force_diagonal = true;
  BlockMask forced = raw;
  forced.force_diagonal();
  EXPECT_EQ(dual_band_estimate(in_.q, in_.k, cfg, rope_), forced);
}

TEST_F(EstimateTest, ParallelMatchesSerial) {
  const EstimatorConfig cfg;
  const auto a = estimate_detailed(in_.q, in_.k, cfg, rope_, Exec::kSerial);
  const auto b = estimate_detailed(in_.q, in_.k, cfg, rope_, Exec::kParallel);
  EXPECT_EQ(a.mask, b.mask);
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    EXPECT_EQ(a.branches[i].scores, b.branches[i].scores);
  }
}

TEST(Estimate, ConfigErrors) {
  const Matrix q = random_matrix(256, 64, 15);
  EstimatorConfig cfg;  // d_low = 96 > 64
  EXPECT_THROW(dual_band_estimate(q, q, cfg, RopeConfig{1e6, 64}), ConfigError);
  cfg.d_low = 48;
  cfg.d_high = 33;
  EXPECT_THROW(dual_band_estimate(q, q, cfg, RopeConfig{1e6, 64}), ConfigError);
  cfg.d_high = 32;
  cfg.top_p = 0.0;
  EXPECT_THROW(dual_band_estimate(q, q, cfg, RopeConfig{1e6, 64}), ConfigError);
  cfg.top_p = 1.5;
  EXPECT_THROW(dual_band_estimate(q, q, cfg, RopeConfig{1e6, 64}), ConfigError);
  cfg.top_p = 0.9;
  cfg.block_size = 0;
  EXPECT_THROW(dual_band_estimate(q, q, cfg, RopeConfig{1e6, 64}), ConfigError);
  cfg.block_size = 64;
  EXPECT_NO_THROW(dual_band_estimate(q, q, cfg, RopeConfig{1e6, 64}));
  EXPECT_THROW(dual_band_estimate(q, q, cfg, RopeConfig{1e6, 128}), ShapeError);
}

TEST(Estimate, MasksAreCausalAndRowNonempty) {
  SplitMix64 rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t len = 1 + rng.below(700);
    const Matrix q = apply_rope(random_matrix(len, 32, 100 + trial, 0.5 + rng.uniform()),
                                RopeConfig{1e4, 32});
    const Matrix k = apply_rope(random_matrix(len, 32, 200 + trial), RopeConfig{1e4, 32});
    EstimatorConfig cfg;
    cfg.block_size = 1 + rng.below(80);
    cfg.d_high = 16;
    cfg.d_low = 24;
    cfg.top_p = 0.05 + 0.95 * rng.uniform();
    cfg.band_mode = static_cast<BandMode>(rng.below(4));
    cfg.calibration = rng.below(2);
    const BlockMask m = dual_band_estimate(q, k, cfg, RopeConfig{1e4, 32});
    EXPECT_EQ(m.block_count(), (len + cfg.block_size - 1) / cfg.block_size);
    EXPECT_TRUE(m.is_causal());
    EXPECT_TRUE(m.rows_nonempty());
    for (std::size_t u = 0; u < m.block_count(); ++u) EXPECT_TRUE(m.test(u, u));
  }
}

TEST(BandModeNames, RoundTrip) {
  for (const auto mode : {BandMode::kDual, BandMode::kHighOnly, BandMode::kLowOnly,
                          BandMode::kFullSpectrum}) {
    EXPECT_EQ(parse_band_mode(to_string(mode)), mode);
  }
  EXPECT_THROW(parse_band_mode("middle"), ConfigError);
}

}  // namespace
}  // namespace bandsparse
