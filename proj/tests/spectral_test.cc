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

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bandsparse/errors.h"

namespace bandsparse {
namespace {

constexpr double kPi = std::numbers::pi;

// (1/B) |sum_{n<B} e^{i n theta}| by direct summation.
double brute_force(double theta, std::size_t block) {
  std::complex<long double> sum = 0.0L;
  for (std::size_t n = 0; n < block; ++n) {
    const long double a = static_cast<long double>(n) * theta;
    sum += std::complex<long double>(std::cos(a), std::sin(a));
  }
  return static_cast<double>(std::abs(sum) / block);
}

TEST(AttenuationExact, ZeroFrequencyIsOne) {
  for (const std::size_t b : {1, 2, 7, 128}) EXPECT_EQ(attenuation_exact(0.0, b), 1.0);
}

TEST(AttenuationExact, FullPeriodCancels) {
  EXPECT_LT(attenuation_exact(2 * kPi / 128, 128), 1e-12);
}

TEST(AttenuationExact, Pair28ForLongContextBase) {
  const double theta = std::pow(1e6, -28.0 / 128.0);
  EXPECT_NEAR(theta, 0.04870, 5e-6);
  const double lambda = attenuation_exact(theta, 128);
  EXPECT_NEAR(lambda, brute_force(theta, 128), 1e-12);
  EXPECT_NEAR(lambda, 0.0079, 2e-4);
  EXPECT_NEAR(attenuation_sinc(theta, 128) / lambda, 1.0, 1e-3);
}

TEST(AttenuationExact, MatchesBruteForceOnGrid) {
  for (std::size_t b = 2; b <= 256; b += 2) {
    for (int i = 1; i <= 400; ++i) {
      const double theta = kPi * i / 400.0;
      ASSERT_NEAR(attenuation_exact(theta, b), brute_force(theta, b), 1e-12)
          << "theta=" << theta << " B=" << b;
    }
  }
}

TEST(AttenuationExact, ZerosAtMultiplesOfBlockFrequency) {
  for (const std::size_t b : {4, 16, 128, 256}) {
    for (std::size_t k = 1; k < b; ++k) {
      EXPECT_LT(attenuation_exact(2 * kPi * k / b, b), 1e-12) << b << " " << k;
    }
  }
}

TEST(AttenuationExact, BoundedInUnitInterval) {
  for (int i = 0; i <= 2000; ++i) {
    const double theta = 2 * kPi * i / 2000.0;
    const double v = attenuation_exact(theta, 37);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(AttenuationSinc, Examples) {
  EXPECT_EQ(attenuation_sinc(0.0, 128), 1.0);
  EXPECT_LT(attenuation_sinc(2 * kPi / 128, 128), 1e-15);
}

TEST(AttenuationSinc, CloseToExactFromPair10) {
  const auto thetas = frequencies(RopeConfig{});
  EXPECT_NEAR(thetas[10], 0.11, 0.006);
  for (std::size_t j = 10; j < thetas.size(); ++j) {
    const double exact = attenuation_exact(thetas[j], 128);
    EXPECT_LT(std::abs(exact - attenuation_sinc(thetas[j], 128)) / exact, 0.002)
        << "j=" << j;
  }
}

TEST(Cutoff, Examples) {
  EXPECT_NEAR(*cutoff_dimension(RopeConfig{}, 128), 27.93, 0.005);
  EXPECT_NEAR(*cutoff_dimension(RopeConfig{5e5, 128}, 128), 29.40, 0.005);
  const double at7 = *cutoff_dimension(RopeConfig{}, 7);
  EXPECT_NEAR(at7, 128 * std::log(7 / (2 * kPi)) / std::log(1e6), 1e-12);
  EXPECT_NEAR(at7, 1.0, 0.01);
  EXPECT_FALSE(cutoff_dimension(RopeConfig{}, 6).has_value());
}

TEST(Cutoff, MonotoneInBlockAndBase) {
  for (const double base : {1e4, 5e5, 1e6, 1e7}) {
    double prev = -1.0;
    for (std::size_t b = 7; b <= 512; ++b) {
      const double c = *cutoff_dimension(RopeConfig{base, 128}, b);
      EXPECT_GT(c, prev);
      prev = c;
    }
  }
  for (const std::size_t b : {16, 64, 256}) {
    double prev = 1e300;
    for (const double base : {1e3, 1e4, 1e5, 1e6, 1e7}) {
      const double c = *cutoff_dimension(RopeConfig{base, 128}, b);
      EXPECT_LT(c, prev);
      prev = c;
    }
  }
}

TEST(Profile, DeadZoneEndsNear28) {
  const auto p = build_profile(RopeConfig{}, 128);
  for (std::size_t d = 0; d < 30; ++d) EXPECT_EQ(p.dim_zones[d], Zone::kDead) << d;
  for (std::size_t d = 30; d < 128; ++d) EXPECT_NE(p.dim_zones[d], Zone::kDead) << d;
}

TEST(Profile, Pair2jSixtyIsSemantic) {
  const auto p = build_profile(RopeConfig{}, 128);
  EXPECT_NEAR(p.lambdas_exact[30], brute_force(p.thetas[30], 128), 1e-12);
  EXPECT_NEAR(p.lambdas_exact[30], 0.998, 0.0015);
  EXPECT_EQ(p.pair_zones[30], Zone::kSemantic);
}

TEST(Profile, BlockOfOneIsAllSemantic) {
  const auto p = build_profile(RopeConfig{}, 1);
  EXPECT_FALSE(p.cutoff_dim.has_value());
  for (std::size_t j = 0; j < 64; ++j) {
    EXPECT_EQ(p.lambdas_exact[j], 1.0);
    EXPECT_EQ(p.pair_zones[j], Zone::kSemantic);
  }
}

TEST(Profile, HalfSplitMapsZonesThroughLayout) {
  const auto p = build_profile(RopeConfig{1e6, 128, PairLayout::kHalfSplit}, 128);
  for (std::size_t j = 0; j < 64; ++j) {
    EXPECT_EQ(p.dim_zones[j], p.pair_zones[j]);
    EXPECT_EQ(p.dim_zones[j + 64], p.pair_zones[j]);
  }
}

TEST(Profile, ThresholdsValidated) {
  EXPECT_THROW(build_profile(RopeConfig{}, 128, {0.0, 0.9}), ConfigError);
  EXPECT_THROW(build_profile(RopeConfig{}, 128, {0.5, 0.4}), ConfigError);
  EXPECT_THROW(build_profile(RopeConfig{}, 128, {0.1, 1.0}), ConfigError);
}

TEST(Profile, CsvExport) {
  std::ostringstream out;
  write_profile_csv(out, build_profile(RopeConfig{}, 128));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "pair_index,dim_index,theta,lambda_exact,lambda_sinc,zone");
  int rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  EXPECT_EQ(rows, 64);
  EXPECT_EQ(first.substr(0, 6), "0,0,1,");
  EXPECT_EQ(first.substr(first.size() - 4), "dead");
}

}  // namespace
}  // namespace bandsparse
