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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bandsparse/errors.h"

namespace bandsparse {
namespace {

TEST(TileFlops, RatioIsInverseDensityForWholeBlocks) {
  BlockMask m = BlockMask::diagonal(8);
  m.set(5, 1);
  m.set(7, 0);
  const TileFlops f = tile_flops(m, 8 * 16, 16, 32, 32);
  EXPECT_NEAR(f.ratio(), 1.0 / m.density(), 1e-12);
  EXPECT_DOUBLE_EQ(f.dense, 36.0 * 16 * 16 * 128);
}

TEST(TileFlops, PartialLastBlockCountsActualLength) {
  const BlockMask m = BlockMask::full_causal(2);
  // Tiles: (0,0) 4x4, (1,0) 2x4, (1,1) 2x2.
  const TileFlops f = tile_flops(m, 6, 4, 1, 1);
  EXPECT_DOUBLE_EQ(f.dense, (16.0 + 8.0 + 4.0) * 4.0);
  EXPECT_DOUBLE_EQ(f.sparse, f.dense);
  EXPECT_THROW(tile_flops(m, 9, 4, 1, 1), ShapeError);
}

TEST(LogLogSlope, RecoversPowerLaw) {
  const std::vector<double> x = {1024, 2048, 4096, 8192};
  std::vector<double> y;
  for (const double v : x) y.push_back(3e-9 * std::pow(v, 1.7));
  EXPECT_NEAR(loglog_slope(x, y), 1.7, 1e-12);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(loglog_slope(one, one), ShapeError);
}

}  // namespace
}  // namespace bandsparse
