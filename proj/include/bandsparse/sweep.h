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


#ifndef BANDSPARSE_SWEEP_H_
#define BANDSPARSE_SWEEP_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "bandsparse/estimator.h"
#include "bandsparse/exec.h"
#include "bandsparse/matrix.h"
#include "bandsparse/rope.h"

namespace bandsparse {

// One operating point of an estimator configuration.
struct FrontierPoint {
  double top_p = 0.0;
  double density = 0.0;
  double recall = 0.0;
  double near_diag_recall = 0.0;
};

enum class FrontierMetric { kRecall, kNearDiagRecall };

// 0.05 .. 0.95 in steps of 0.05, then 0.97, 0.99, 0.995, 0.999, 1.0.
std::vector<double> default_top_p_grid();

// Runs the estimator once per p (pooling shared) and scores every mask
// against the ground-truth importance.
std::vector<FrontierPoint> sweep_top_p(const PooledProjections& pooled,
                                       const Matrix& importance,
                                       const EstimatorConfig& base,
                                       const RopeConfig& rope_cfg,
                                       std::span<const double> p_grid,
                                       Exec exec = Exec::kSerial);

// Metric at `density` by linear interpolation along the frontier sorted by
// density. Points with equal density keep the best metric; densities outside
// the frontier clamp to the end points.
double value_at_density(std::span<const FrontierPoint> frontier,
                        double density, FrontierMetric metric);

// Mean of value_at_density over `points` evenly spaced densities in
// [lo, hi].
double mean_value_over_density(std::span<const FrontierPoint> frontier,
                               double lo, double hi, std::size_t points,
                               FrontierMetric metric);

// CSV header for the ablation table written by write_frontier_rows.
void write_frontier_header(std::ostream& out);
void write_frontier_rows(std::ostream& out, const EstimatorConfig& cfg,
                         std::span<const FrontierPoint> frontier);

}  // namespace bandsparse

#endif  // BANDSPARSE_SWEEP_H_
