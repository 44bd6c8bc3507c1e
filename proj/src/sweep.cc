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


#include "bandsparse/sweep.h"

#include <algorithm>
#include <ostream>

#include "bandsparse/attention.h"
#include "bandsparse/errors.h"

namespace bandsparse {
namespace {

double metric_of(const FrontierPoint& p, FrontierMetric metric) {
  return metric == FrontierMetric::kRecall ? p.recall : p.near_diag_recall;
}

}  // namespace

std::vector<double> default_top_p_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  for (const double p : {0.97, 0.99, 0.995, 0.999, 1.0}) grid.push_back(p);
  return grid;
}

std::vector<FrontierPoint> sweep_top_p(const PooledProjections& pooled,
                                       const Matrix& importance,
                                       const EstimatorConfig& base,
                                       const RopeConfig& rope_cfg,
                                       std::span<const double> p_grid,
                                       Exec exec) {
  std::vector<FrontierPoint> frontier;
  frontier.reserve(p_grid.size());
  for (const double p : p_grid) {
    EstimatorConfig cfg = base;
    cfg.top_p = p;
    const BlockMask mask = estimate_from_pooled(pooled, cfg, rope_cfg, exec).mask;
    frontier.push_back({p, mask.density(), recall_mass(mask, importance),
                        near_diagonal_recall(mask, importance)});
  }
  return frontier;
}

double value_at_density(std::span<const FrontierPoint> frontier, double density,
                        FrontierMetric metric) {
  if (frontier.empty()) throw ConfigError("empty frontier");
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : frontier) pts.emplace_back(p.density, metric_of(p, metric));
  std::sort(pts.begin(), pts.end());
  // Collapse equal densities to their best value.
  std::vector<std::pair<double, double>> curve;
  for (const auto& pt : pts) {
    if (!curve.empty() && curve.back().first == pt.first) {
      curve.back().second = std::max(curve.back().second, pt.second);
    } else {
      curve.push_back(pt);
    }
  }
  if (density <= curve.front().first) return curve.front().second;
  if (density >= curve.back().first) return curve.back().second;
  const auto hi = std::upper_bound(
      curve.begin(), curve.end(), density,
      [](double d, const std::pair<double, double>& pt) { return d < pt.first; });
  const auto lo = hi - 1;
  const double t = (density - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double mean_value_over_density(std::span<const FrontierPoint> frontier,
                               double lo, double hi, std::size_t points,
                               FrontierMetric metric) {
  if (points == 0) throw ConfigError("need at least one density point");
  if (points == 1) return value_at_density(frontier, lo, metric);
  double sum = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double d = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(points - 1);
    sum += value_at_density(frontier, d, metric);
  }
  return sum / static_cast<double>(points);
}

void write_frontier_header(std::ostream& out) {
  out << "band_mode,calibration,block_size,top_p,density,recall,near_diag_recall\n";
}

void write_frontier_rows(std::ostream& out, const EstimatorConfig& cfg,
                         std::span<const FrontierPoint> frontier) {
  const auto old_precision = out.precision(10);
  for (const auto& p : frontier) {
    out << to_string(cfg.band_mode) << ',' << (cfg.calibration ? "on" : "off")
        << ',' << cfg.block_size << ',' << p.top_p << ',' << p.density << ','
        << p.recall << ',' << p.near_diag_recall << '\n';
  }
  out.precision(old_precision);
}

}  // namespace bandsparse
