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


#ifndef BANDSPARSE_ESTIMATOR_H_
#define BANDSPARSE_ESTIMATOR_H_

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "bandsparse/block_mask.h"
#include "bandsparse/exec.h"
#include "bandsparse/matrix.h"
#include "bandsparse/rope.h"

namespace bandsparse {

enum class BandMode { kDual, kHighOnly, kLowOnly, kFullSpectrum };

BandMode parse_band_mode(std::string_view name);
std::string_view to_string(BandMode mode);

struct EstimatorConfig {
  std::size_t block_size = 128;
  std::size_t d_high = 64;
  std::size_t d_low = 96;
  double top_p = 0.95;
  bool calibration = true;
  BandMode band_mode = BandMode::kDual;
  bool force_diagonal = true;

  // Throws ConfigError on an out-of-range field or when a band used by
  // band_mode is wider than head_dim.
  void validate(std::size_t head_dim) const;
};

// Lower bound applied to every calibration temperature.
inline constexpr double kMinTemperature = 1e-6;

struct PooledProjections {
  Matrix q_pooled;  // N x d
  Matrix k_pooled;  // N x d
  std::size_t block_size = 0;
  std::size_t block_count = 0;
  std::size_t last_block_len = 0;
};

// Row u is the mean of rows [u*B, min((u+1)*B, L)); the trailing partial
// block averages over its actual length. Throws ConfigError for B < 1 and
// ShapeError for an empty x.
Matrix block_mean_pool(const Matrix& x, std::size_t block_size,
                       Exec exec = Exec::kSerial);

PooledProjections pool_projections(const Matrix& q, const Matrix& k,
                                   std::size_t block_size,
                                   Exec exec = Exec::kSerial);

// sqrt(d_band / d) * (rms(q_band) / rms(q_full)) * (rms(k_band) / rms(k_full)),
// floored at kMinTemperature. Throws ShapeError when either full-spectrum
// matrix has zero energy.
double calibration_temperature(const Matrix& q_band, const Matrix& k_band,
                               const Matrix& q_full, const Matrix& k_full,
                               std::size_t d_band, std::size_t d);

// Block-causal softmax(q_band k_band^T / (tau sqrt(d_band))). Entries above
// the diagonal are exactly 0. Throws ConfigError for tau <= 0.
Matrix coarse_scores(const Matrix& q_band, const Matrix& k_band, double tau,
                     std::size_t d_band, Exec exec = Exec::kSerial);

// Per row, sort key blocks by descending probability (stable, so ties go to
// the lower index) and keep block v while the mass strictly before it is
// below p. No diagonal forcing.
BlockMask top_p_mask(const Matrix& scores, double p);

struct BranchResult {
  BandKind band = BandKind::kFull;
  std::size_t width = 0;
  double tau = 1.0;
  Matrix scores;
  BlockMask mask;
};

struct Estimate {
  BlockMask mask;
  std::vector<BranchResult> branches;
};

// Pool, slice each band, calibrate, score, top-p, union, then force the
// diagonal (when configured). q and k must already be RoPE-rotated.
Estimate estimate_detailed(const Matrix& q, const Matrix& k,
                           const EstimatorConfig& cfg,
                           const RopeConfig& rope_cfg,
                           Exec exec = Exec::kSerial);

// Same from already-pooled projections; the expensive O(L d) pooling can be
// shared across a sweep of configurations with one block size.
Estimate estimate_from_pooled(const PooledProjections& pooled,
                              const EstimatorConfig& cfg,
                              const RopeConfig& rope_cfg,
                              Exec exec = Exec::kSerial);

BlockMask dual_band_estimate(const Matrix& q, const Matrix& k,
                             const EstimatorConfig& cfg,
                             const RopeConfig& rope_cfg,
                             Exec exec = Exec::kSerial);

// Mean-pooling baseline: a single full-width branch with tau = 1.
BlockMask full_spectrum_estimate(const Matrix& q, const Matrix& k,
                                 const EstimatorConfig& cfg,
                                 Exec exec = Exec::kSerial);

}  // namespace bandsparse

#endif  // BANDSPARSE_ESTIMATOR_H_
