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


#ifndef BANDSPARSE_ATTENTION_H_
#define BANDSPARSE_ATTENTION_H_

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "bandsparse/block_mask.h"
#include "bandsparse/exec.h"
#include "bandsparse/matrix.h"

namespace bandsparse {

template <typename T>
struct BasicAttentionInputs {
  BasicMatrix<T> q;  // L x d, post-RoPE
  BasicMatrix<T> k;  // L x d, post-RoPE
  BasicMatrix<T> v;  // L x d_v

  std::size_t length() const { return q.rows(); }
  // Throws ShapeError unless q, k, v share L and q, k share d.
  void validate() const;
};

using AttentionInputs = BasicAttentionInputs<double>;

// Token-causal softmax(q k^T / sqrt(d)) v.
template <typename T>
BasicMatrix<T> dense_attention(const BasicAttentionInputs<T>& in,
                               Exec exec = Exec::kSerial);

// For each query token, softmax restricted to keys in the blocks selected
// for its query block, intersected with token causality; the output is the
// renormalized weighted sum over that key set. Throws ShapeError when the
// mask size does not match ceil(L / B) and EmptyRowError when a token's key
// set is empty.
template <typename T>
BasicMatrix<T> block_sparse_attention(const BasicAttentionInputs<T>& in,
                                      const BlockMask& mask,
                                      std::size_t block_size,
                                      Exec exec = Exec::kSerial);

// Entry (u, v): mean over query tokens of block u of the dense causal
// attention mass falling in key block v. Causal rows sum to 1.
Matrix ground_truth_block_importance(const Matrix& q, const Matrix& k,
                                     std::size_t block_size,
                                     Exec exec = Exec::kSerial);

// Per-row covered mass of `importance` under `mask`.
std::vector<double> per_row_recall(const BlockMask& mask,
                                   const Matrix& importance);
// Mean of per_row_recall.
double recall_mass(const BlockMask& mask, const Matrix& importance);
// Recall restricted to pairs with u - v <= max_distance, renormalized by the
// importance mass in that band, averaged over rows.
double near_diagonal_recall(const BlockMask& mask, const Matrix& importance,
                            std::size_t max_distance = 1);

struct EvalReport {
  double density = 0.0;
  double recall_mass = 0.0;
  double output_mae = 0.0;
  double output_max_rel_err = 0.0;
  std::vector<double> per_row_recall;
};

// Density and recall from the ground-truth importance; output errors of
// block-sparse against dense attention. output_max_rel_err is
// max |sparse - dense| / max(|dense|, 1e-12) per element.
struct EvalTimings {
  double dense_seconds = 0.0;
  double sparse_seconds = 0.0;
};
EvalReport evaluate(const BlockMask& mask, const AttentionInputs& in,
                    std::size_t block_size, Exec exec = Exec::kSerial,
                    EvalTimings* timings = nullptr);

// Keys: density, recall_mass, output_mae, output_max_rel_err.
void to_json(nlohmann::json& j, const EvalReport& report);

}  // namespace bandsparse

#endif  // BANDSPARSE_ATTENTION_H_
