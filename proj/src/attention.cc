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


#include "bandsparse/attention.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "bandsparse/errors.h"
#include "bandsparse/numerics.h"
#include "parallel.h"

namespace bandsparse {
namespace {

// Attention of query row n over the ascending key list `keys`; writes the
// normalized weights into `weights` (same length as keys).
template <typename T>
void attend_row(const BasicAttentionInputs<T>& in, std::size_t n,
                std::span<const std::size_t> keys, std::vector<double>& weights,
                std::span<T> out) {
  const auto qn = in.q.row(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.q.cols()));
  weights.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto km = in.k.row(keys[i]);
    double dot = 0.0;
    for (std::size_t c = 0; c < qn.size(); ++c) {
      dot += static_cast<double>(qn[c]) * static_cast<double>(km[c]);
    }
    weights[i] = dot * scale;
  }
  softmax_inplace(std::span<double>(weights));
  std::vector<double> acc(out.size(), 0.0);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto vm = in.v.row(keys[i]);
    const double w = weights[i];
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += w * static_cast<double>(vm[c]);
  }
  for (std::size_t c = 0; c < acc.size(); ++c) out[c] = static_cast<T>(acc[c]);
}

// Dense causal weights of query n over keys 0..n.
void dense_weights(const Matrix& q, const Matrix& k, std::size_t n,
                   std::vector<double>& weights) {
  const auto qn = q.row(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  weights.resize(n + 1);
  for (std::size_t m = 0; m <= n; ++m) {
    const auto km = k.row(m);
    double dot = 0.0;
    for (std::size_t c = 0; c < qn.size(); ++c) dot += qn[c] * km[c];
    weights[m] = dot * scale;
  }
  softmax_inplace(std::span<double>(weights));
}

void check_importance(const BlockMask& mask, const Matrix& importance) {
  if (importance.rows() != mask.block_count() ||
      importance.cols() != mask.block_count()) {
    throw ShapeError("importance matrix does not match the mask");
  }
}

}  // namespace

template <typename T>
void BasicAttentionInputs<T>::validate() const {
  if (q.rows() == 0) throw ShapeError("attention inputs are empty");
  if (k.rows() != q.rows() || v.rows() != q.rows()) {
    throw ShapeError("q, k and v must have the same number of rows");
  }
  if (k.cols() != q.cols() || q.cols() == 0) {
    throw ShapeError("q and k must share a nonzero head dimension");
  }
}

template <typename T>
BasicMatrix<T> dense_attention(const BasicAttentionInputs<T>& in, Exec exec) {
  in.validate();
  const std::size_t len = in.length();
  BasicMatrix<T> out(len, in.v.cols());
  internal::for_each_index(len, exec, [&](std::size_t n) {
    std::vector<std::size_t> keys(n + 1);
    for (std::size_t m = 0; m <= n; ++m) keys[m] = m;
    std::vector<double> weights;
    attend_row(in, n, keys, weights, out.row(n));
  });
  return out;
}

template <typename T>
BasicMatrix<T> block_sparse_attention(const BasicAttentionInputs<T>& in,
                                      const BlockMask& mask,
                                      std::size_t block_size, Exec exec) {
  in.validate();
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
  const std::size_t len = in.length();
  const std::size_t n_blocks = (len + block_size - 1) / block_size;
  if (mask.block_count() != n_blocks) {
    throw ShapeError("mask has " + std::to_string(mask.block_count()) +
                     " blocks, inputs need " + std::to_string(n_blocks));
  }
  const std::size_t d = in.q.cols();
  const std::size_t dv = in.v.cols();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  BasicMatrix<T> out(len, dv);
  // One query tile per task; key tiles are folded in with a running max
  // and normalizer per row.
  internal::for_each_index(n_blocks, exec, [&](std::size_t u) {
    const std::size_t q0 = u * block_size;
    const std::size_t rows = std::min(block_size, len - q0);
    std::vector<double> row_max(rows, -std::numeric_limits<double>::infinity());
    std::vector<double> row_sum(rows, 0.0);
    std::vector<double> acc(rows * dv, 0.0);
    std::vector<double> tile(block_size);
    for (std::size_t v = 0; v <= u; ++v) {
      if (!mask.test(u, v)) continue;
      const std::size_t k0 = v * block_size;
      const std::size_t cols = std::min(block_size, len - k0);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t n = q0 + r;
        // Causal limit inside the diagonal tile.
        const std::size_t live = v == u ? std::min(cols, r + 1) : cols;
        const auto qn = in.q.row(n);
        double tile_max = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < live; ++c) {
          const auto km = in.k.row(k0 + c);
          double dot = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            dot += static_cast<double>(qn[i]) * static_cast<double>(km[i]);
          }
          tile[c] = dot * scale;
          tile_max = std::max(tile_max, tile[c]);
        }
        const double new_max = std::max(row_max[r], tile_max);
        const double rescale = std::exp(row_max[r] - new_max);
        double* a = acc.data() + r * dv;
        row_sum[r] *= rescale;
        for (std::size_t i = 0; i < dv; ++i) a[i] *= rescale;
        for (std::size_t c = 0; c < live; ++c) {
          const double w = std::exp(tile[c] - new_max);
          row_sum[r] += w;
          const auto vm = in.v.row(k0 + c);
          for (std::size_t i = 0; i < dv; ++i) a[i] += w * static_cast<double>(vm[i]);
        }
        row_max[r] = new_max;
      }
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (row_sum[r] == 0.0) {
        throw EmptyRowError("token " + std::to_string(q0 + r) +
                            " has no selected causal keys");
      }
      auto o = out.row(q0 + r);
      for (std::size_t i = 0; i < dv; ++i) {
        o[i] = static_cast<T>(acc[r * dv + i] / row_sum[r]);
      }
    }
  });
  return out;
}

Matrix ground_truth_block_importance(const Matrix& q, const Matrix& k,
                                     std::size_t block_size, Exec exec) {
  if (q.rows() != k.rows() || q.cols() != k.cols() || q.rows() == 0) {
    throw ShapeError("q and k must share a nonempty shape");
  }
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
  const std::size_t len = q.rows();
  const std::size_t n_blocks = (len + block_size - 1) / block_size;
  Matrix imp(n_blocks, n_blocks);
  internal::for_each_index(n_blocks, exec, [&](std::size_t u) {
    const std::size_t begin = u * block_size;
    const std::size_t end = std::min(begin + block_size, len);
    auto row = imp.row(u);
    std::vector<double> weights;
    for (std::size_t n = begin; n < end; ++n) {
      dense_weights(q, k, n, weights);
      for (std::size_t m = 0; m <= n; ++m) row[m / block_size] += weights[m];
    }
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (auto& value : row) value *= inv;
  });
  return imp;
}

std::vector<double> per_row_recall(const BlockMask& mask,
                                   const Matrix& importance) {
  check_importance(mask, importance);
  const std::size_t n = mask.block_count();
  std::vector<double> recall(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    double covered = 0.0;
    double total = 0.0;
    for (std::size_t v = 0; v <= u; ++v) {
      total += importance(u, v);
      if (mask.test(u, v)) covered += importance(u, v);
    }
    recall[u] = total > 0.0 ? covered / total : 1.0;
  }
  return recall;
}

double recall_mass(const BlockMask& mask, const Matrix& importance) {
  const auto recall = per_row_recall(mask, importance);
  if (recall.empty()) return 1.0;
  double sum = 0.0;
  for (const double r : recall) sum += r;
  return sum / static_cast<double>(recall.size());
}

double near_diagonal_recall(const BlockMask& mask, const Matrix& importance,
                            std::size_t max_distance) {
  check_importance(mask, importance);
  const std::size_t n = mask.block_count();
  double sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t first = u > max_distance ? u - max_distance : 0;
    double covered = 0.0;
    double total = 0.0;
    for (std::size_t v = first; v <= u; ++v) {
      total += importance(u, v);
      if (mask.test(u, v)) covered += importance(u, v);
    }
    if (total <= 0.0) continue;
    sum += covered / total;
    ++rows;
  }
  return rows == 0 ? 1.0 : sum / static_cast<double>(rows);
}

EvalReport evaluate(const BlockMask& mask, const AttentionInputs& in,
                    std::size_t block_size, Exec exec, EvalTimings* timings) {
  in.validate();
  const Matrix importance = ground_truth_block_importance(in.q, in.k, block_size, exec);
  EvalReport report;
  report.density = mask.density();
  report.per_row_recall = per_row_recall(mask, importance);
  report.recall_mass = recall_mass(mask, importance);
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const Matrix dense = dense_attention(in, exec);
  const auto t1 = Clock::now();
  const Matrix sparse = block_sparse_attention(in, mask, block_size, exec);
  const auto t2 = Clock::now();
  if (timings) {
    timings->dense_seconds = std::chrono::duration<double>(t1 - t0).count();
    timings->sparse_seconds = std::chrono::duration<double>(t2 - t1).count();
  }
  double abs_sum = 0.0;
  double max_rel = 0.0;
  const auto d = dense.values();
  const auto s = sparse.values();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double diff = std::abs(s[i] - d[i]);
    abs_sum += diff;
    max_rel = std::max(max_rel, diff / std::max(std::abs(d[i]), 1e-12));
  }
  report.output_mae = d.empty() ? 0.0 : abs_sum / static_cast<double>(d.size());
  report.output_max_rel_err = max_rel;
  return report;
}

void to_json(nlohmann::json& j, const EvalReport& report) {
  j = nlohmann::json{{"density", report.density},
                     {"recall_mass", report.recall_mass},
                     {"output_mae", report.output_mae},
                     {"output_max_rel_err", report.output_max_rel_err}};
}

template struct BasicAttentionInputs<float>;
template struct BasicAttentionInputs<double>;
template BasicMatrix<float> dense_attention(const BasicAttentionInputs<float>&, Exec);
template BasicMatrix<double> dense_attention(const BasicAttentionInputs<double>&, Exec);
template BasicMatrix<float> block_sparse_attention(const BasicAttentionInputs<float>&,
                                                   const BlockMask&, std::size_t, Exec);
template BasicMatrix<double> block_sparse_attention(const BasicAttentionInputs<double>&,
                                                    const BlockMask&, std::size_t, Exec);

}  // namespace bandsparse
