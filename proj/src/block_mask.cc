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


#include "bandsparse/block_mask.h"

#include <ostream>
#include <string>

#include "bandsparse/errors.h"

namespace bandsparse {

BlockMask BlockMask::full_causal(std::size_t block_count) {
  BlockMask m(block_count);
  for (std::size_t u = 0; u < block_count; ++u) {
    for (std::size_t v = 0; v <= u; ++v) m.bits_[u * block_count + v] = 1;
  }
  return m;
}

BlockMask BlockMask::diagonal(std::size_t block_count) {
  BlockMask m(block_count);
  m.force_diagonal();
  return m;
}

void BlockMask::set(std::size_t u, std::size_t v, bool on) {
  if (u >= n_ || v >= n_) throw ShapeError("block index out of range");
  if (v > u) {
    throw ShapeError("non-causal block pair (" + std::to_string(u) + ", " +
                     std::to_string(v) + ")");
  }
  bits_[u * n_ + v] = on ? 1 : 0;
}

void BlockMask::force_diagonal() {
  for (std::size_t u = 0; u < n_; ++u) bits_[u * n_ + u] = 1;
}

std::size_t BlockMask::selected_count() const {
  std::size_t count = 0;
  for (const auto b : bits_) count += b;
  return count;
}

std::size_t BlockMask::row_count(std::size_t u) const {
  std::size_t count = 0;
  for (std::size_t v = 0; v < n_; ++v) count += bits_[u * n_ + v];
  return count;
}

double BlockMask::density() const {
  if (n_ == 0) return 0.0;
  return static_cast<double>(selected_count()) /
         static_cast<double>(causal_count(n_));
}

bool BlockMask::is_causal() const {
  for (std::size_t u = 0; u < n_; ++u) {
    for (std::size_t v = u + 1; v < n_; ++v) {
      if (bits_[u * n_ + v]) return false;
    }
  }
  return true;
}

bool BlockMask::rows_nonempty() const {
  for (std::size_t u = 0; u < n_; ++u) {
    if (row_count(u) == 0) return false;
  }
  return true;
}

bool BlockMask::subset_of(const BlockMask& other) const {
  if (other.n_ != n_) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

BlockMask& BlockMask::operator|=(const BlockMask& other) {
  if (other.n_ != n_) throw ShapeError("mask union: block counts differ");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

BlockMask BlockMask::from_bytes(std::size_t block_count,
                                std::vector<std::uint8_t> bytes) {
  if (bytes.size() != block_count * block_count) {
    throw ShapeError("mask bytes do not form an N x N matrix");
  }
  BlockMask m(block_count);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] > 1) throw FormatError("mask byte is neither 0 nor 1");
    m.bits_[i] = bytes[i];
  }
  if (!m.is_causal()) throw FormatError("mask selects non-causal blocks");
  return m;
}

void write_mask_csv(std::ostream& out, const BlockMask& mask) {
  out << "u,v\n";
  for (std::size_t u = 0; u < mask.block_count(); ++u) {
    for (std::size_t v = 0; v <= u; ++v) {
      if (mask.test(u, v)) out << u << ',' << v << '\n';
    }
  }
}

}  // namespace bandsparse
