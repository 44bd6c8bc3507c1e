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


#ifndef BANDSPARSE_BLOCK_MASK_H_
#define BANDSPARSE_BLOCK_MASK_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace bandsparse {

// N x N selection of (query block, key block) pairs. Only the causal lower
// triangle (v <= u) may be set.
class BlockMask {
 public:
  BlockMask() = default;
  explicit BlockMask(std::size_t block_count)
      : n_(block_count), bits_(block_count * block_count, 0) {}

  static BlockMask full_causal(std::size_t block_count);
  static BlockMask diagonal(std::size_t block_count);

  std::size_t block_count() const { return n_; }

  bool test(std::size_t u, std::size_t v) const { return bits_[u * n_ + v]; }
  // Throws ShapeError when v > u.
  void set(std::size_t u, std::size_t v, bool on = true);

  void force_diagonal();

  std::size_t selected_count() const;
  std::size_t row_count(std::size_t u) const;
  static std::size_t causal_count(std::size_t block_count) {
    return block_count * (block_count + 1) / 2;
  }
  // Selected causal pairs / all causal pairs.
  double density() const;

  bool is_causal() const;
  bool rows_nonempty() const;
  // Every bit of this mask is also set in other.
  bool subset_of(const BlockMask& other) const;

  BlockMask& operator|=(const BlockMask& other);
  friend BlockMask operator|(BlockMask a, const BlockMask& b) { return a |= b; }
  friend bool operator==(const BlockMask&, const BlockMask&) = default;

  const std::vector<std::uint8_t>& bytes() const { return bits_; }
  static BlockMask from_bytes(std::size_t block_count,
                              std::vector<std::uint8_t> bytes);

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

// "u,v" header then one selected pair per line, row-major order.
void write_mask_csv(std::ostream& out, const BlockMask& mask);

}  // namespace bandsparse

#endif  // BANDSPARSE_BLOCK_MASK_H_
