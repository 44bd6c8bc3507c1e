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


#include "bandsparse/tensor_io.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "bandsparse/errors.h"

namespace bandsparse {
namespace {

static_assert(std::endian::native == std::endian::little,
              "PRSM1 I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic = {'P', 'R', 'S', 'M'};

void write_header(std::ostream& out, DType dtype,
                  std::initializer_list<std::uint32_t> dims) {
  out.write(kMagic.data(), kMagic.size());
  const std::array<std::uint8_t, 3> meta = {
      kPrsmVersion, static_cast<std::uint8_t>(dtype),
      static_cast<std::uint8_t>(dims.size())};
  out.write(reinterpret_cast<const char*>(meta.data()), meta.size());
  for (const std::uint32_t d : dims) {
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  }
}

std::uint32_t checked_dim(std::size_t n) {
  if (n > 0xFFFFFFFFu) throw FormatError("dimension exceeds 32 bits");
  return static_cast<std::uint32_t>(n);
}

void read_exact(std::istream& in, void* dst, std::size_t bytes) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw FormatError("truncated PRSM1 stream");
  }
}

void expect_end(std::istream& in) {
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after PRSM1 payload");
  }
}

template <typename T>
std::vector<T> read_payload(std::istream& in, std::size_t count) {
  std::vector<T> out(count);
  read_exact(in, out.data(), count * sizeof(T));
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::size_t TensorHeader::element_count() const {
  std::size_t n = 1;
  for (const auto d : dims) n *= d;
  return n;
}

void write_matrix(std::ostream& out, const Matrix& m, DType dtype) {
  const auto rows = checked_dim(m.rows());
  const auto cols = checked_dim(m.cols());
  switch (dtype) {
    case DType::kFloat64:
      write_header(out, dtype, {rows, cols});
      out.write(reinterpret_cast<const char*>(m.values().data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
      return;
    case DType::kFloat32:
      write_matrix(out, m.cast<float>());
      return;
    case DType::kUInt8:
      break;
  }
  throw FormatError("real matrices are stored as float32 or float64");
}

void write_matrix(std::ostream& out, const MatrixF& m) {
  write_header(out, DType::kFloat32, {checked_dim(m.rows()), checked_dim(m.cols())});
  out.write(reinterpret_cast<const char*>(m.values().data()),
            static_cast<std::streamsize>(m.size() * sizeof(float)));
}

void write_mask(std::ostream& out, const BlockMask& mask) {
  const auto n = checked_dim(mask.block_count());
  write_header(out, DType::kUInt8, {n, n});
  out.write(reinterpret_cast<const char*>(mask.bytes().data()),
            static_cast<std::streamsize>(mask.bytes().size()));
}

TensorHeader read_header(std::istream& in) {
  std::array<char, 4> magic{};
  read_exact(in, magic.data(), magic.size());
  if (magic != kMagic) throw FormatError("bad magic: not a PRSM1 file");
  std::array<std::uint8_t, 3> meta{};
  read_exact(in, meta.data(), meta.size());
  if (meta[0] != kPrsmVersion) {
    throw FormatError("unsupported PRSM version " + std::to_string(meta[0]));
  }
  if (meta[1] > static_cast<std::uint8_t>(DType::kUInt8)) {
    throw FormatError("unknown dtype code " + std::to_string(meta[1]));
  }
  TensorHeader header;
  header.dtype = static_cast<DType>(meta[1]);
  header.dims.resize(meta[2]);
  for (auto& d : header.dims) read_exact(in, &d, sizeof(d));
  return header;
}

Matrix read_matrix(std::istream& in) {
  const TensorHeader header = read_header(in);
  if (header.dims.size() != 2) {
    throw FormatError("expected a 2-D tensor, got " +
                      std::to_string(header.dims.size()) + " dims");
  }
  const std::size_t count = header.element_count();
  std::vector<double> values;
  switch (header.dtype) {
    case DType::kFloat64:
      values = read_payload<double>(in, count);
      break;
    case DType::kFloat32: {
      const auto narrow = read_payload<float>(in, count);
      values.assign(narrow.begin(), narrow.end());
      break;
    }
    case DType::kUInt8:
      throw FormatError("uint8 tensor where a real matrix was expected");
  }
  expect_end(in);
  for (const double v : values) {
    if (!std::isfinite(v)) throw FormatError("non-finite value in tensor");
  }
  return Matrix(header.dims[0], header.dims[1], std::move(values));
}

BlockMask read_mask(std::istream& in) {
  const TensorHeader header = read_header(in);
  if (header.dtype != DType::kUInt8 || header.dims.size() != 2 ||
      header.dims[0] != header.dims[1]) {
    throw FormatError("a mask is a square uint8 PRSM1 tensor");
  }
  auto bytes = read_payload<std::uint8_t>(in, header.element_count());
  expect_end(in);
  return BlockMask::from_bytes(header.dims[0], std::move(bytes));
}

void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 DType dtype) {
  auto out = open_out(path);
  write_matrix(out, m, dtype);
  finish(out, path);
}

void save_mask(const std::filesystem::path& path, const BlockMask& mask) {
  auto out = open_out(path);
  write_mask(out, mask);
  finish(out, path);
}

Matrix load_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

BlockMask load_mask(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_mask(in);
}

}  // namespace bandsparse
