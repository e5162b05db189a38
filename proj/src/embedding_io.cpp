// Copyright 2026 The divergen Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "divergen/embedding_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "divergen/error.hpp"

namespace divergen {

namespace {

constexpr char kMagic[8] = {'D', 'G', 'E', 'M', 'B', '1', '\0', '\0'};
constexpr std::size_t kHeaderBytes = 16;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t at) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(in[at + i]) << (8 * i);
  return value;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::uint32_t dim) : dim_(dim) {
  if (dim == 0) throw ValidationError("embedding dim must be positive");
}

void EmbeddingMatrix::add_row(std::uint64_t record_id, std::span<const float> values) {
  if (values.size() != dim_) {
    throw ValidationError("embedding row " + std::to_string(record_id) + " has dim " +
                          std::to_string(values.size()) + ", expected " + std::to_string(dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw ValidationError("embedding row " + std::to_string(record_id) + " has a non-finite value");
    }
  }
  rows_.push_back({record_id, std::vector<float>(values.begin(), values.end())});
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingMatrix& m) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kHeaderBytes + m.rows() * (8 + 4 * static_cast<std::size_t>(m.dim())));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  put_le<std::uint32_t>(out, m.dim());
  for (const auto& row : m.data()) {
    put_le<std::uint64_t>(out, row.record_id);
    for (float v : row.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

EmbeddingMatrix decode_embeddings(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 6) != 0) {
    throw FormatError("embedding file: bad magic");
  }
  const auto count = get_le<std::uint32_t>(bytes, 8);
  const auto dim = get_le<std::uint32_t>(bytes, 12);
  if (dim == 0) throw FormatError("embedding file: zero dim");
  const std::size_t row_bytes = 8 + 4 * static_cast<std::size_t>(dim);
  const std::size_t expected = kHeaderBytes + row_bytes * count;
  if (bytes.size() < expected) throw FormatError("embedding file: truncated payload");
  if (bytes.size() > expected) throw FormatError("embedding file: trailing bytes");

  EmbeddingMatrix m(dim);
  std::vector<float> values(dim);
  std::size_t at = kHeaderBytes;
  for (std::uint32_t r = 0; r < count; ++r) {
    const auto id = get_le<std::uint64_t>(bytes, at);
    at += 8;
    for (std::uint32_t d = 0; d < dim; ++d, at += 4) {
      values[d] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, at));
      if (!std::isfinite(values[d])) {
        throw FormatError("embedding file: non-finite value in row " + std::to_string(id));
      }
    }
    m.add_row(id, values);
  }
  return m;
}

void write_embedding_file(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  const auto bytes = encode_embeddings(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

EmbeddingMatrix read_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_embeddings(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace divergen
