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
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace divergen {

struct EmbeddingRow {
  std::uint64_t record_id = 0;
  std::vector<float> values;

  friend bool operator==(const EmbeddingRow&, const EmbeddingRow&) = default;
};

/// Dense rows sharing one dimension, all components finite.
class EmbeddingMatrix {
 public:
  explicit EmbeddingMatrix(std::uint32_t dim);

  std::uint32_t dim() const { return dim_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<EmbeddingRow>& data() const { return rows_; }
  const EmbeddingRow& row(std::size_t i) const { return rows_[i]; }

  /// Throws ValidationError on a dimension mismatch or a non-finite value.
  void add_row(std::uint64_t record_id, std::span<const float> values);

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::uint32_t dim_;
  std::vector<EmbeddingRow> rows_;
};

/// Layout: "DGEMB1" + 2 zero bytes, u32 LE row count, u32 LE dim, then per
/// row a u64 LE record id followed by dim float32 LE values.
void write_embedding_file(const EmbeddingMatrix& m, const std::filesystem::path& path);

/// Throws FormatError on bad magic, truncation, trailing bytes or
/// non-finite values.
EmbeddingMatrix read_embedding_file(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_embeddings(const EmbeddingMatrix& m);
EmbeddingMatrix decode_embeddings(std::span<const std::uint8_t> bytes);

}  // namespace divergen
