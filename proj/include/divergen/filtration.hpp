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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "divergen/dataset.hpp"
#include "divergen/mask_ops.hpp"

namespace divergen {

/// a.b / (|a| |b|), accumulated in double. Throws ValidationError on a
/// dimension mismatch or a zero vector.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Returns a unit-L2 copy. Throws ValidationError on a zero vector.
std::vector<float> normalized(std::span<const float> v);

/// Same-category reference embeddings, stored unit-normalized.
class ReferenceEmbeddingIndex {
 public:
  explicit ReferenceEmbeddingIndex(std::size_t dim) : dim_(dim) {}

  /// Normalizes before storing.
  void add(Id category_id, std::span<const float> embedding);

  std::size_t dim() const { return dim_; }
  std::span<const std::vector<float>> references(Id category_id) const;
  std::size_t category_count() const { return by_category_.size(); }

 private:
  std::size_t dim_;
  std::map<Id, std::vector<std::vector<float>>> by_category_;
};

enum class SimilarityMetric { inter_similarity, clip_score };

std::string_view to_string(SimilarityMetric m);
SimilarityMetric parse_metric(std::string_view s);

struct SimilarityRecord {
  Id image_id = 0;
  Id category_id = 0;
  SimilarityMetric metric = SimilarityMetric::inter_similarity;
  std::optional<double> value;  // empty when there were no references
  std::size_t reference_count = 0;
};

/// Mean cosine similarity of `generated` against every reference.
SimilarityRecord inter_similarity(Id image_id, Id category_id, std::span<const float> generated,
                                  std::span<const std::vector<float>> references);

struct GeneratedEmbedding {
  Id image_id = 0;
  Id category_id = 0;
  std::vector<float> embedding;
};

/// inter_similarity for every generated image, OpenMP-parallel.
std::vector<SimilarityRecord> inter_similarity_batch(const std::vector<GeneratedEmbedding>& generated,
                                                     const ReferenceEmbeddingIndex& index);

enum class FilterReason { above_threshold, below_threshold, no_references };

std::string_view to_string(FilterReason r);

struct FilterDecision {
  Id image_id = 0;
  SimilarityMetric metric = SimilarityMetric::inter_similarity;
  std::optional<double> value;
  bool kept = true;
  FilterReason reason = FilterReason::above_threshold;
};

/// Keeps value >= threshold. Records without a value are kept with reason
/// no_references and a warning on stderr.
std::vector<FilterDecision> apply_threshold_filter(const std::vector<SimilarityRecord>& records,
                                                   double threshold);

/// One JSON object per line: {image_id, metric, value, kept, reason}.
void write_decisions_jsonl(const std::vector<FilterDecision>& decisions,
                           const std::filesystem::path& path);

/// Blur outside the instance mask, then pad the instance box to
/// `min_width` and crop.
RgbImage prepare_reference_crop(const RgbImage& image, const InstanceAnnotation& annotation,
                                KernelSize kernel = {10, 10}, int min_width = 80);

struct ClipScoreIngest {
  std::vector<SimilarityRecord> records;
  std::vector<std::string> rejected;  // one message per bad entry, naming its image id
};

/// JSON array of {image_id, score}. Entries with a score outside [0, 1] or
/// the wrong shape are rejected individually; a file that is not a JSON
/// array throws FormatError. Category ids are filled from
/// `image_categories` when given.
ClipScoreIngest ingest_clip_scores(const std::filesystem::path& path,
                                   const std::map<Id, Id>& image_categories = {});

}  // namespace divergen
