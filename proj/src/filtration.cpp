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
#include "divergen/filtration.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "divergen/error.hpp"

namespace divergen {

using nlohmann::json;

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw ValidationError("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine_similarity: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<float> normalized(std::span<const float> v) {
  double n = 0.0;
  for (float x : v) n += static_cast<double>(x) * x;
  if (n == 0.0) throw ValidationError("cannot normalize a zero vector");
  n = std::sqrt(n);
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / n);
  return out;
}

void ReferenceEmbeddingIndex::add(Id category_id, std::span<const float> embedding) {
  if (embedding.size() != dim_) throw ValidationError("reference embedding has the wrong dimension");
  by_category_[category_id].push_back(normalized(embedding));
}

std::span<const std::vector<float>> ReferenceEmbeddingIndex::references(Id category_id) const {
  auto it = by_category_.find(category_id);
  if (it == by_category_.end()) return {};
  return it->second;
}

std::string_view to_string(SimilarityMetric m) {
  return m == SimilarityMetric::inter_similarity ? "inter_similarity" : "clip_score";
}

SimilarityMetric parse_metric(std::string_view s) {
  if (s == "inter_similarity") return SimilarityMetric::inter_similarity;
  if (s == "clip_score") return SimilarityMetric::clip_score;
  throw ConfigError("unknown metric '" + std::string(s) + "'");
}

std::string_view to_string(FilterReason r) {
  switch (r) {
    case FilterReason::above_threshold: return "above_threshold";
    case FilterReason::below_threshold: return "below_threshold";
    case FilterReason::no_references: return "no_references";
  }
  return "?";
}

SimilarityRecord inter_similarity(Id image_id, Id category_id, std::span<const float> generated,
                                  std::span<const std::vector<float>> references) {
  SimilarityRecord rec{image_id, category_id, SimilarityMetric::inter_similarity, std::nullopt,
                       references.size()};
  if (references.empty()) return rec;
  double sum = 0.0;
  for (const auto& ref : references) sum += cosine_similarity(generated, ref);
  rec.value = sum / static_cast<double>(references.size());
  return rec;
}

std::vector<SimilarityRecord> inter_similarity_batch(const std::vector<GeneratedEmbedding>& generated,
                                                     const ReferenceEmbeddingIndex& index) {
  std::vector<SimilarityRecord> out(generated.size());
  const auto n = static_cast<std::ptrdiff_t>(generated.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& g = generated[i];
    out[i] = inter_similarity(g.image_id, g.category_id, g.embedding, index.references(g.category_id));
  }
  return out;
}

std::vector<FilterDecision> apply_threshold_filter(const std::vector<SimilarityRecord>& records,
                                                   double threshold) {
  if (!std::isfinite(threshold)) throw ConfigError("threshold must be finite");
  std::vector<FilterDecision> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    FilterDecision d{r.image_id, r.metric, r.value, true, FilterReason::above_threshold};
    if (!r.value) {
      d.reason = FilterReason::no_references;
      std::cerr << "warning: image " << r.image_id << " (category " << r.category_id
                << ") has no references; kept\n";
    } else if (*r.value < threshold) {
      d.kept = false;
      d.reason = FilterReason::below_threshold;
    }
    out.push_back(d);
  }
  return out;
}

void write_decisions_jsonl(const std::vector<FilterDecision>& decisions,
                           const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& d : decisions) {
    json o = {{"image_id", d.image_id},
              {"metric", to_string(d.metric)},
              {"value", d.value ? json(*d.value) : json(nullptr)},
              {"kept", d.kept},
              {"reason", to_string(d.reason)}};
    out << o.dump() << '\n';
  }
}

RgbImage prepare_reference_crop(const RgbImage& image, const InstanceAnnotation& annotation,
                                KernelSize kernel, int min_width) {
  const BitMask mask = rle_decode(annotation.mask);
  const RgbImage blurred = box_blur_outside_mask(image, mask, kernel);
  return pad_and_crop_region(blurred, annotation.bbox, min_width);
}

ClipScoreIngest ingest_clip_scores(const std::filesystem::path& path,
                                   const std::map<Id, Id>& image_categories) {
  const json doc = read_json_file(path);
  if (!doc.is_array()) throw FormatError(path.string() + ": expected an array of {image_id, score}");
  ClipScoreIngest out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& o = doc[i];
    if (!o.is_object() || !o.contains("image_id") || !o["image_id"].is_number_integer() ||
        !o.contains("score") || !o["score"].is_number()) {
      out.rejected.push_back("entry " + std::to_string(i) + ": expected {image_id: int, score: number}");
      continue;
    }
    const Id id = o["image_id"].get<Id>();
    const double score = o["score"].get<double>();
    if (!(score >= 0.0 && score <= 1.0)) {
      std::ostringstream msg;
      msg << "image_id " << id << ": score " << score << " outside [0, 1]";
      out.rejected.push_back(msg.str());
      continue;
    }
    SimilarityRecord rec{id, 0, SimilarityMetric::clip_score, score, 1};
    if (auto it = image_categories.find(id); it != image_categories.end()) rec.category_id = it->second;
    out.records.push_back(rec);
  }
  return out;
}

}  // namespace divergen
