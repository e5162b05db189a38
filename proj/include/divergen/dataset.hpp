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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "divergen/mask_ops.hpp"

namespace divergen {

using Id = std::int64_t;

enum class FrequencyGroup { frequent, common, rare };
enum class CategoryOrigin { lvis, extra };
enum class ImageSource { real, generative, composite };
enum class Provenance { annotated, pasted };

std::string_view to_string(FrequencyGroup g);
std::string_view to_string(CategoryOrigin o);
std::string_view to_string(ImageSource s);
std::string_view to_string(Provenance p);
FrequencyGroup parse_frequency_group(std::string_view s);

struct CategoryRecord {
  Id id = 0;
  std::string name;
  std::optional<std::string> definition;
  std::int64_t image_count = 0;
  FrequencyGroup group = FrequencyGroup::rare;
  CategoryOrigin origin = CategoryOrigin::lvis;

  friend bool operator==(const CategoryRecord&, const CategoryRecord&) = default;
};

struct ImageRecord {
  Id id = 0;
  int width = 0;
  int height = 0;
  std::string uri;
  ImageSource source = ImageSource::real;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct InstanceAnnotation {
  Id id = 0;
  Id image_id = 0;
  Id category_id = 0;
  RleMask mask;
  BoundingBox bbox;
  std::int64_t area = 0;
  Provenance provenance = Provenance::annotated;

  friend bool operator==(const InstanceAnnotation&, const InstanceAnnotation&) = default;
};

/// Reproducibility record for one generated image.
struct GenerationManifestEntry {
  Id image_id = 0;
  Id category_id = 0;
  std::string backend;
  std::string prompt;
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  std::string created_at;

  friend bool operator==(const GenerationManifestEntry&, const GenerationManifestEntry&) = default;
};

struct DatasetBundle {
  std::vector<CategoryRecord> categories;
  std::vector<ImageRecord> images;
  std::vector<InstanceAnnotation> annotations;
  std::vector<GenerationManifestEntry> manifest;

  friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

/// LVIS convention: rare <= 10 images, common 11..100, frequent above.
struct FrequencyThresholds {
  std::int64_t rare_max = 10;
  std::int64_t common_max = 100;
};

/// Builds an annotation whose bbox and area are derived from the mask.
InstanceAnnotation make_annotation(Id id, Id image_id, Id category_id, const BitMask& mask,
                                   Provenance provenance);

DatasetBundle dataset_from_json(const nlohmann::json& doc);
nlohmann::json dataset_to_json(const DatasetBundle& bundle);

/// Every invariant violation found in the bundle, each naming the offending
/// id. Empty means valid.
std::vector<std::string> validation_problems(const DatasetBundle& bundle);

/// Parses and validates. Throws FormatError for malformed JSON or schema
/// mismatches and ValidationError listing every integrity problem.
DatasetBundle load_dataset(const std::filesystem::path& path);

/// Writes with lexicographically ordered keys; equal bundles give equal bytes.
void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& path);

FrequencyGroup group_for_count(std::int64_t image_count, const FrequencyThresholds& t);
DatasetBundle assign_frequency_groups(DatasetBundle bundle, const FrequencyThresholds& t);

/// Per category, picks min(cap, available) of the images annotated with it
/// (seeded shuffle over ascending image ids, one stream per category). The
/// result holds the union of picked images; an image keeps a category's
/// annotations only if it was picked for that category, so per-category
/// coverage is exact (federated-label semantics).
DatasetBundle build_minitrain_subset(const DatasetBundle& bundle, int per_category_cap,
                                     std::uint64_t seed);

/// Resolves an image uri against the directory holding the dataset file.
std::filesystem::path resolve_uri(const std::filesystem::path& dataset_path, const std::string& uri);

/// Writes JSON with sorted keys, two-space indent and a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace divergen
