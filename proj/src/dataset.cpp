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
#include "divergen/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "divergen/error.hpp"
#include "divergen/random.hpp"

namespace divergen {

using nlohmann::json;

namespace {

constexpr char kCategories[] = "categories";
constexpr char kImages[] = "images";
constexpr char kAnnotations[] = "annotations";
constexpr char kManifest[] = "manifest";

template <typename T>
T field(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(ctx + ": missing key '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(ctx + ": key '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& ctx) {
  if (!obj.contains(key)) return fallback;
  return field<T>(obj, key, ctx);
}

const json& array_at(const json& doc, const char* key, bool required) {
  static const json kEmpty = json::array();
  auto it = doc.find(key);
  if (it == doc.end()) {
    if (required) throw FormatError(std::string("missing top-level key '") + key + "'");
    return kEmpty;
  }
  if (!it->is_array()) throw FormatError(std::string("'") + key + "' must be an array");
  return *it;
}

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::pair<E, std::string_view> (&table)[N],
             const std::string& ctx) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw FormatError(ctx + ": unknown value '" + std::string(s) + "'");
}

constexpr std::pair<FrequencyGroup, std::string_view> kGroups[] = {
    {FrequencyGroup::frequent, "f"}, {FrequencyGroup::common, "c"}, {FrequencyGroup::rare, "r"}};
constexpr std::pair<CategoryOrigin, std::string_view> kOrigins[] = {
    {CategoryOrigin::lvis, "lvis"}, {CategoryOrigin::extra, "extra"}};
constexpr std::pair<ImageSource, std::string_view> kSources[] = {
    {ImageSource::real, "real"},
    {ImageSource::generative, "generative"},
    {ImageSource::composite, "composite"}};
constexpr std::pair<Provenance, std::string_view> kProvenances[] = {
    {Provenance::annotated, "annotated"}, {Provenance::pasted, "pasted"}};

template <typename E, std::size_t N>
std::string_view enum_name(E value, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

std::string ctx_for(const char* table, std::size_t index, const json& obj) {
  std::string ctx = std::string(table) + "[" + std::to_string(index) + "]";
  if (obj.is_object() && obj.contains("id") && obj["id"].is_number_integer()) {
    ctx += " (id " + std::to_string(obj["id"].get<Id>()) + ")";
  }
  return ctx;
}

}  // namespace

std::string_view to_string(FrequencyGroup g) { return enum_name(g, kGroups); }
std::string_view to_string(CategoryOrigin o) { return enum_name(o, kOrigins); }
std::string_view to_string(ImageSource s) { return enum_name(s, kSources); }
std::string_view to_string(Provenance p) { return enum_name(p, kProvenances); }

FrequencyGroup parse_frequency_group(std::string_view s) {
  if (s == "frequent") return FrequencyGroup::frequent;
  if (s == "common") return FrequencyGroup::common;
  if (s == "rare") return FrequencyGroup::rare;
  return parse_enum(s, kGroups, "frequency group");
}

InstanceAnnotation make_annotation(Id id, Id image_id, Id category_id, const BitMask& mask,
                                   Provenance provenance) {
  InstanceAnnotation a;
  a.id = id;
  a.image_id = image_id;
  a.category_id = category_id;
  a.mask = rle_encode(mask);
  a.bbox = bbox_from_mask(mask);
  a.area = static_cast<std::int64_t>(mask.count());
  a.provenance = provenance;
  return a;
}

DatasetBundle dataset_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("dataset document must be a JSON object");
  DatasetBundle b;

  const json& cats = array_at(doc, kCategories, true);
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const json& o = cats[i];
    const std::string ctx = ctx_for(kCategories, i, o);
    if (!o.is_object()) throw FormatError(ctx + ": expected object");
    CategoryRecord c;
    c.id = field<Id>(o, "id", ctx);
    c.name = field<std::string>(o, "name", ctx);
    if (o.contains("definition")) {
      c.definition = field<std::string>(o, "definition", ctx);
    } else if (o.contains("def")) {
      c.definition = field<std::string>(o, "def", ctx);
    }
    c.image_count = field<std::int64_t>(o, "image_count", ctx);
    if (o.contains("frequency")) {
      c.group = parse_enum(field<std::string>(o, "frequency", ctx), kGroups, ctx);
    } else {
      c.group = group_for_count(c.image_count, FrequencyThresholds{});
    }
    c.origin = parse_enum(field_or<std::string>(o, "origin", "lvis", ctx), kOrigins, ctx);
    b.categories.push_back(std::move(c));
  }

  const json& imgs = array_at(doc, kImages, true);
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const json& o = imgs[i];
    const std::string ctx = ctx_for(kImages, i, o);
    if (!o.is_object()) throw FormatError(ctx + ": expected object");
    ImageRecord im;
    im.id = field<Id>(o, "id", ctx);
    im.width = field<int>(o, "width", ctx);
    im.height = field<int>(o, "height", ctx);
    im.uri = o.contains("uri") ? field<std::string>(o, "uri", ctx)
                               : field<std::string>(o, "file_name", ctx);
    im.source = parse_enum(field_or<std::string>(o, "source", "real", ctx), kSources, ctx);
    b.images.push_back(std::move(im));
  }

  const json& anns = array_at(doc, kAnnotations, true);
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const json& o = anns[i];
    const std::string ctx = ctx_for(kAnnotations, i, o);
    if (!o.is_object()) throw FormatError(ctx + ": expected object");
    InstanceAnnotation a;
    a.id = field<Id>(o, "id", ctx);
    a.image_id = field<Id>(o, "image_id", ctx);
    a.category_id = field<Id>(o, "category_id", ctx);
    const json seg = field<json>(o, "segmentation", ctx);
    if (!seg.is_object()) throw FormatError(ctx + ": segmentation must be an RLE object");
    const auto size = field<std::vector<int>>(seg, "size", ctx + ".segmentation");
    if (size.size() != 2) throw FormatError(ctx + ": segmentation.size must be [H, W]");
    a.mask.height = size[0];
    a.mask.width = size[1];
    a.mask.counts = field<std::vector<std::uint32_t>>(seg, "counts", ctx + ".segmentation");
    const auto box = field<std::vector<int>>(o, "bbox", ctx);
    if (box.size() != 4) throw FormatError(ctx + ": bbox must be [x, y, w, h]");
    a.bbox = {box[0], box[1], box[2], box[3]};
    a.area = field<std::int64_t>(o, "area", ctx);
    a.provenance =
        parse_enum(field_or<std::string>(o, "provenance", "annotated", ctx), kProvenances, ctx);
    b.annotations.push_back(std::move(a));
  }

  const json& man = array_at(doc, kManifest, false);
  for (std::size_t i = 0; i < man.size(); ++i) {
    const json& o = man[i];
    const std::string ctx = std::string(kManifest) + "[" + std::to_string(i) + "]";
    if (!o.is_object()) throw FormatError(ctx + ": expected object");
    GenerationManifestEntry e;
    e.image_id = field<Id>(o, "image_id", ctx);
    e.category_id = field<Id>(o, "category_id", ctx);
    e.backend = field<std::string>(o, "backend", ctx);
    e.prompt = field<std::string>(o, "prompt", ctx);
    e.seed = field<std::uint64_t>(o, "seed", ctx);
    const auto res = field<std::vector<int>>(o, "resolution", ctx);
    if (res.size() != 2) throw FormatError(ctx + ": resolution must be [width, height]");
    e.width = res[0];
    e.height = res[1];
    e.created_at = field_or<std::string>(o, "created_at", "", ctx);
    b.manifest.push_back(std::move(e));
  }
  return b;
}

json dataset_to_json(const DatasetBundle& b) {
  json doc = json::object();
  json cats = json::array();
  for (const auto& c : b.categories) {
    json o = {{"id", c.id},
              {"name", c.name},
              {"image_count", c.image_count},
              {"frequency", to_string(c.group)},
              {"origin", to_string(c.origin)}};
    if (c.definition) o["definition"] = *c.definition;
    cats.push_back(std::move(o));
  }
  json imgs = json::array();
  for (const auto& im : b.images) {
    imgs.push_back({{"id", im.id},
                    {"width", im.width},
                    {"height", im.height},
                    {"uri", im.uri},
                    {"source", to_string(im.source)}});
  }
  json anns = json::array();
  for (const auto& a : b.annotations) {
    anns.push_back({{"id", a.id},
                    {"image_id", a.image_id},
                    {"category_id", a.category_id},
                    {"segmentation", {{"size", {a.mask.height, a.mask.width}}, {"counts", a.mask.counts}}},
                    {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
                    {"area", a.area},
                    {"provenance", to_string(a.provenance)}});
  }
  json man = json::array();
  for (const auto& e : b.manifest) {
    man.push_back({{"image_id", e.image_id},
                   {"category_id", e.category_id},
                   {"backend", e.backend},
                   {"prompt", e.prompt},
                   {"seed", e.seed},
                   {"resolution", {e.width, e.height}},
                   {"created_at", e.created_at}});
  }
  doc[kCategories] = std::move(cats);
  doc[kImages] = std::move(imgs);
  doc[kAnnotations] = std::move(anns);
  doc[kManifest] = std::move(man);
  return doc;
}

std::vector<std::string> validation_problems(const DatasetBundle& b) {
  std::vector<std::string> problems;
  auto report = [&](std::string msg) { problems.push_back(std::move(msg)); };

  std::unordered_set<Id> cat_ids;
  for (const auto& c : b.categories) {
    if (c.id <= 0) report("category id " + std::to_string(c.id) + " is not positive");
    if (!cat_ids.insert(c.id).second) report("duplicate category id " + std::to_string(c.id));
    if (c.image_count < 0) report("category " + std::to_string(c.id) + " has negative image_count");
  }
  std::unordered_map<Id, const ImageRecord*> images;
  for (const auto& im : b.images) {
    if (im.id <= 0) report("image id " + std::to_string(im.id) + " is not positive");
    if (!images.emplace(im.id, &im).second) report("duplicate image id " + std::to_string(im.id));
    if (im.width <= 0 || im.height <= 0) {
      report("image " + std::to_string(im.id) + " has non-positive dimensions");
    }
  }
  std::unordered_set<Id> ann_ids;
  for (const auto& a : b.annotations) {
    const std::string tag = "annotation " + std::to_string(a.id);
    if (a.id <= 0) report(tag + " id is not positive");
    if (!ann_ids.insert(a.id).second) report("duplicate annotation id " + std::to_string(a.id));
    auto img = images.find(a.image_id);
    if (img == images.end()) {
      report(tag + " references missing image_id " + std::to_string(a.image_id));
    } else if (a.mask.height != img->second->height || a.mask.width != img->second->width) {
      report(tag + " mask size differs from image " + std::to_string(a.image_id));
    }
    if (!cat_ids.contains(a.category_id)) {
      report(tag + " references missing category_id " + std::to_string(a.category_id));
    }
    BitMask mask;
    try {
      mask = rle_decode(a.mask);
    } catch (const Error& e) {
      report(tag + ": " + e.what());
      continue;
    }
    if (static_cast<std::int64_t>(mask.count()) != a.area) {
      report(tag + " area " + std::to_string(a.area) + " differs from mask popcount " +
             std::to_string(mask.count()));
    }
    if (mask.count() == 0) {
      report(tag + " has an empty mask");
    } else if (bbox_from_mask(mask) != a.bbox) {
      report(tag + " bbox is not the tight box of its mask");
    }
  }
  std::unordered_set<Id> manifest_images;
  for (const auto& e : b.manifest) {
    const std::string tag = "manifest entry for image " + std::to_string(e.image_id);
    if (!images.contains(e.image_id)) {
      report(tag + " references missing image_id " + std::to_string(e.image_id));
    }
    if (!manifest_images.insert(e.image_id).second) report("duplicate " + tag);
    if (!cat_ids.contains(e.category_id)) {
      report(tag + " references missing category_id " + std::to_string(e.category_id));
    }
  }
  return problems;
}

DatasetBundle load_dataset(const std::filesystem::path& path) {
  DatasetBundle b = dataset_from_json(read_json_file(path));
  auto problems = validation_problems(b);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << path.string() << ": " << problems.size() << " integrity problem(s)";
    for (const auto& p : problems) msg << "\n  " << p;
    throw ValidationError(msg.str());
  }
  return b;
}

void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& path) {
  write_json_file(path, dataset_to_json(bundle));
}

FrequencyGroup group_for_count(std::int64_t image_count, const FrequencyThresholds& t) {
  if (image_count <= t.rare_max) return FrequencyGroup::rare;
  if (image_count <= t.common_max) return FrequencyGroup::common;
  return FrequencyGroup::frequent;
}

DatasetBundle assign_frequency_groups(DatasetBundle bundle, const FrequencyThresholds& t) {
  if (t.rare_max >= t.common_max) throw ConfigError("rare_max must be below common_max");
  for (auto& c : bundle.categories) c.group = group_for_count(c.image_count, t);
  return bundle;
}

DatasetBundle build_minitrain_subset(const DatasetBundle& bundle, int per_category_cap,
                                     std::uint64_t seed) {
  if (per_category_cap < 1) throw ConfigError("per_category_cap must be >= 1");

  std::map<Id, std::set<Id>> images_by_category;
  for (const auto& a : bundle.annotations) images_by_category[a.category_id].insert(a.image_id);

  std::set<std::pair<Id, Id>> picked;  // (image, category)
  std::set<Id> kept_images;
  for (const auto& [cat, image_set] : images_by_category) {
    std::vector<Id> ids(image_set.begin(), image_set.end());
    const std::size_t take = std::min<std::size_t>(per_category_cap, ids.size());
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(cat)}));
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
      picked.emplace(ids[i], cat);
      kept_images.insert(ids[i]);
    }
  }

  DatasetBundle out;
  out.categories = bundle.categories;
  for (const auto& im : bundle.images) {
    if (kept_images.contains(im.id)) out.images.push_back(im);
  }
  for (const auto& a : bundle.annotations) {
    if (picked.contains({a.image_id, a.category_id})) out.annotations.push_back(a);
  }
  for (const auto& e : bundle.manifest) {
    if (kept_images.contains(e.image_id)) out.manifest.push_back(e);
  }
  return out;
}

std::filesystem::path resolve_uri(const std::filesystem::path& dataset_path, const std::string& uri) {
  std::filesystem::path p(uri);
  if (p.is_absolute()) return p;
  return dataset_path.parent_path() / p;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace divergen
