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
#include "divergen/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "divergen/error.hpp"

namespace divergen {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key " + where + "." + key);
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->template get<T>();
}

}  // namespace

json run_config_to_json(const RunConfig& c) {
  json backends = json::array();
  for (const auto& b : c.backends) backends.push_back(descriptor_to_json(b));
  return {
      {"seed", c.seed},
      {"workers", c.workers},
      {"paths",
       {{"dataset", c.paths.dataset.string()},
        {"exchange_dir", c.paths.exchange_dir.string()},
        {"taxonomy", c.paths.taxonomy.string()},
        {"sense_map", c.paths.sense_map.string()}}},
      {"backends", backends},
      {"prompts",
       {{"category_threshold", c.prompts.category_threshold},
        {"category_budget", c.prompts.category_budget},
        {"llm_prompt_count", c.prompts.llm_prompt_count},
        {"background_clause", c.prompts.background_clause}}},
      {"generation",
       {{"generators", c.generation.generators},
        {"mask_predictor", c.generation.mask_predictor},
        {"embedder", c.generation.embedder},
        {"resolution", {c.generation.resolution.width, c.generation.resolution.height}},
        {"timeout_ms", c.generation.timeout_ms}}},
      {"annotation",
       {{"strategy", c.annotation.strategy},
        {"attention_threshold", c.annotation.foreground.threshold_fraction},
        {"clusters", c.annotation.foreground.clusters},
        {"points", c.annotation.foreground.points}}},
      {"filtration",
       {{"metric", std::string(to_string(c.filtration.metric))},
        {"threshold", c.filtration.threshold},
        {"blur_kernel", {c.filtration.blur_kernel.height, c.filtration.blur_kernel.width}},
        {"min_crop_width", c.filtration.min_crop_width}}},
      {"compositor",
       {{"max_paste", c.compositor.max_paste}, {"scale", {c.compositor.scale.lo, c.compositor.scale.hi}}}},
      {"analysis",
       {{"tau", c.analysis.tau}, {"sigma_k", c.analysis.sigma_k}, {"minitrain_cap", c.analysis.minitrain_cap}}},
  };
}

RunConfig run_config_from_json(const json& doc) {
  RunConfig c;
  try {
    reject_unknown(doc,
                   {"seed", "workers", "paths", "backends", "prompts", "generation", "annotation", "filtration",
                    "compositor", "analysis"},
                   "config");
    read_into(doc, "seed", c.seed);
    read_into(doc, "workers", c.workers);
    if (auto p = doc.find("paths"); p != doc.end()) {
      reject_unknown(*p, {"dataset", "exchange_dir", "taxonomy", "sense_map"}, "paths");
      if (p->contains("dataset")) c.paths.dataset = p->at("dataset").get<std::string>();
      if (p->contains("exchange_dir")) c.paths.exchange_dir = p->at("exchange_dir").get<std::string>();
      if (p->contains("taxonomy")) c.paths.taxonomy = p->at("taxonomy").get<std::string>();
      if (p->contains("sense_map")) c.paths.sense_map = p->at("sense_map").get<std::string>();
    }
    if (auto b = doc.find("backends"); b != doc.end()) {
      for (const auto& d : *b) c.backends.push_back(descriptor_from_json(d));
    }
    if (auto p = doc.find("prompts"); p != doc.end()) {
      reject_unknown(*p, {"category_threshold", "category_budget", "llm_prompt_count", "background_clause"},
                     "prompts");
      read_into(*p, "category_threshold", c.prompts.category_threshold);
      read_into(*p, "category_budget", c.prompts.category_budget);
      read_into(*p, "llm_prompt_count", c.prompts.llm_prompt_count);
      read_into(*p, "background_clause", c.prompts.background_clause);
    }
    if (auto g = doc.find("generation"); g != doc.end()) {
      reject_unknown(*g, {"generators", "mask_predictor", "embedder", "resolution", "timeout_ms"}, "generation");
      read_into(*g, "generators", c.generation.generators);
      read_into(*g, "mask_predictor", c.generation.mask_predictor);
      read_into(*g, "embedder", c.generation.embedder);
      read_into(*g, "timeout_ms", c.generation.timeout_ms);
      if (auto r = g->find("resolution"); r != g->end()) {
        c.generation.resolution = {r->at(0).get<int>(), r->at(1).get<int>()};
      }
    }
    if (auto a = doc.find("annotation"); a != doc.end()) {
      reject_unknown(*a, {"strategy", "attention_threshold", "clusters", "points"}, "annotation");
      read_into(*a, "strategy", c.annotation.strategy);
      read_into(*a, "attention_threshold", c.annotation.foreground.threshold_fraction);
      read_into(*a, "clusters", c.annotation.foreground.clusters);
      read_into(*a, "points", c.annotation.foreground.points);
    }
    if (auto f = doc.find("filtration"); f != doc.end()) {
      reject_unknown(*f, {"metric", "threshold", "blur_kernel", "min_crop_width"}, "filtration");
      if (f->contains("metric")) c.filtration.metric = parse_metric(f->at("metric").get<std::string>());
      read_into(*f, "threshold", c.filtration.threshold);
      read_into(*f, "min_crop_width", c.filtration.min_crop_width);
      if (auto k = f->find("blur_kernel"); k != f->end()) {
        c.filtration.blur_kernel = {k->at(0).get<int>(), k->at(1).get<int>()};
      }
    }
    if (auto p = doc.find("compositor"); p != doc.end()) {
      reject_unknown(*p, {"max_paste", "scale"}, "compositor");
      read_into(*p, "max_paste", c.compositor.max_paste);
      if (auto s = p->find("scale"); s != p->end()) {
        c.compositor.scale = {s->at(0).get<double>(), s->at(1).get<double>()};
      }
    }
    if (auto a = doc.find("analysis"); a != doc.end()) {
      reject_unknown(*a, {"tau", "sigma_k", "minitrain_cap"}, "analysis");
      read_into(*a, "tau", c.analysis.tau);
      read_into(*a, "sigma_k", c.analysis.sigma_k);
      read_into(*a, "minitrain_cap", c.analysis.minitrain_cap);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(doc);
}

void validate_run_config(const RunConfig& c) {
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  check(c.workers >= 1, "workers must be >= 1");
  check(c.prompts.category_threshold > 0.0 && c.prompts.category_threshold <= 1.0,
        "prompts.category_threshold must be in (0, 1]");
  check(c.prompts.category_budget >= 0, "prompts.category_budget must be >= 0");
  check(c.prompts.llm_prompt_count >= 1, "prompts.llm_prompt_count must be >= 1");
  check(!c.generation.generators.empty(), "generation.generators must not be empty");
  check(c.generation.resolution.width > 0 && c.generation.resolution.height > 0,
        "generation.resolution must be positive");
  check(c.generation.timeout_ms > 0, "generation.timeout_ms must be positive");
  check(c.annotation.strategy == "sam-bg" || c.annotation.strategy == "sam-fg",
        "annotation.strategy must be sam-bg or sam-fg");
  check(c.annotation.foreground.threshold_fraction > 0.0 && c.annotation.foreground.threshold_fraction < 1.0,
        "annotation.attention_threshold must be in (0, 1)");
  check(c.annotation.foreground.clusters >= 1, "annotation.clusters must be >= 1");
  check(c.annotation.foreground.points >= 1, "annotation.points must be >= 1");
  check((c.filtration.threshold >= -1.0 && c.filtration.threshold <= 1.0) ||
            c.filtration.metric == SimilarityMetric::clip_score,
        "filtration.threshold must be in [-1, 1] for inter_similarity");
  check(c.filtration.blur_kernel.height >= 1 && c.filtration.blur_kernel.width >= 1,
        "filtration.blur_kernel must be positive");
  check(c.filtration.min_crop_width >= 1, "filtration.min_crop_width must be >= 1");
  check(c.compositor.max_paste >= 0, "compositor.max_paste must be >= 0");
  check(c.compositor.scale.lo > 0.0 && c.compositor.scale.lo <= c.compositor.scale.hi,
        "compositor.scale must satisfy 0 < lo <= hi");
  check(c.analysis.tau > 0.0, "analysis.tau must be positive");
  check(c.analysis.sigma_k > 0.0, "analysis.sigma_k must be positive");
  check(c.analysis.minitrain_cap >= 1, "analysis.minitrain_cap must be >= 1");
  for (const auto& [name, p] : {std::pair{"paths.dataset", c.paths.dataset}, std::pair{"paths.taxonomy", c.paths.taxonomy},
                                std::pair{"paths.sense_map", c.paths.sense_map}}) {
    check(p.empty() || std::filesystem::exists(p), std::string(name) + " does not exist: " + p.string());
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid config:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw ConfigError(msg.str());
  }
}

}  // namespace divergen
