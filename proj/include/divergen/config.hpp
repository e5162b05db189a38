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
#include <string>
#include <vector>

#include <json.hpp>

#include "divergen/annotation.hpp"
#include "divergen/backend.hpp"
#include "divergen/compositor.hpp"
#include "divergen/filtration.hpp"

namespace divergen {

struct PathSettings {
  std::filesystem::path dataset;       // real (LVIS-style) dataset JSON
  std::filesystem::path exchange_dir;  // overridden by DIVERGEN_EXCHANGE_DIR
  std::filesystem::path taxonomy;      // child<TAB>parent edge list
  std::filesystem::path sense_map;     // category name -> synset(s)
};

struct PromptSettings {
  double category_threshold = 0.4;
  int category_budget = 256;
  int llm_prompt_count = 32;
  std::string background_clause = "in a white background";
};

struct GenerationSettings {
  std::vector<std::string> generators{"synthetic"};
  std::string mask_predictor = "synthetic-sam";
  std::string embedder = "synthetic-embed";
  Resolution resolution;
  int timeout_ms = 600000;
};

struct AnnotationSettings {
  std::string strategy = "sam-bg";  // or "sam-fg"
  ForegroundPromptConfig foreground;
};

struct FiltrationSettings {
  SimilarityMetric metric = SimilarityMetric::inter_similarity;
  double threshold = 0.6;
  KernelSize blur_kernel;
  int min_crop_width = 80;
};

struct CompositorSettings {
  int max_paste = 20;
  ScaleRange scale;
};

struct AnalysisSettings {
  double tau = 0.9;
  double sigma_k = 3.0;
  int minitrain_cap = 5;
};

struct RunConfig {
  PathSettings paths;
  std::vector<BackendDescriptor> backends;  // external adapters; built-ins need no entry
  PromptSettings prompts;
  GenerationSettings generation;
  AnnotationSettings annotation;
  FiltrationSettings filtration;
  CompositorSettings compositor;
  AnalysisSettings analysis;
  std::uint64_t seed = 0;
  int workers = 1;
};

nlohmann::json run_config_to_json(const RunConfig& config);

/// Missing keys keep their defaults; unknown keys and bad values raise
/// ConfigError.
RunConfig run_config_from_json(const nlohmann::json& doc);

RunConfig load_run_config(const std::filesystem::path& path);

/// Range checks per module contract. Paths are checked for existence only
/// when set. Throws ConfigError listing every problem.
void validate_run_config(const RunConfig& config);

}  // namespace divergen
