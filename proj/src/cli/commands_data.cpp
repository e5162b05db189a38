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
#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "common.hpp"
#include "divergen/cli.hpp"
#include "divergen/error.hpp"
#include "divergen/mask_ops.hpp"
#include "divergen/png_io.hpp"
#include "divergen/prompts.hpp"
#include "divergen/taxonomy.hpp"

namespace divergen::cli {

namespace {

json categories_json(const std::vector<CategoryRecord>& categories) {
  DatasetBundle b;
  b.categories = categories;
  return dataset_to_json(b).at("categories");
}

// ---- prompts ---------------------------------------------------------------

struct PromptsOptions {
  CommonOptions common;
  std::string dataset;
  std::string llm_responses;
  std::string out;
  std::optional<int> budget;
  std::optional<int> llm_count;
};

int run_prompts(const PromptsOptions& o) {
  const Session s = open_session(o.common);
  const fs::path dataset_path = o.dataset.empty() ? s.config.paths.dataset : fs::path(o.dataset);
  if (dataset_path.empty()) throw ConfigError("prompts: --dataset is required");
  const int budget = o.budget.value_or(s.config.prompts.category_budget);
  const int llm_count = o.llm_count.value_or(s.config.prompts.llm_prompt_count);
  if (budget < 0 || llm_count < 1) throw ConfigError("prompts: budget must be >= 0 and llm count >= 1");

  DatasetBundle bundle = load_dataset(dataset_file(dataset_path));
  std::sort(bundle.categories.begin(), bundle.categories.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  const PromptTemplate tmpl(PromptTemplate().pattern(), s.config.prompts.background_clause);
  const fs::path out(o.out);
  fs::create_directories(out / "instructions");

  json pools = json::array();
  json failures = json::array();
  json shortfalls = json::array();
  std::size_t total_prompts = 0;
  std::size_t llm_categories = 0;
  for (const auto& cat : bundle.categories) {
    std::ofstream(out / "instructions" / (std::to_string(cat.id) + ".txt"))
        << build_llm_instruction(cat, llm_count).text() << '\n';
    std::vector<std::string> llm;
    if (!o.llm_responses.empty()) {
      const fs::path response = fs::path(o.llm_responses) / (std::to_string(cat.id) + ".txt");
      if (fs::exists(response)) {
        std::ifstream in(response);
        std::stringstream text;
        text << in.rdbuf();
        try {
          llm = parse_llm_prompts(text.str(), llm_count, tmpl.background_clause());
          ++llm_categories;
        } catch (const FormatError& e) {
          failures.push_back(failure_entry("category_id", cat.id, e.what()));
        }
        if (!llm.empty() && static_cast<int>(llm.size()) < llm_count) {
          log("prompts", "category " + std::to_string(cat.id) + ": parsed " + std::to_string(llm.size()) + " of " +
                             std::to_string(llm_count) + " requested prompts; budget reallocated over the actual count");
          shortfalls.push_back({{"category_id", cat.id}, {"parsed", llm.size()}, {"requested", llm_count}});
        }
      }
    }
    const PromptPool pool = build_prompt_pool(cat, tmpl, llm, budget);
    total_prompts += pool.prompts.size();
    pools.push_back(prompt_pool_to_json(pool));
  }
  write_json_file(out / "prompt_pools.json", {{"categories", categories_json(bundle.categories)}, {"pools", pools}});

  const json summary = {{"command", "prompts"},
                        {"categories", bundle.categories.size()},
                        {"llm_categories", llm_categories},
                        {"prompts", total_prompts},
                        {"category_budget", budget},
                        {"shortfalls", shortfalls},
                        {"failures", failures}};
  write_summary(o.common, out / "summary.json", summary);
  log("prompts", std::to_string(bundle.categories.size()) + " prompt pools written");
  return failures.empty() ? kExitOk : kExitItemFailure;
}

// ---- categories ------------------------------------------------------------

struct CategoriesOptions {
  CommonOptions common;
  std::string taxonomy;
  std::string candidates;
  std::string references;
  std::string dataset;
  std::string out;
  std::optional<double> threshold;
};

int run_categories(const CategoriesOptions& o) {
  const Session s = open_session(o.common);
  const fs::path taxonomy = o.taxonomy.empty() ? s.config.paths.taxonomy : fs::path(o.taxonomy);
  const fs::path references = o.references.empty() ? s.config.paths.sense_map : fs::path(o.references);
  if (taxonomy.empty() || references.empty() || o.candidates.empty()) {
    throw ConfigError("categories: --taxonomy, --candidates and --references are required");
  }
  const double threshold = o.threshold.value_or(s.config.prompts.category_threshold);
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("categories: --threshold must be in (0, 1]");

  const TaxonomyGraph graph = TaxonomyGraph::from_edge_list(taxonomy);
  const auto candidates = load_sense_map(o.candidates);
  const auto refs = load_sense_map(references);
  const auto matches = select_extra_categories(candidates, refs, graph, threshold);

  const fs::path out(o.out);
  fs::create_directories(out);
  json rows = json::array();
  for (const auto& m : matches) {
    rows.push_back({{"name", m.source_category}, {"best_match", m.best_target}, {"similarity", m.similarity}});
  }
  write_json_file(out / "extra_categories.json", rows);

  json summary = {{"command", "categories"},
                  {"candidates", candidates.size()},
                  {"references", refs.size()},
                  {"threshold", threshold},
                  {"selected", matches.size()}};

  if (!o.dataset.empty()) {
    // Extra categories join the label space after the base ids.
    DatasetBundle base = load_dataset(dataset_file(o.dataset));
    Id next = 1;
    for (const auto& c : base.categories) next = std::max(next, c.id + 1);
    std::vector<CategoryRecord> extra;
    for (const auto& m : matches) {
      extra.push_back({next++, m.source_category, std::nullopt, 0, FrequencyGroup::rare, CategoryOrigin::extra});
    }
    const LabelSpacePartition part = build_label_partition(base.categories, extra);
    std::vector<CategoryRecord> merged = base.categories;
    merged.insert(merged.end(), extra.begin(), extra.end());
    write_json_file(out / "categories.json", categories_json(merged));
    summary["label_space"] = {{"base", part.base_ids.size()}, {"extra", part.extra_ids.size()}, {"total", part.total}};
  }
  write_summary(o.common, out / "summary.json", summary);
  log("categories", std::to_string(matches.size()) + " extra categories selected");
  return kExitOk;
}

// ---- validate --------------------------------------------------------------

struct ValidateOptions {
  CommonOptions common;
  std::string dataset;
  bool check_images = true;
};

int run_validate(const ValidateOptions& o) {
  open_session(o.common);
  const fs::path path = dataset_file(o.dataset);
  std::vector<std::string> problems;
  DatasetBundle bundle;
  try {
    bundle = dataset_from_json(read_json_file(path));
    problems = validation_problems(bundle);
  } catch (const FormatError& e) {
    problems.push_back(e.what());
  }
  if (o.check_images) {
    for (const auto& im : bundle.images) {
      const fs::path file = resolve_uri(path, im.uri);
      if (!fs::exists(file)) {
        problems.push_back("image " + std::to_string(im.id) + ": file not found: " + im.uri);
        continue;
      }
      if (file.extension() == ".png") {
        try {
          const RgbImage img = read_png(file);
          if (img.width() != im.width || img.height() != im.height) {
            problems.push_back("image " + std::to_string(im.id) + ": file size differs from the record");
          }
        } catch (const Error& e) {
          problems.push_back("image " + std::to_string(im.id) + ": " + e.what());
        }
      }
    }
  }
  const json summary = {{"command", "validate"},
                        {"valid", problems.empty()},
                        {"categories", bundle.categories.size()},
                        {"images", bundle.images.size()},
                        {"annotations", bundle.annotations.size()},
                        {"manifest", bundle.manifest.size()},
                        {"problems", problems}};
  write_summary(o.common, {}, summary);
  for (const auto& p : problems) log("validate", p);
  return problems.empty() ? kExitOk : kExitItemFailure;
}

// ---- config ----------------------------------------------------------------

struct ConfigOptions {
  CommonOptions common;
  bool print_defaults = false;
};

int run_config(const ConfigOptions& o) {
  if (o.print_defaults) {
    std::cout << run_config_to_json(RunConfig{}).dump(2) << '\n';
    return kExitOk;
  }
  const Session s = open_session(o.common);
  write_summary(o.common, {}, {{"command", "config"}, {"valid", true}, {"config", run_config_to_json(s.config)}});
  return kExitOk;
}

}  // namespace

void register_data_commands(CLI::App& app, Runner& selected) {
  {
    auto o = std::make_shared<PromptsOptions>();
    auto* sub = app.add_subcommand("prompts", "Build per-category prompt pools");
    add_common_options(*sub, o->common);
    sub->add_option("--dataset", o->dataset, "Dataset JSON (or directory) holding the categories");
    sub->add_option("--llm-responses", o->llm_responses, "Directory of <category_id>.txt LLM responses");
    sub->add_option("--budget", o->budget, "Images per category");
    sub->add_option("--llm-count", o->llm_count, "Prompts requested from the LLM per category");
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->callback([&selected, o] { selected = [o] { return run_prompts(*o); }; });
  }
  {
    auto o = std::make_shared<CategoriesOptions>();
    auto* sub = app.add_subcommand("categories", "Select extra categories by taxonomy path similarity");
    add_common_options(*sub, o->common);
    sub->add_option("--taxonomy", o->taxonomy, "Edge list, one child<TAB>parent per line");
    sub->add_option("--candidates", o->candidates, "Candidate category -> synset(s) JSON");
    sub->add_option("--references", o->references, "Existing category -> synset(s) JSON");
    sub->add_option("--dataset", o->dataset, "Base dataset; extra categories are appended to its label space");
    sub->add_option("--threshold", o->threshold, "Select when the best similarity is below this");
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->callback([&selected, o] { selected = [o] { return run_categories(*o); }; });
  }
  {
    auto o = std::make_shared<ValidateOptions>();
    auto* sub = app.add_subcommand("validate", "Check a dataset's schema, references and masks");
    add_common_options(*sub, o->common);
    sub->add_option("dataset,--dataset", o->dataset, "Dataset JSON or directory")->required();
    sub->add_flag("!--no-image-check", o->check_images, "Skip checking image files");
    sub->callback([&selected, o] { selected = [o] { return run_validate(*o); }; });
  }
  {
    auto o = std::make_shared<ConfigOptions>();
    auto* sub = app.add_subcommand("config", "Print defaults or check a run configuration");
    add_common_options(*sub, o->common);
    sub->add_flag("--print-defaults", o->print_defaults, "Print the default configuration");
    sub->callback([&selected, o] { selected = [o] { return run_config(*o); }; });
  }
}

}  // namespace divergen::cli
