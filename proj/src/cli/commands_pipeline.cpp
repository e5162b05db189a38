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
#include <array>
#include <map>
#include <memory>
#include <set>

#include "common.hpp"
#include "divergen/analysis.hpp"
#include "divergen/annotation.hpp"
#include "divergen/cli.hpp"
#include "divergen/compositor.hpp"
#include "divergen/embedding_io.hpp"
#include "divergen/error.hpp"
#include "divergen/filtration.hpp"
#include "divergen/orchestrator.hpp"
#include "divergen/png_io.hpp"
#include "divergen/random.hpp"

namespace divergen::cli {

namespace {

std::string image_uri(Id id) { return "images/" + std::to_string(id) + ".png"; }

void copy_into(const fs::path& from, const fs::path& out_dir, Id id) {
  fs::create_directories(out_dir / "images");
  fs::copy_file(from, out_dir / image_uri(id), fs::copy_options::overwrite_existing);
}

const Backend& require_backend(const BackendRegistry& registry, const std::string& id, BackendKind kind) {
  const Backend* b = registry.find(id);
  if (!b) throw ConfigError("unknown backend '" + id + "'");
  if (b->descriptor().kind != kind) {
    throw ConfigError("backend '" + id + "' is a " + std::string(to_string(b->descriptor().kind)) + ", expected " +
                      std::string(to_string(kind)));
  }
  return *b;
}

// Identical payloads share one job id; each runs once.
struct JobBatch {
  std::vector<BackendJob> unique;
  std::map<std::uint64_t, std::size_t> index;

  std::uint64_t add(const std::string& backend_id, JobPayload payload) {
    const std::uint64_t id = content_job_id(backend_id, payload);
    if (!index.contains(id)) {
      index.emplace(id, unique.size());
      unique.push_back({id, backend_id, std::move(payload)});
    }
    return id;
  }

  std::map<std::uint64_t, BackendResult> run(const BackendRegistry& registry, const RunOptions& options) const {
    auto results = run_jobs(unique, registry, options);
    std::map<std::uint64_t, BackendResult> out;
    for (std::size_t i = 0; i < unique.size(); ++i) out.emplace(unique[i].job_id, std::move(results[i]));
    return out;
  }
};

std::string describe_failure(const BackendResult& r) {
  return std::string(to_string(r.status)) + (r.message.empty() ? "" : ": " + r.message);
}

std::map<Id, Id> image_categories(const DatasetBundle& b) {
  std::map<Id, Id> out;
  for (const auto& a : b.annotations) out.emplace(a.image_id, a.category_id);
  for (const auto& m : b.manifest) out[m.image_id] = m.category_id;
  return out;
}

// Keeps the listed images with their annotations and manifest entries,
// copies their files into `out_dir` and rewrites their uris.
DatasetBundle subset_and_copy(const DatasetBundle& in, const fs::path& in_path, const std::set<Id>& keep,
                              std::vector<InstanceAnnotation> annotations, const fs::path& out_dir) {
  DatasetBundle out;
  out.categories = in.categories;
  for (const auto& im : in.images) {
    if (!keep.contains(im.id)) continue;
    copy_into(resolve_uri(in_path, im.uri), out_dir, im.id);
    ImageRecord rec = im;
    rec.uri = image_uri(im.id);
    out.images.push_back(rec);
  }
  for (auto& a : annotations) {
    if (keep.contains(a.image_id)) out.annotations.push_back(std::move(a));
  }
  for (const auto& m : in.manifest) {
    if (keep.contains(m.image_id)) out.manifest.push_back(m);
  }
  return out;
}

// ---- generate --------------------------------------------------------------

struct GenerateOptions {
  CommonOptions common;
  std::string prompts;
  std::vector<std::string> backends;
  std::string exchange;
  std::string out;
};

int run_generate(const GenerateOptions& o) {
  const Session s = open_session(o.common);
  const fs::path out(o.out);
  const fs::path pools_path = fs::is_directory(o.prompts) ? fs::path(o.prompts) / "prompt_pools.json" : fs::path(o.prompts);
  const json doc = read_json_file(pools_path);
  std::vector<CategoryRecord> categories;
  std::vector<PromptPool> pools;
  try {
    categories = dataset_from_json({{"categories", doc.at("categories")},
                                    {"images", json::array()},
                                    {"annotations", json::array()}})
                     .categories;
    for (const auto& p : doc.at("pools")) pools.push_back(prompt_pool_from_json(p));
  } catch (const json::exception& e) {
    throw FormatError(pools_path.string() + ": " + e.what());
  }

  const BackendRegistry registry = make_registry(s.config);
  const auto ids = o.backends.empty() ? s.config.generation.generators : o.backends;
  std::vector<BackendDescriptor> generators;
  for (const auto& id : ids) {
    generators.push_back(require_backend(registry, id, BackendKind::image_generator).descriptor());
  }
  const GenerationPlan plan = plan_generation_jobs(pools, generators, MixingPolicy::even, s.seed);
  const RunOptions run{s.workers, resolve_exchange(o.exchange, out, s.config)};
  const GenerationOutcome outcome = run_generation(plan, registry, run);

  DatasetBundle result;
  result.categories = categories;
  json failures = json::array();
  std::map<std::string, int> per_backend;
  for (std::size_t i = 0; i < outcome.images.size(); ++i) {
    const GeneratedImage& g = outcome.images[i];
    const Id id = static_cast<Id>(i) + 1;
    std::string problem;
    if (!g.result.ok()) {
      problem = describe_failure(g.result);
    } else {
      try {
        const RgbImage img = read_png(g.result.artifacts.front());
        if (img.width() != g.item.resolution.width || img.height() != g.item.resolution.height) {
          problem = "artifact size differs from the requested resolution";
        }
      } catch (const Error& e) {
        problem = e.what();
      }
    }
    if (!problem.empty()) {
      json f = failure_entry("image_id", id, problem);
      f["category_id"] = g.item.category_id;
      f["backend"] = g.item.backend_id;
      failures.push_back(f);
      continue;
    }
    copy_into(g.result.artifacts.front(), out, id);
    result.images.push_back(
        {id, g.item.resolution.width, g.item.resolution.height, image_uri(id), ImageSource::generative});
    result.manifest.push_back({id, g.item.category_id, g.item.backend_id, g.item.prompt, g.item.seed,
                               g.item.resolution.width, g.item.resolution.height, g.created_at});
    ++per_backend[g.item.backend_id];
  }
  save_dataset(result, out / "dataset.json");

  const json summary = {{"command", "generate"},      {"planned", plan.items.size()},
                        {"generated", result.images.size()}, {"failed", failures.size()},
                        {"per_backend", per_backend},  {"failures", failures}};
  write_summary(o.common, out / "summary.json", summary);
  log("generate", std::to_string(result.images.size()) + " images, " + std::to_string(outcome.executed) +
                      " newly executed, " + std::to_string(failures.size()) + " failed");
  return failures.empty() ? kExitOk : kExitItemFailure;
}

// ---- annotate --------------------------------------------------------------

struct AnnotateOptions {
  CommonOptions common;
  std::string input;
  std::string strategy;
  std::string attention;
  std::string backend;
  std::string exchange;
  std::string out;
};

int run_annotate(const AnnotateOptions& o) {
  const Session s = open_session(o.common);
  const std::string strategy = o.strategy.empty() ? s.config.annotation.strategy : o.strategy;
  if (strategy != "sam-bg" && strategy != "sam-fg") throw ConfigError("annotate: --strategy must be sam-bg or sam-fg");
  if (strategy == "sam-fg" && o.attention.empty()) throw ConfigError("annotate: sam-fg needs --attention DIR");
  const std::string backend_id = o.backend.empty() ? s.config.generation.mask_predictor : o.backend;
  const BackendRegistry registry = make_registry(s.config);
  require_backend(registry, backend_id, BackendKind::mask_predictor);

  const fs::path in_path = dataset_file(o.input);
  const DatasetBundle in = load_dataset(in_path);
  const auto categories = image_categories(in);
  const fs::path out(o.out);
  const ExchangeDir exchange(resolve_exchange(o.exchange, out, s.config));
  exchange.prepare();

  json failures = json::array();
  JobBatch batch;
  std::map<Id, std::uint64_t> job_of;
  for (const auto& im : in.images) {
    try {
      if (!categories.contains(im.id)) throw ValidationError("no category recorded for this image");
      const RgbImage img = read_png(resolve_uri(in_path, im.uri));
      if (img.width() != im.width || img.height() != im.height) {
        throw DimensionError("image file size differs from the record");
      }
      std::vector<PointPrompt> points;
      if (strategy == "sam-bg") {
        points = corner_prompts(img.width(), img.height());
      } else {
        const GrayImage gray = read_png_gray(fs::path(o.attention) / (std::to_string(im.id) + ".png"));
        if (gray.width != img.width() || gray.height != img.height()) {
          throw DimensionError("attention map size differs from the image");
        }
        points = foreground_point_prompts(AttentionMap::from_gray(gray), s.config.annotation.foreground,
                                          derive_seed({s.seed, static_cast<std::uint64_t>(im.id)}));
      }
      job_of[im.id] = batch.add(backend_id, PredictMask{stage_image(exchange, img).string(), points});
    } catch (const Error& e) {
      failures.push_back(failure_entry("image_id", im.id, e.what()));
    }
  }
  const auto results = batch.run(registry, {s.workers, exchange.root()});

  std::vector<InstanceAnnotation> annotations;
  std::set<Id> kept;
  Id next_ann = 1;
  for (const auto& im : in.images) {
    auto j = job_of.find(im.id);
    if (j == job_of.end()) continue;
    const BackendResult& r = results.at(j->second);
    try {
      if (!r.ok()) throw Error(describe_failure(r));
      if (r.artifacts.empty()) throw FormatError("mask predictor returned no candidates");
      std::vector<MaskCandidate> candidates;
      for (std::size_t k = 0; k < r.artifacts.size(); ++k) {
        BitMask m = read_mask_png(r.artifacts[k]);
        if (m.height() != im.height || m.width() != im.width) throw DimensionError("mask size differs from the image");
        candidates.push_back({std::move(m), k < r.scores.size() ? r.scores[k] : 0.0});
      }
      const BitMask& best = candidates[select_best_mask(candidates)].mask;
      const BitMask instance = strategy == "sam-bg" ? background_to_instance_mask(best) : largest_component(best);
      if (instance.count() == 0) throw EmptyMaskError("predicted mask is empty");
      annotations.push_back(make_annotation(next_ann++, im.id, categories.at(im.id), instance, Provenance::annotated));
      kept.insert(im.id);
    } catch (const Error& e) {
      failures.push_back(failure_entry("image_id", im.id, e.what()));
    }
  }
  const DatasetBundle result = subset_and_copy(in, in_path, kept, std::move(annotations), out);
  save_dataset(result, out / "dataset.json");

  const json summary = {{"command", "annotate"},        {"strategy", strategy},
                        {"images", in.images.size()},   {"annotated", result.images.size()},
                        {"failed", failures.size()},    {"failures", failures}};
  write_summary(o.common, out / "summary.json", summary);
  log("annotate", std::to_string(result.images.size()) + " of " + std::to_string(in.images.size()) +
                      " images annotated with " + strategy);
  return failures.empty() ? kExitOk : kExitItemFailure;
}

// ---- filter ----------------------------------------------------------------

struct FilterOptions {
  CommonOptions common;
  std::string input;
  std::string references;
  std::string metric;
  std::optional<double> threshold;
  std::string clip_scores;
  std::string backend;
  std::string exchange;
  std::string out;
};

std::vector<float> first_row(const BackendResult& r) {
  if (!r.ok()) throw Error(describe_failure(r));
  if (r.artifacts.empty()) throw FormatError("embedder returned no artifact");
  const EmbeddingMatrix m = read_embedding_file(r.artifacts.front());
  if (m.rows() == 0) throw FormatError("embedding file has no rows");
  return m.row(0).values;
}

int run_filter(const FilterOptions& o) {
  const Session s = open_session(o.common);
  const SimilarityMetric metric = o.metric.empty() ? s.config.filtration.metric : [&] {
    try {
      return parse_metric(o.metric);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }();
  const double threshold = o.threshold.value_or(s.config.filtration.threshold);
  const fs::path in_path = dataset_file(o.input);
  const DatasetBundle in = load_dataset(in_path);
  const auto categories = image_categories(in);
  const fs::path out(o.out);
  fs::create_directories(out);

  json failures = json::array();
  std::vector<SimilarityRecord> records;
  std::size_t reference_count = 0;

  if (metric == SimilarityMetric::inter_similarity) {
    const fs::path refs_path = o.references.empty() ? s.config.paths.dataset : fs::path(o.references);
    if (refs_path.empty()) throw ConfigError("filter: inter_similarity needs --references");
    const fs::path refs_file = dataset_file(refs_path);
    const DatasetBundle refs = load_dataset(refs_file);
    const std::string backend_id = o.backend.empty() ? s.config.generation.embedder : o.backend;
    const BackendRegistry registry = make_registry(s.config);
    require_backend(registry, backend_id, BackendKind::embedder);
    const ExchangeDir exchange(resolve_exchange(o.exchange, out, s.config));
    exchange.prepare();

    JobBatch batch;
    std::vector<std::pair<const InstanceAnnotation*, std::uint64_t>> ref_jobs;
    std::map<Id, RgbImage> ref_images;
    for (const auto& a : refs.annotations) {
      try {
        auto it = ref_images.find(a.image_id);
        if (it == ref_images.end()) {
          const auto im = std::find_if(refs.images.begin(), refs.images.end(),
                                       [&](const auto& r) { return r.id == a.image_id; });
          it = ref_images.emplace(a.image_id, read_png(resolve_uri(refs_file, im->uri))).first;
        }
        const RgbImage crop =
            prepare_reference_crop(it->second, a, s.config.filtration.blur_kernel, s.config.filtration.min_crop_width);
        ref_jobs.emplace_back(&a, batch.add(backend_id, EmbedImage{stage_image(exchange, crop).string()}));
      } catch (const Error& e) {
        failures.push_back(failure_entry("reference_annotation_id", a.id, e.what()));
      }
    }
    std::map<Id, std::uint64_t> gen_jobs;
    for (const auto& im : in.images) {
      try {
        if (!categories.contains(im.id)) throw ValidationError("no category recorded for this image");
        const RgbImage img = read_png(resolve_uri(in_path, im.uri));
        gen_jobs[im.id] = batch.add(backend_id, EmbedImage{stage_image(exchange, img).string()});
      } catch (const Error& e) {
        failures.push_back(failure_entry("image_id", im.id, e.what()));
      }
    }
    const auto results = batch.run(registry, {s.workers, exchange.root()});

    std::optional<ReferenceEmbeddingIndex> index;
    for (const auto& [ann, job] : ref_jobs) {
      try {
        const auto v = first_row(results.at(job));
        if (!index) index.emplace(v.size());
        if (v.size() != index->dim()) throw DimensionError("reference embedding dimension differs");
        index->add(ann->category_id, v);
        ++reference_count;
      } catch (const Error& e) {
        failures.push_back(failure_entry("reference_annotation_id", ann->id, e.what()));
      }
    }
    std::vector<GeneratedEmbedding> generated;
    for (const auto& [image_id, job] : gen_jobs) {
      try {
        auto v = first_row(results.at(job));
        if (!index) index.emplace(v.size());
        if (v.size() != index->dim()) throw DimensionError("embedding dimension differs from the references");
        generated.push_back({image_id, categories.at(image_id), std::move(v)});
      } catch (const Error& e) {
        failures.push_back(failure_entry("image_id", image_id, e.what()));
      }
    }
    if (index) records = inter_similarity_batch(generated, *index);
  } else {
    if (o.clip_scores.empty()) throw ConfigError("filter: clip_score needs --clip-scores FILE");
    ClipScoreIngest ingest = ingest_clip_scores(o.clip_scores, categories);
    for (const auto& msg : ingest.rejected) failures.push_back({{"message", msg}});
    std::set<Id> scored;
    for (const auto& r : ingest.records) scored.insert(r.image_id);
    records = std::move(ingest.records);
    for (const auto& im : in.images) {
      if (!scored.contains(im.id) && categories.contains(im.id)) {
        records.push_back({im.id, categories.at(im.id), SimilarityMetric::clip_score, std::nullopt, 0});
      }
    }
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  }

  const auto decisions = apply_threshold_filter(records, threshold);
  write_decisions_jsonl(decisions, out / ("decisions_" + std::string(to_string(metric)) + ".jsonl"));
  std::set<Id> kept;
  std::size_t no_refs = 0;
  for (const auto& d : decisions) {
    if (d.kept) kept.insert(d.image_id);
    if (d.reason == FilterReason::no_references) ++no_refs;
  }
  const DatasetBundle result = subset_and_copy(in, in_path, kept, in.annotations, out);
  save_dataset(result, out / "dataset.json");

  const json summary = {{"command", "filter"},
                        {"metric", std::string(to_string(metric))},
                        {"threshold", threshold},
                        {"images", in.images.size()},
                        {"references", reference_count},
                        {"kept", result.images.size()},
                        {"removed", decisions.size() - kept.size()},
                        {"no_references", no_refs},
                        {"failed", failures.size()},
                        {"failures", failures}};
  write_summary(o.common, out / "summary.json", summary);
  log("filter", "kept " + std::to_string(result.images.size()) + " of " + std::to_string(in.images.size()) +
                    " images at threshold " + format_fixed(threshold, 2));
  return failures.empty() ? kExitOk : kExitItemFailure;
}

// ---- compose ---------------------------------------------------------------

struct ComposeOptions {
  CommonOptions common;
  std::string input;
  std::string targets;
  int canvas = 0;
  std::optional<int> max_paste;
  std::optional<double> scale_lo;
  std::optional<double> scale_hi;
  std::string out;
};

int run_compose(const ComposeOptions& o) {
  const Session s = open_session(o.common);
  const int max_paste = o.max_paste.value_or(s.config.compositor.max_paste);
  const ScaleRange scale{o.scale_lo.value_or(s.config.compositor.scale.lo),
                         o.scale_hi.value_or(s.config.compositor.scale.hi)};
  if (max_paste < 0) throw ConfigError("compose: --max-paste must be >= 0");
  if (!(scale.lo > 0.0 && scale.lo <= scale.hi)) throw ConfigError("compose: need 0 < --scale-lo <= --scale-hi");

  const fs::path in_path = dataset_file(o.input);
  const DatasetBundle sources = load_dataset(in_path);
  json failures = json::array();

  InstanceStore store;
  std::map<Id, RgbImage> source_images;
  std::vector<InstanceAnnotation> source_anns = sources.annotations;
  std::sort(source_anns.begin(), source_anns.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& a : source_anns) {
    try {
      const auto im = std::find_if(sources.images.begin(), sources.images.end(),
                                   [&](const auto& r) { return r.id == a.image_id; });
      auto it = source_images.find(a.image_id);
      if (it == source_images.end()) {
        it = source_images.emplace(a.image_id, read_png(resolve_uri(in_path, im->uri))).first;
      }
      store.add(im->uri, a.category_id, it->second, a.mask);
    } catch (const Error& e) {
      failures.push_back(failure_entry("annotation_id", a.id, e.what()));
    }
  }
  source_images.clear();
  if (store.empty() && max_paste > 0) throw ValidationError("compose: no usable paste sources in " + in_path.string());

  DatasetBundle targets;
  fs::path targets_file;
  const fs::path targets_path = o.targets.empty() ? s.config.paths.dataset : fs::path(o.targets);
  if (!targets_path.empty()) {
    targets_file = dataset_file(targets_path);
    targets = load_dataset(targets_file);
  } else if (o.canvas > 0) {
    const Resolution res = s.config.generation.resolution;
    for (int i = 0; i < o.canvas; ++i) targets.images.push_back({i + 1, res.width, res.height, "", ImageSource::real});
  } else {
    throw ConfigError("compose: give --targets or --canvas N");
  }
  std::sort(targets.images.begin(), targets.images.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  std::vector<RgbImage> bases;
  std::vector<PastePlan> plans;
  for (const auto& t : targets.images) {
    RgbImage base(t.height, t.width);
    if (t.uri.empty()) {
      for (int r = 0; r < t.height; ++r) {
        for (int c = 0; c < t.width; ++c) base.set(r, c, {255, 255, 255});
      }
    } else {
      base = read_png(resolve_uri(targets_file, t.uri));
      if (base.width() != t.width || base.height() != t.height) {
        throw DimensionError("target image " + std::to_string(t.id) + " size differs from its record");
      }
    }
    bases.push_back(std::move(base));
    plans.push_back(sample_paste_plan(store, t, max_paste, scale, derive_seed({s.seed, static_cast<std::uint64_t>(t.id)})));
  }
  std::vector<CompositeResult> results = composite_batch(bases, plans, store);
  bases.clear();

  std::map<Id, std::vector<InstanceAnnotation>> target_anns;
  for (const auto& a : targets.annotations) target_anns[a.image_id].push_back(a);
  std::size_t planned = 0, visible = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    planned += plans[i].instances.size();
    visible += results[i].annotations.size();
    add_occluded_base_annotations(results[i], target_anns[results[i].target_image_id]);
  }

  std::map<Id, CategoryRecord> merged;
  for (const auto* list : std::array<const std::vector<CategoryRecord>*, 2>{&targets.categories, &sources.categories}) {
    for (const auto& c : *list) {
      auto [it, inserted] = merged.emplace(c.id, c);
      if (!inserted && it->second.name != c.name) {
        throw ValidationError("category id " + std::to_string(c.id) + " names differ between sources and targets");
      }
    }
  }
  std::vector<CategoryRecord> categories;
  for (auto& [id, c] : merged) categories.push_back(c);

  const fs::path out(o.out);
  const DatasetBundle emitted = emit_augmented_dataset(results, categories, out);
  json plan_rows = json::array();
  for (std::size_t i = 0; i < plans.size(); ++i) {
    json inst = json::array();
    for (const auto& p : plans[i].instances) {
      inst.push_back({{"source_uri", store.at(p.source_index).source_uri},
                      {"category_id", p.category_id},
                      {"scale", p.scale},
                      {"x", p.x},
                      {"y", p.y},
                      {"z_order", p.z_order}});
    }
    plan_rows.push_back({{"target_image_id", plans[i].target_image_id},
                         {"composite_image_id", static_cast<Id>(i) + 1},
                         {"instances", inst}});
  }
  write_json_file(out / "plans.json", plan_rows);

  const json summary = {{"command", "compose"},
                        {"sources", store.size()},
                        {"targets", targets.images.size()},
                        {"planned_instances", planned},
                        {"visible_pasted", visible},
                        {"fully_occluded", planned - visible},
                        {"annotations", emitted.annotations.size()},
                        {"max_paste", max_paste},
                        {"scale", {scale.lo, scale.hi}},
                        {"failed", failures.size()},
                        {"failures", failures}};
  write_summary(o.common, out / "summary.json", summary);
  log("compose", std::to_string(results.size()) + " composites, " + std::to_string(visible) + " visible pasted instances");
  return failures.empty() ? kExitOk : kExitItemFailure;
}

}  // namespace

void register_pipeline_commands(CLI::App& app, Runner& selected) {
  {
    auto o = std::make_shared<GenerateOptions>();
    auto* sub = app.add_subcommand("generate", "Plan and run image generation jobs");
    add_common_options(*sub, o->common);
    sub->add_option("--prompts", o->prompts, "prompt_pools.json or the prompts output directory")->required();
    sub->add_option("--backend", o->backends, "Generator backend id (repeatable)");
    sub->add_option("--exchange", o->exchange, "Backend exchange directory");
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->callback([&selected, o] { selected = [o] { return run_generate(*o); }; });
  }
  {
    auto o = std::make_shared<AnnotateOptions>();
    auto* sub = app.add_subcommand("annotate", "Derive instance masks with point-prompted mask prediction");
    add_common_options(*sub, o->common);
    sub->add_option("--input", o->input, "Generated dataset (file or directory)")->required();
    sub->add_option("--strategy", o->strategy, "sam-bg or sam-fg");
    sub->add_option("--attention", o->attention, "Directory of <image_id>.png attention maps (sam-fg)");
    sub->add_option("--backend", o->backend, "Mask predictor backend id");
    sub->add_option("--exchange", o->exchange, "Backend exchange directory");
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->callback([&selected, o] { selected = [o] { return run_annotate(*o); }; });
  }
  {
    auto o = std::make_shared<FilterOptions>();
    auto* sub = app.add_subcommand("filter", "Drop generated images by embedding similarity");
    add_common_options(*sub, o->common);
    sub->add_option("--input", o->input, "Annotated dataset (file or directory)")->required();
    sub->add_option("--references", o->references, "Real dataset providing reference instances");
    sub->add_option("--metric", o->metric, "inter_similarity or clip_score");
    sub->add_option("--threshold", o->threshold, "Keep images scoring at least this");
    sub->add_option("--clip-scores", o->clip_scores, "JSON array of {image_id, score} (clip_score)");
    sub->add_option("--backend", o->backend, "Embedder backend id");
    sub->add_option("--exchange", o->exchange, "Backend exchange directory");
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->callback([&selected, o] { selected = [o] { return run_filter(*o); }; });
  }
  {
    auto o = std::make_shared<ComposeOptions>();
    auto* sub = app.add_subcommand("compose", "Paste instances onto target images");
    add_common_options(*sub, o->common);
    sub->add_option("--input", o->input, "Dataset supplying paste instances")->required();
    sub->add_option("--targets", o->targets, "Dataset whose images receive the pastes");
    sub->add_option("--canvas", o->canvas, "Use N white canvases instead of target images");
    sub->add_option("--max-paste", o->max_paste, "Maximum instances pasted per image");
    sub->add_option("--scale-lo", o->scale_lo, "Lower bound of the paste scale");
    sub->add_option("--scale-hi", o->scale_hi, "Upper bound of the paste scale");
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->callback([&selected, o] { selected = [o] { return run_compose(*o); }; });
  }
}

}  // namespace divergen::cli
