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
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <memory>
#include <sstream>

#include "common.hpp"
#include "divergen/analysis.hpp"
#include "divergen/cli.hpp"
#include "divergen/error.hpp"

namespace divergen::cli {

namespace {

struct AnalyzeOptions {
  CommonOptions common;
  std::string report;  // TSV destination; stdout when empty
  std::string logits;
  std::string logits_p;
  std::string logits_q;
  std::optional<double> tau;
  std::string ap;
  std::string rows;
  std::optional<double> k;
  std::string dataset;
  std::optional<int> cap;
  std::string out;
};

// Emits the TSV and the summary; the summary goes next to a report file or
// to stderr when the report is on stdout.
void emit(const AnalyzeOptions& o, const std::string& tsv, const json& summary) {
  if (o.report.empty()) {
    std::cout << tsv;
  } else {
    const fs::path report(o.report);
    if (report.has_parent_path()) fs::create_directories(report.parent_path());
    std::ofstream(report, std::ios::binary) << tsv;
  }
  fs::path default_summary;
  if (!o.report.empty()) default_summary = fs::path(o.report).replace_extension(".summary.json");
  write_summary(o.common, default_summary, summary, o.report.empty());
}

EnergyConfig energy_config(const Session& s, const AnalyzeOptions& o) {
  const double tau = o.tau.value_or(s.config.analysis.tau);
  if (!(tau > 0.0)) throw ConfigError("analyze: --tau must be positive");
  return {tau};
}

int run_energy(const AnalyzeOptions& o) {
  const Session s = open_session(o.common);
  const EnergyConfig cfg = energy_config(s, o);
  const auto records = read_logit_jsonl(o.logits);
  const auto energies = energy_batch(records, cfg);
  std::ostringstream tsv;
  write_energy_tsv(tsv, records, energies);
  json summary = {{"command", "analyze energy"}, {"tau", cfg.tau}, {"records", records.size()}};
  if (records.size() >= 2) {
    try {
      const GaussianFit fit = fit_gaussian(energies);
      summary["fit"] = {{"mu", fit.mu}, {"sigma", fit.sigma}};
    } catch (const ValidationError&) {
      summary["fit"] = nullptr;
    }
  }
  emit(o, tsv.str(), summary);
  return kExitOk;
}

int run_kl(const AnalyzeOptions& o) {
  const Session s = open_session(o.common);
  const EnergyConfig cfg = energy_config(s, o);
  const GaussianFit p = fit_gaussian(energy_batch(read_logit_jsonl(o.logits_p), cfg));
  const GaussianFit q = fit_gaussian(energy_batch(read_logit_jsonl(o.logits_q), cfg));
  const double kl = gaussian_kl(p, q);
  std::ostringstream tsv;
  write_kl_tsv(tsv, p, q, kl);
  emit(o, tsv.str(),
       {{"command", "analyze kl"},
        {"tau", cfg.tau},
        {"p", {{"mu", p.mu}, {"sigma", p.sigma}, {"samples", p.sample_count}}},
        {"q", {{"mu", q.mu}, {"sigma", q.sigma}, {"samples", q.sample_count}}},
        {"kl", kl}});
  return kExitOk;
}

int run_tvg(const AnalyzeOptions& o) {
  open_session(o.common);
  const TvgOutcome outcome = compute_tvg(read_ap_records(o.ap));
  std::ostringstream tsv;
  write_tvg_tsv(tsv, outcome);
  json results = json::array();
  for (const auto& r : outcome.results) {
    results.push_back({{"group", to_string(r.group)}, {"task", to_string(r.task)}, {"tvg", r.value}});
  }
  json incomplete = json::array();
  for (const auto& p : outcome.incomplete) {
    incomplete.push_back({{"group", to_string(p.group)}, {"task", to_string(p.task)}, {"missing", to_string(p.missing)}});
    log("analyze tvg", "no " + std::string(to_string(p.missing)) + " AP for (" + std::string(to_string(p.group)) +
                           ", " + std::string(to_string(p.task)) + ")");
  }
  emit(o, tsv.str(), {{"command", "analyze tvg"}, {"results", results}, {"incomplete", incomplete}});
  return outcome.incomplete.empty() ? kExitOk : kExitItemFailure;
}

int run_sigma(const AnalyzeOptions& o) {
  const Session s = open_session(o.common);
  const double k = o.k.value_or(s.config.analysis.sigma_k);
  if (!(k > 0.0)) throw ConfigError("analyze sigma: --k must be positive");
  const auto rows = read_sigma_rows(o.rows);
  const auto bounds = sigma_bounds(rows, k);
  std::ostringstream tsv;
  write_sigma_tsv(tsv, rows, bounds);
  json out = json::array();
  for (const auto& b : bounds) out.push_back({{"label", b.label}, {"upper", b.upper}, {"lower", b.lower}});
  emit(o, tsv.str(), {{"command", "analyze sigma"}, {"k", k}, {"bounds", out}});
  return kExitOk;
}

int run_minitrain(const AnalyzeOptions& o) {
  const Session s = open_session(o.common);
  const int cap = o.cap.value_or(s.config.analysis.minitrain_cap);
  if (cap < 1) throw ConfigError("analyze minitrain: --cap must be >= 1");
  const fs::path in_path = dataset_file(o.dataset);
  DatasetBundle subset = build_minitrain_subset(load_dataset(in_path), cap, s.seed);
  const fs::path out(o.out);
  fs::create_directories(out);
  // Image files stay where they are; uris are rewritten relative to `out`.
  for (auto& im : subset.images) {
    im.uri = fs::relative(fs::absolute(resolve_uri(in_path, im.uri)), fs::absolute(out)).generic_string();
  }
  save_dataset(subset, out / "dataset.json");
  std::map<Id, std::set<Id>> per_category;
  for (const auto& a : subset.annotations) per_category[a.category_id].insert(a.image_id);
  json coverage = json::object();
  for (const auto& [cat, imgs] : per_category) coverage[std::to_string(cat)] = imgs.size();
  write_summary(o.common, out / "summary.json",
                {{"command", "analyze minitrain"},
                 {"cap", cap},
                 {"images", subset.images.size()},
                 {"annotations", subset.annotations.size()},
                 {"coverage", coverage}});
  return kExitOk;
}

}  // namespace

void register_analyze_commands(CLI::App& app, Runner& selected) {
  auto* analyze = app.add_subcommand("analyze", "Distribution-discrepancy analysis");
  analyze->require_subcommand(1);
  auto o = std::make_shared<AnalyzeOptions>();

  auto common = [&](CLI::App* sub) {
    add_common_options(*sub, o->common);
    sub->add_option("--report", o->report, "TSV report path (stdout when omitted)");
  };
  {
    auto* sub = analyze->add_subcommand("energy", "Energy per logit record");
    common(sub);
    sub->add_option("--logits", o->logits, "JSON lines of {instance_id, logits}")->required();
    sub->add_option("--tau", o->tau, "Temperature");
    sub->callback([&selected, o] { selected = [o] { return run_energy(*o); }; });
  }
  {
    auto* sub = analyze->add_subcommand("kl", "KL divergence between Gaussian fits of two energy sets");
    common(sub);
    sub->add_option("--p", o->logits_p, "Logits of the first model")->required();
    sub->add_option("--q", o->logits_q, "Logits of the second model")->required();
    sub->add_option("--tau", o->tau, "Temperature");
    sub->callback([&selected, o] { selected = [o] { return run_kl(*o); }; });
  }
  {
    auto* sub = analyze->add_subcommand("tvg", "Train-val gap per group and task");
    common(sub);
    sub->add_option("--ap", o->ap, "JSON array of {group, task, split, value}")->required();
    sub->callback([&selected, o] { selected = [o] { return run_tvg(*o); }; });
  }
  {
    auto* sub = analyze->add_subcommand("sigma", "mu +/- k sigma bounds");
    common(sub);
    sub->add_option("--rows", o->rows, "JSON array of {label, mu, sigma}")->required();
    sub->add_option("--k", o->k, "Multiplier");
    sub->callback([&selected, o] { selected = [o] { return run_sigma(*o); }; });
  }
  {
    auto* sub = analyze->add_subcommand("minitrain", "Per-category capped training subset");
    add_common_options(*sub, o->common);
    sub->add_option("--dataset", o->dataset, "Training dataset")->required();
    sub->add_option("--cap", o->cap, "Images per category");
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->callback([&selected, o] { selected = [o] { return run_minitrain(*o); }; });
  }
}

}  // namespace divergen::cli
