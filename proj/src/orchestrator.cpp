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
#include "divergen/orchestrator.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>

#include "divergen/error.hpp"
#include "divergen/random.hpp"

namespace divergen {

using nlohmann::json;

std::map<Id, std::map<std::string, int>> GenerationPlan::counts() const {
  std::map<Id, std::map<std::string, int>> out;
  for (const auto& it : items) ++out[it.category_id][it.backend_id];
  return out;
}

GenerationPlan plan_generation_jobs(const std::vector<PromptPool>& pools,
                                    const std::vector<BackendDescriptor>& backends,
                                    MixingPolicy mixing, std::uint64_t seed) {
  if (pools.empty()) throw ConfigError("no prompt pools to plan");
  std::vector<BackendDescriptor> generators;
  for (const auto& b : backends) {
    if (b.kind == BackendKind::image_generator) generators.push_back(b);
  }
  if (generators.empty()) throw ConfigError("no image generator backend configured");
  std::sort(generators.begin(), generators.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  (void)mixing;  // only the even policy exists

  std::vector<const PromptPool*> ordered;
  for (const auto& p : pools) ordered.push_back(&p);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->category_id < b->category_id; });

  GenerationPlan plan;
  for (const PromptPool* pool : ordered) {
    std::size_t slot = 0;
    for (std::size_t p = 0; p < pool->prompts.size(); ++p) {
      for (int r = 0; r < pool->images_per_prompt[p]; ++r, ++slot) {
        const auto& gen = generators[slot % generators.size()];
        plan.items.push_back({pool->category_id, gen.id, pool->prompts[p], static_cast<int>(p), r,
                              derive_seed({seed, static_cast<std::uint64_t>(pool->category_id), p,
                                           static_cast<std::uint64_t>(r)}),
                              gen.resolution});
      }
    }
  }
  return plan;
}

std::vector<BackendResult> run_jobs(const std::vector<BackendJob>& jobs,
                                    const BackendRegistry& registry, const RunOptions& options) {
  const ExchangeDir exchange(options.exchange_dir);
  exchange.prepare();
  std::vector<BackendResult> results(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  const int workers = std::max(1, options.workers);

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const BackendJob& job = jobs[i];
    BackendResult& out = results[i];
    out.job_id = job.job_id;
    try {
      if (auto prior = exchange.read_response(job.job_id); prior && prior->ok()) {
        out = std::move(*prior);
        out.reused = true;
        continue;
      }
      const Backend* backend = registry.find(job.backend_id);
      if (!backend) {
        out.status = JobStatus::error;
        out.message = "unknown backend '" + job.backend_id + "'";
      } else if (backend->descriptor().kind != kind_of(job.payload)) {
        out.status = JobStatus::error;
        out.message = "backend '" + job.backend_id + "' is a " +
                      std::string(to_string(backend->descriptor().kind)) + ", job needs a " +
                      std::string(to_string(kind_of(job.payload)));
      } else {
        std::filesystem::remove(exchange.response_path(job.job_id));
        out = backend->execute(job, exchange);
      }
    } catch (const std::exception& e) {
      out.status = JobStatus::error;
      out.artifacts.clear();
      out.message = e.what();
    }
  }
  return results;
}

GenerationLedger GenerationLedger::load(const ExchangeDir& exchange) {
  GenerationLedger ledger;
  const auto path = exchange.root() / "manifest.json";
  if (!std::filesystem::exists(path)) return ledger;
  const json doc = read_json_file(path);
  try {
    for (const auto& o : doc.at("images")) {
      LedgerEntry e;
      e.job_id = o.at("job_id").get<std::uint64_t>();
      e.backend = o.at("backend").get<std::string>();
      e.prompt = o.at("prompt").get<std::string>();
      e.seed = o.at("seed").get<std::uint64_t>();
      const auto res = o.at("resolution").get<std::vector<int>>();
      e.resolution = {res.at(0), res.at(1)};
      e.artifact = o.at("artifact").get<std::string>();
      e.created_at = o.value("created_at", "");
      ledger.record(std::move(e));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return ledger;
}

void GenerationLedger::save(const ExchangeDir& exchange) const {
  json images = json::array();
  for (const auto& [id, e] : entries_) {
    images.push_back({{"job_id", e.job_id},
                      {"backend", e.backend},
                      {"prompt", e.prompt},
                      {"seed", e.seed},
                      {"resolution", {e.resolution.width, e.resolution.height}},
                      {"artifact", e.artifact},
                      {"created_at", e.created_at}});
  }
  write_file_atomic(exchange.root() / "manifest.json", json{{"images", images}}.dump(2) + "\n");
}

const LedgerEntry* GenerationLedger::find(std::uint64_t job_id) const {
  auto it = entries_.find(job_id);
  return it == entries_.end() ? nullptr : &it->second;
}

void GenerationLedger::record(LedgerEntry entry) {
  const auto id = entry.job_id;
  entries_.insert_or_assign(id, std::move(entry));
}

GenerationOutcome run_generation(const GenerationPlan& plan, const BackendRegistry& registry,
                                 const RunOptions& options) {
  const ExchangeDir exchange(options.exchange_dir);
  exchange.prepare();
  GenerationLedger ledger = GenerationLedger::load(exchange);

  GenerationOutcome outcome;
  outcome.images.resize(plan.items.size());
  std::vector<BackendJob> pending;
  std::vector<std::size_t> pending_index;
  for (std::size_t i = 0; i < plan.items.size(); ++i) {
    const PlannedImage& item = plan.items[i];
    std::map<std::string, std::string> params;
    if (const Backend* b = registry.find(item.backend_id)) params = b->descriptor().params;
    JobPayload payload = GenerateImage{item.prompt, item.seed, item.resolution, params};
    const std::uint64_t id = content_job_id(item.backend_id, payload);
    GeneratedImage& slot = outcome.images[i];
    slot.item = item;
    slot.result.job_id = id;
    if (const LedgerEntry* e = ledger.find(id);
        e && std::filesystem::exists(exchange.resolve(e->artifact))) {
      slot.result.status = JobStatus::ok;
      slot.result.artifacts = {exchange.resolve(e->artifact)};
      slot.result.reused = true;
      slot.created_at = e->created_at;
      continue;
    }
    // Two plan items with identical requests share one job.
    if (std::none_of(pending.begin(), pending.end(), [id](const auto& j) { return j.job_id == id; })) {
      pending.push_back({id, item.backend_id, std::move(payload)});
    }
    pending_index.push_back(i);
  }

  const auto results = run_jobs(pending, registry, options);
  std::map<std::uint64_t, const BackendResult*> by_id;
  for (const auto& r : results) by_id[r.job_id] = &r;

  const std::string now = current_timestamp();
  for (std::size_t i : pending_index) {
    GeneratedImage& slot = outcome.images[i];
    slot.result = *by_id.at(slot.result.job_id);
    if (!slot.result.ok()) continue;
    const LedgerEntry* existing = ledger.find(slot.result.job_id);
    if (existing && std::filesystem::exists(exchange.resolve(existing->artifact))) {
      slot.created_at = existing->created_at;
      continue;
    }
    slot.created_at = now;
    ledger.record({slot.result.job_id, slot.item.backend_id, slot.item.prompt, slot.item.seed,
                   slot.item.resolution, exchange.relative(slot.result.artifacts.front()), now});
  }
  for (const auto& r : results) {
    if (!r.reused) ++outcome.executed;
  }
  for (const auto& img : outcome.images) {
    if (!img.result.ok()) ++outcome.failed;
  }
  ledger.save(exchange);
  return outcome;
}

std::string current_timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace divergen
