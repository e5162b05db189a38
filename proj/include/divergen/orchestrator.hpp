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
#include <map>
#include <string>
#include <vector>

#include "divergen/backend.hpp"
#include "divergen/dataset.hpp"
#include "divergen/prompts.hpp"

namespace divergen {

/// How a category's images are spread over the generator backends.
/// `even`: images alternate over generators in lexicographic id order, so
/// counts differ by at most one and the extra image goes to the smaller id.
enum class MixingPolicy { even };

struct PlannedImage {
  Id category_id = 0;
  std::string backend_id;
  std::string prompt;
  int prompt_index = 0;
  int replica_index = 0;
  std::uint64_t seed = 0;
  Resolution resolution;
};

struct GenerationPlan {
  std::vector<PlannedImage> items;  // ordered by category id, prompt, replica

  /// category -> backend -> image count.
  std::map<Id, std::map<std::string, int>> counts() const;
};

/// Seeds are derive_seed(run_seed, category, prompt index, replica index).
/// Throws ConfigError with no generator backend or no pools.
GenerationPlan plan_generation_jobs(const std::vector<PromptPool>& pools,
                                    const std::vector<BackendDescriptor>& backends,
                                    MixingPolicy mixing, std::uint64_t seed);

struct RunOptions {
  int workers = 1;
  std::filesystem::path exchange_dir;
};

/// Runs independent jobs on `workers` threads. A job whose ok response is
/// already in the exchange directory is not re-run (result marked reused).
/// Failures are recorded per job and never abort the batch. The result
/// vector is index-aligned with `jobs`.
std::vector<BackendResult> run_jobs(const std::vector<BackendJob>& jobs,
                                    const BackendRegistry& registry, const RunOptions& options);

/// One generated image as recorded in the exchange directory's ledger.
struct LedgerEntry {
  std::uint64_t job_id = 0;
  std::string backend;
  std::string prompt;
  std::uint64_t seed = 0;
  Resolution resolution;
  std::string artifact;  // relative to the exchange root
  std::string created_at;
};

/// `<exchange>/manifest.json`: every image ever produced there, keyed by
/// job id. Appended by a single writer after each batch.
class GenerationLedger {
 public:
  static GenerationLedger load(const ExchangeDir& exchange);
  void save(const ExchangeDir& exchange) const;

  const LedgerEntry* find(std::uint64_t job_id) const;
  void record(LedgerEntry entry);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::uint64_t, LedgerEntry> entries_;
};

struct GeneratedImage {
  PlannedImage item;
  BackendResult result;
  std::string created_at;  // empty on failure
};

struct GenerationOutcome {
  std::vector<GeneratedImage> images;  // aligned with plan.items
  std::size_t executed = 0;            // jobs that did new work
  std::size_t failed = 0;
};

/// Executes a plan. Images already in the ledger with their artifact on
/// disk are reused without new work; new images are appended to the
/// ledger with a timestamp.
GenerationOutcome run_generation(const GenerationPlan& plan, const BackendRegistry& registry,
                                 const RunOptions& options);

/// UTC ISO-8601 time; honors SOURCE_DATE_EPOCH for reproducible runs.
std::string current_timestamp();

}  // namespace divergen
