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
#include <doctest.h>

#include <cstdlib>
#include <set>

#include "divergen/error.hpp"
#include "divergen/orchestrator.hpp"
#include "divergen/synthetic_backend.hpp"
#include "support.hpp"

using namespace divergen;
using namespace std::chrono_literals;
using divergen::testing::TempDir;

namespace {

PromptPool pool(Id cat, std::vector<int> per_prompt) {
  PromptPool p;
  p.category_id = cat;
  for (std::size_t i = 0; i < per_prompt.size(); ++i) p.prompts.push_back("prompt " + std::to_string(i));
  p.images_per_prompt = std::move(per_prompt);
  return p;
}

BackendDescriptor gen(std::string id, Resolution r = {32, 32}) {
  return {std::move(id), BackendKind::image_generator, r, {}};
}

// 4 categories x 16 images on the synthetic generator, 48 x 48.
GenerationPlan plan_64() {
  std::vector<PromptPool> pools;
  for (Id c = 1; c <= 4; ++c) pools.push_back(pool(c, {6, 5, 5}));
  return plan_generation_jobs(pools, {gen("synthetic", {48, 48})}, MixingPolicy::even, 7);
}

BackendRegistry synthetic_registry() {
  BackendRegistry reg;
  reg.add(std::make_shared<SyntheticGenerator>(Resolution{48, 48}));
  return reg;
}

}  // namespace

TEST_CASE("even mixing") {
  const std::vector<BackendDescriptor> two{gen("sd"), gen("if")};
  auto counts = plan_generation_jobs({pool(1, {7})}, two, MixingPolicy::even, 1).counts();
  CHECK(counts[1]["if"] == 4);
  CHECK(counts[1]["sd"] == 3);

  counts = plan_generation_jobs({pool(1, {500, 500})}, two, MixingPolicy::even, 1).counts();
  CHECK(counts[1]["if"] == 500);
  CHECK(counts[1]["sd"] == 500);

  counts = plan_generation_jobs({pool(1, {1000})}, {gen("sd")}, MixingPolicy::even, 1).counts();
  CHECK(counts[1]["sd"] == 1000);
  CHECK(counts[1].size() == 1);
}

TEST_CASE("planning errors and non-generator backends") {
  CHECK_THROWS_AS(plan_generation_jobs({}, {gen("sd")}, MixingPolicy::even, 1), ConfigError);
  CHECK_THROWS_AS(plan_generation_jobs({pool(1, {2})}, {{"sam", BackendKind::mask_predictor, {}, {}}},
                                       MixingPolicy::even, 1),
                  ConfigError);
}

TEST_CASE("plan seeds are distinct and reproducible") {
  const GenerationPlan a = plan_64();
  const GenerationPlan b = plan_64();
  REQUIRE(a.items.size() == 64);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    CHECK(a.items[i].seed == b.items[i].seed);
    seeds.insert(a.items[i].seed);
  }
  CHECK(seeds.size() == 64);
}

TEST_CASE("workers 1 and 8 give identical images and ledger") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  TempDir d1("orch-w1"), d8("orch-w8");
  const auto reg = synthetic_registry();
  const auto plan = plan_64();
  const auto o1 = run_generation(plan, reg, {1, d1.path()});
  const auto o8 = run_generation(plan, reg, {8, d8.path()});
  CHECK(o1.failed == 0);
  CHECK(o8.failed == 0);
  CHECK(o1.executed == 64);
  CHECK(o8.executed == 64);
  CHECK(divergen::testing::tree_contents(d1.path()) == divergen::testing::tree_contents(d8.path()));
}

TEST_CASE("replaying a plan does no new work") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  TempDir d("orch-replay");
  const auto reg = synthetic_registry();
  const auto plan = plan_64();
  const auto first = run_generation(plan, reg, {4, d.path()});
  const auto before = divergen::testing::tree_contents(d.path());
  const auto again = run_generation(plan, reg, {4, d.path()});
  CHECK(first.executed == 64);
  CHECK(again.executed == 0);
  CHECK(again.failed == 0);
  for (const auto& img : again.images) CHECK(img.result.reused);
  CHECK(divergen::testing::tree_contents(d.path()) == before);
}

TEST_CASE("a dead backend fails its own job only") {
  TempDir d("orch-dead");
  BackendRegistry reg;
  reg.add(std::make_shared<SyntheticGenerator>(Resolution{32, 32}));
  reg.add(std::make_shared<FileExchangeBackend>(gen("dead"), 80ms, 5ms));
  std::vector<BackendJob> jobs;
  for (int i = 0; i < 63; ++i) {
    const GenerateImage g{"thing", static_cast<std::uint64_t>(i), {32, 32}, {}};
    jobs.push_back({content_job_id("synthetic", g), "synthetic", g});
  }
  const GenerateImage g{"thing", 0, {32, 32}, {}};
  jobs.push_back({content_job_id("dead", g), "dead", g});
  const auto results = run_jobs(jobs, reg, {8, d.path()});
  int ok = 0, timeouts = 0;
  for (const auto& r : results) {
    ok += r.ok();
    timeouts += r.status == JobStatus::timeout;
  }
  CHECK(ok == 63);
  CHECK(timeouts == 1);
  CHECK(results.back().status == JobStatus::timeout);
}

TEST_CASE("unknown backend and kind mismatch are per-job errors") {
  TempDir d("orch-unknown");
  const auto reg = synthetic_registry();
  const GenerateImage g{"x", 1, {48, 48}, {}};
  const EmbedImage e{"/none.png"};
  const auto results = run_jobs({{1, "ghost", g}, {2, "synthetic", e}, {3, "synthetic", g}}, reg, {2, d.path()});
  CHECK(results[0].status == JobStatus::error);
  CHECK(results[1].status == JobStatus::error);
  CHECK(results[2].ok());
}

TEST_CASE("timestamps honour SOURCE_DATE_EPOCH") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  CHECK(current_timestamp() == "2023-11-14T22:13:20Z");
}
