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

#include "cli_support.hpp"
#include "divergen/analysis.hpp"
#include "divergen/dataset.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace divergen;
using divergen::testing::run_cli;
using divergen::testing::TempDir;

namespace {

std::filesystem::path small_config(const TempDir& dir) {
  const auto path = dir / "config.json";
  divergen::testing::write_text(path, R"({"generation": {"resolution": [96, 96]}})");
  return path;
}

}  // namespace

TEST_CASE("exit codes") {
  TempDir dir("cli-exit");
  CHECK(run_cli({"config", "--print-defaults"}) == kExitOk);
  CHECK(run_cli({"--help"}) == kExitOk);
  CHECK(run_cli({}) == kExitConfigError);
  CHECK(run_cli({"frobnicate"}) == kExitConfigError);
  CHECK(run_cli({"validate", "--no-such-flag", "x"}) == kExitConfigError);
  divergen::testing::write_text(dir / "bad.json", R"({"workers": 0})");
  CHECK(run_cli({"config", "--config", (dir / "bad.json").string()}) == kExitConfigError);
  CHECK(run_cli({"config", "--config", (dir / "none.json").string()}) == kExitConfigError);
}

TEST_CASE("validate") {
  TempDir dir("cli-validate");
  const auto minimal = divergen::testing::data_dir() / "minimal";
  CHECK(run_cli({"validate", minimal.string(), "--summary", (dir / "s.json").string()}) == kExitOk);
  CHECK(read_json_file(dir / "s.json")["valid"] == true);

  // Dataset whose image file is missing.
  auto doc = read_json_file(minimal / "dataset.json");
  doc["images"][0]["uri"] = "images/absent.png";
  write_json_file(dir / "broken" / "dataset.json", doc);
  CHECK(run_cli({"validate", (dir / "broken").string(), "--summary", (dir / "b.json").string()}) == kExitItemFailure);
  CHECK(run_cli({"validate", (dir / "broken").string(), "--no-image-check", "--summary", (dir / "c.json").string()}) ==
        kExitOk);
}

TEST_CASE("analyze energy writes the direct-summation values") {
  TempDir dir("cli-energy");
  const auto logits = divergen::testing::data_dir() / "logits_small.jsonl";
  REQUIRE(run_cli({"analyze", "energy", "--logits", logits.string(), "--tau", "0.9", "--report",
                   (dir / "e.tsv").string()}) == kExitOk);
  const std::string tsv = divergen::testing::read_bytes(dir / "e.tsv");
  const auto recs = read_logit_jsonl(logits);
  std::istringstream in(tsv);
  std::string line;
  std::getline(in, line);
  for (const auto& r : recs) {
    REQUIRE(std::getline(in, line));
    const double v = std::stod(line.substr(line.find('\t') + 1));
    CHECK(std::abs(v - static_cast<double>(oracle::energy_direct(r.logits, 0.9L))) <= 1e-12);
  }
  CHECK(std::filesystem::exists(dir / "e.summary.json"));
}

TEST_CASE("analyze tvg, sigma, kl and minitrain") {
  TempDir dir("cli-analyze");
  const auto data = divergen::testing::data_dir();
  CHECK(run_cli({"analyze", "tvg", "--ap", (data / "ap_12.json").string(), "--report", (dir / "t.tsv").string()}) ==
        kExitOk);
  const std::string tvg = divergen::testing::read_bytes(dir / "t.tsv");
  CHECK(tvg.find("f\tbox\t13.16") != std::string::npos);
  CHECK(tvg.find("r\tmask\t31.68") != std::string::npos);

  divergen::testing::write_text(dir / "partial.json", R"([{"group": "r", "task": "box", "split": "val", "value": 3}])");
  CHECK(run_cli({"analyze", "tvg", "--ap", (dir / "partial.json").string(), "--report", (dir / "p.tsv").string()}) ==
        kExitItemFailure);

  divergen::testing::write_text(dir / "rows.json", R"([{"label": "TVG_f^box", "mu": 9.98, "sigma": 0.24}])");
  CHECK(run_cli({"analyze", "sigma", "--rows", (dir / "rows.json").string(), "--report", (dir / "s.tsv").string()}) ==
        kExitOk);
  CHECK(divergen::testing::read_bytes(dir / "s.tsv").find("10.70\t9.26") != std::string::npos);

  CHECK(run_cli({"analyze", "kl", "--p", (data / "logits_small.jsonl").string(), "--q",
                 (data / "logits_small.jsonl").string(), "--report", (dir / "k.tsv").string()}) == kExitOk);
  CHECK(divergen::testing::read_bytes(dir / "k.tsv").find("0.0000") != std::string::npos);
  CHECK(run_cli({"analyze", "energy", "--logits", (dir / "missing.jsonl").string(), "--report",
                 (dir / "x.tsv").string()}) != kExitOk);
}

TEST_CASE("small synthetic pipeline is valid and reproducible") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  TempDir a("cli-pipe-a"), b("cli-pipe-b"), ex_a("cli-ex-a"), ex_b("cli-ex-b");
  const auto cats = divergen::testing::data_dir() / "categories_min.json";
  const auto run_a = divergen::testing::run_pipeline({a.path(), ex_a.path(), cats, small_config(a)}, 4, 4);
  CHECK_MESSAGE(run_a.failed_step.empty(), run_a.failed_step, " exited ", run_a.exit_code);
  const auto run_b = divergen::testing::run_pipeline({b.path(), ex_b.path(), cats, small_config(b)}, 4, 1);
  CHECK(run_b.failed_step.empty());

  const DatasetBundle composed = load_dataset(a / "composed" / "dataset.json");
  CHECK_FALSE(composed.images.empty());
  CHECK_FALSE(composed.annotations.empty());
  const auto generated = load_dataset(a / "generated" / "dataset.json");
  CHECK(generated.images.size() == 16);
  CHECK(generated.manifest.size() == 16);

  // Worker count does not change any output byte.
  CHECK(divergen::testing::tree_contents(a / "composed") == divergen::testing::tree_contents(b / "composed"));
  CHECK(divergen::testing::tree_contents(a / "filtered") == divergen::testing::tree_contents(b / "filtered"));
}

TEST_CASE("generate twice with the same seed gives identical trees") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  TempDir dir("cli-gen2"), ex("cli-gen2-ex");
  const auto cats = divergen::testing::data_dir() / "categories_min.json";
  const auto cfg = small_config(dir);
  REQUIRE(run_cli({"prompts", "--dataset", cats.string(), "--budget", "3", "--out", (dir / "p").string()}) == 0);
  for (const char* out : {"g1", "g2"}) {
    REQUIRE(run_cli({"generate", "--backend", "synthetic", "--seed", "7", "--config", cfg.string(), "--prompts",
                     (dir / "p").string(), "--exchange", ex.path().string(), "--out", (dir / out).string()}) == 0);
  }
  CHECK(divergen::testing::tree_contents(dir / "g1") == divergen::testing::tree_contents(dir / "g2"));
}
