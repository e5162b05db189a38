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

#include <cmath>
#include <map>
#include <sstream>

#include "divergen/analysis.hpp"
#include "divergen/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace divergen;

TEST_CASE("energy of small vectors") {
  CHECK(energy({0.0}, {1.0}) == 0.0);
  CHECK(energy({0.0, 0.0}, {1.0}) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  const double got = energy({1, 2, 3}, {0.9});
  const long double want = oracle::energy_direct({1, 2, 3}, 0.9L);
  CHECK(std::abs(got - static_cast<double>(want)) <= 1e-12);
  CHECK_THROWS_AS(energy(std::vector<double>{}, {0.9}), ValidationError);
  CHECK_THROWS_AS(energy({1.0, NAN}, {0.9}), ValidationError);
  CHECK_THROWS_AS(energy({1.0}, {0.0}), ValidationError);
}

TEST_CASE("energy is stable for large logits and obeys its bounds") {
  const double big = energy({1000.0, 1000.0}, {1.0});
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(-1000.0 - std::log(2.0)));

  Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> h(1 + rng.below(50));
    for (auto& x : h) x = rng.uniform(-30, 30);
    const double tau = 0.9;
    const double F = energy(h, {tau});
    const double mx = *std::max_element(h.begin(), h.end());
    CHECK(F <= -mx);
    CHECK(F >= -mx - tau * std::log(static_cast<double>(h.size())));
    const double c = rng.uniform(-100, 100);
    std::vector<double> shifted = h;
    for (auto& x : shifted) x += c;
    CHECK(std::abs(energy(shifted, {tau}) - (F - c)) <= 1e-9);
  }
}

TEST_CASE("energy batch keeps order") {
  std::vector<LogitRecord> recs;
  for (int i = 0; i < 100; ++i) recs.push_back({std::to_string(i), {double(i), 0.0}});
  const auto e = energy_batch(recs, {0.9});
  for (int i = 0; i < 100; ++i) CHECK(e[i] == energy(recs[i], {0.9}));
}

TEST_CASE("Gaussian fit") {
  const GaussianFit f = fit_gaussian({-1.0, 1.0});
  CHECK(f.mu == 0.0);
  CHECK(f.sigma == 1.0);
  CHECK(f.sample_count == 2);
  const GaussianFit g = fit_gaussian({4.0, 6.0});
  CHECK(g.mu == 5.0);
  CHECK(g.sigma == 1.0);
  CHECK_THROWS_AS(fit_gaussian({1.0}), ValidationError);
  CHECK_THROWS_AS(fit_gaussian({2.0, 2.0, 2.0}), ValidationError);

  Rng rng(10000);
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) xs.push_back(divergen::testing::normal(rng, 3.0, 2.0));
  const GaussianFit n = fit_gaussian(xs);
  CHECK(std::abs(n.mu - 3.0) <= 3 * 2.0 / 100);
  CHECK(std::abs(n.sigma - 2.0) <= 3 * 2.0 / 100);
}

TEST_CASE("Gaussian KL") {
  CHECK(gaussian_kl({0, 1, 2}, {0, 1, 2}) == 0.0);
  CHECK(std::abs(gaussian_kl({0, 1, 2}, {1, 1, 2}) - 0.5) <= 1e-12);
  Rng rng(55);
  for (int t = 0; t < 100; ++t) {
    const GaussianFit p{rng.uniform(-5, 5), rng.uniform(0.3, 3), 2};
    const GaussianFit q{rng.uniform(-5, 5), rng.uniform(0.3, 3), 2};
    const double kl = gaussian_kl(p, q);
    CHECK(kl >= 0.0);
    CHECK(std::abs(kl - oracle::kl_quadrature(p.mu, p.sigma, q.mu, q.sigma)) <= 1e-6);
  }
}

TEST_CASE("train-val gap") {
  auto outcome = compute_tvg({{FrequencyGroup::rare, ApTask::box, ApSplit::minitrain, 50.0},
                              {FrequencyGroup::rare, ApTask::box, ApSplit::val, 40.0},
                              {FrequencyGroup::common, ApTask::mask, ApSplit::minitrain, 20.0},
                              {FrequencyGroup::common, ApTask::mask, ApSplit::val, 20.0},
                              {FrequencyGroup::frequent, ApTask::box, ApSplit::val, 30.0}});
  REQUIRE(outcome.results.size() == 2);
  CHECK(outcome.results[0].group == FrequencyGroup::common);
  CHECK(outcome.results[0].value == 0.0);
  CHECK(outcome.results[1].value == 10.0);
  REQUIRE(outcome.incomplete.size() == 1);
  CHECK(outcome.incomplete[0].missing == ApSplit::minitrain);

  CHECK_THROWS_AS(compute_tvg({{FrequencyGroup::rare, ApTask::box, ApSplit::val, 1},
                               {FrequencyGroup::rare, ApTask::box, ApSplit::val, 2}}),
                  ValidationError);
  CHECK_THROWS_AS(compute_tvg({{FrequencyGroup::rare, ApTask::box, ApSplit::val, 101}}), ValidationError);
}

TEST_CASE("train-val gap on the 12-record fixture") {
  const auto recs = read_ap_records(divergen::testing::data_dir() / "ap_12.json");
  REQUIRE(recs.size() == 12);
  std::map<std::pair<int, int>, std::map<int, double>> sheet;
  for (const auto& r : recs) sheet[{int(r.group), int(r.task)}][int(r.split)] = r.value;
  const auto outcome = compute_tvg(recs);
  REQUIRE(outcome.results.size() == 6);
  CHECK(outcome.incomplete.empty());
  for (const auto& res : outcome.results) {
    auto& row = sheet[{int(res.group), int(res.task)}];
    CHECK(res.value == row[int(ApSplit::minitrain)] - row[int(ApSplit::val)]);
  }
  CHECK(outcome.results[0].group == FrequencyGroup::frequent);
  CHECK(outcome.results[0].task == ApTask::box);
  CHECK(outcome.results[5].group == FrequencyGroup::rare);
  CHECK(outcome.results[5].task == ApTask::mask);
}

TEST_CASE("sigma bounds") {
  auto b = sigma_bounds({{"x", 9.98, 0.24}}, 3.0);
  CHECK(b[0].upper == doctest::Approx(10.70));
  CHECK(b[0].lower == doctest::Approx(9.26));
  b = sigma_bounds({{"y", 13.95, 0.41}}, 3.0);
  CHECK(std::abs(b[0].upper - 15.17) <= 0.02);
  b = sigma_bounds({{"z", 4.0, 0.0}}, 3.0);
  CHECK(b[0].upper == 4.0);
  CHECK(b[0].lower == 4.0);
  CHECK_THROWS_AS(sigma_bounds({}, 0.0), ValidationError);
}

TEST_CASE("readers and reports") {
  const auto recs = read_logit_jsonl(divergen::testing::data_dir() / "logits_small.jsonl");
  REQUIRE(recs.size() == 3);
  CHECK(recs[1].instance_id == "17");
  std::ostringstream out;
  write_energy_tsv(out, recs, energy_batch(recs, {0.9}));
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "instance_id\tenergy");
  for (const auto& r : recs) {
    std::getline(in, line);
    const auto tab = line.find('\t');
    CHECK(line.substr(0, tab) == r.instance_id);
    const double v = std::stod(line.substr(tab + 1));
    CHECK(std::abs(v - static_cast<double>(oracle::energy_direct(r.logits, 0.9L))) <= 1e-12);
  }

  CHECK(format_fixed(-0.001, 2) == "0.00");
  CHECK(format_fixed(10.695, 2).size() == 5);
  CHECK(format_fixed(1.23456, 4) == "1.2346");

  divergen::testing::TempDir dir("an");
  divergen::testing::write_text(dir / "bad.jsonl", "{\"instance_id\": 1, \"logits\": [1]}\nnot json\n");
  try {
    read_logit_jsonl(dir / "bad.jsonl");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}
