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
#include <fstream>
#include <set>

#include "divergen/error.hpp"
#include "divergen/filtration.hpp"
#include "support.hpp"

using namespace divergen;
using divergen::testing::TempDir;

namespace {

std::vector<float> random_vec(Rng& rng, std::size_t dim) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(divergen::testing::normal(rng, 0, 1));
  return v;
}

long double cosine_ld(const std::vector<float>& a, const std::vector<float>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return dot / std::sqrt(na * nb);
}

}  // namespace

TEST_CASE("cosine similarity") {
  const std::vector<float> v{1, 2, 3}, o{0, 3, -2}, z{0, 0, 0}, shorter{1, 2};
  CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(v, o) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(v, z), ValidationError);
  CHECK_THROWS_AS(cosine_similarity(v, shorter), ValidationError);

  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_vec(rng, 64), b = random_vec(rng, 64);
    CHECK(std::abs(cosine_similarity(a, b) - static_cast<double>(cosine_ld(a, b))) <= 1e-12);
  }
}

TEST_CASE("inter-similarity") {
  const std::vector<float> v{1, 0, 2};
  const std::vector<std::vector<float>> one{normalized(v)};
  CHECK(inter_similarity(1, 1, v, one).value.value() == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<float> neg{-1, 0, -2};
  const std::vector<std::vector<float>> pair{normalized(v), normalized(neg)};
  CHECK(std::abs(*inter_similarity(1, 1, v, pair).value) <= 1e-15);

  const auto none = inter_similarity(1, 1, v, {});
  CHECK_FALSE(none.value.has_value());
  CHECK(none.reference_count == 0);

  Rng rng(2);
  std::vector<std::vector<float>> refs;
  for (int i = 0; i < 50; ++i) refs.push_back(random_vec(rng, 32));
  const auto gen = random_vec(rng, 32);
  long double expect = 0;
  for (const auto& r : refs) expect += cosine_ld(gen, r);
  CHECK(std::abs(*inter_similarity(1, 1, gen, refs).value - static_cast<double>(expect / 50)) <= 1e-12);
}

TEST_CASE("threshold is inclusive at the boundary") {
  const std::vector<SimilarityRecord> recs{{1, 1, SimilarityMetric::inter_similarity, 0.59, 3},
                                           {2, 1, SimilarityMetric::inter_similarity, 0.60, 3},
                                           {3, 1, SimilarityMetric::inter_similarity, std::nullopt, 0}};
  const auto d = apply_threshold_filter(recs, 0.6);
  CHECK_FALSE(d[0].kept);
  CHECK(d[0].reason == FilterReason::below_threshold);
  CHECK(d[1].kept);
  CHECK(d[2].kept);
  CHECK(d[2].reason == FilterReason::no_references);
}

TEST_CASE("planted fixture: exactly the 10 low-similarity images are filtered") {
  Rng rng(90);
  const std::size_t dim = 48;
  const auto anchor = normalized(random_vec(rng, dim));
  ReferenceEmbeddingIndex index(dim);
  for (int i = 0; i < 8; ++i) {
    auto r = anchor;
    for (auto& x : r) x += static_cast<float>(0.05 * divergen::testing::normal(rng, 0, 1));
    index.add(1, r);
  }
  std::vector<GeneratedEmbedding> gen;
  std::set<Id> planted_low;
  for (Id id = 1; id <= 100; ++id) {
    std::vector<float> e;
    if (id % 10 == 0) {
      // Orthogonal to the anchor plus a little noise.
      e = random_vec(rng, dim);
      double dot = 0;
      for (std::size_t i = 0; i < dim; ++i) dot += e[i] * anchor[i];
      for (std::size_t i = 0; i < dim; ++i) e[i] -= static_cast<float>(dot * anchor[i]);
      planted_low.insert(id);
    } else {
      e = anchor;
      for (auto& x : e) x += static_cast<float>(0.03 * divergen::testing::normal(rng, 0, 1));
    }
    gen.push_back({id, 1, e});
  }
  const auto decisions = apply_threshold_filter(inter_similarity_batch(gen, index), 0.6);
  std::set<Id> removed;
  for (const auto& d : decisions)
    if (!d.kept) removed.insert(d.image_id);
  CHECK(removed == planted_low);
}

TEST_CASE("scale invariance and threshold monotonicity") {
  Rng rng(7);
  ReferenceEmbeddingIndex index(16);
  for (int i = 0; i < 5; ++i) index.add(1, random_vec(rng, 16));
  std::vector<GeneratedEmbedding> gen, scaled;
  for (Id id = 1; id <= 200; ++id) {
    auto e = random_vec(rng, 16);
    gen.push_back({id, 1, e});
    const float k = static_cast<float>(std::ldexp(1.0, static_cast<int>(rng.below(20)) - 10));
    for (auto& x : e) x *= k;
    scaled.push_back({id, 1, e});
  }
  const auto a = inter_similarity_batch(gen, index);
  const auto b = inter_similarity_batch(scaled, index);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].value == doctest::Approx(*b[i].value).epsilon(1e-12));

  std::size_t prev = a.size() + 1;
  for (double t = -1.0; t <= 1.0; t += 0.05) {
    std::size_t kept = 0;
    for (const auto& d : apply_threshold_filter(a, t)) kept += d.kept;
    CHECK(kept <= prev);
    prev = kept;
  }
}

TEST_CASE("reference crop preparation") {
  Rng rng(3);
  const RgbImage img = divergen::testing::random_image(rng, 200, 240);
  BitMask m(200, 240);
  for (int r = 60; r < 100; ++r)
    for (int c = 50; c < 170; ++c)
      if ((r + c) % 3) m.set(r, c);
  const InstanceAnnotation ann = make_annotation(1, 1, 1, m, Provenance::annotated);
  const RgbImage crop = prepare_reference_crop(img, ann);
  CHECK(crop.width() == ann.bbox.w);
  CHECK(ann.bbox.w == 120);
  for (int r = 0; r < crop.height(); ++r)
    for (int c = 0; c < crop.width(); ++c)
      if (m.at(ann.bbox.y + r, ann.bbox.x + c)) CHECK(crop.at(r, c) == img.at(ann.bbox.y + r, ann.bbox.x + c));

  BitMask small(200, 240);
  for (int r = 90; r < 110; ++r)
    for (int c = 100; c < 130; ++c) small.set(r, c);
  const auto small_ann = make_annotation(2, 1, 1, small, Provenance::annotated);
  CHECK(prepare_reference_crop(img, small_ann).width() == 80);

  const auto full = make_annotation(3, 1, 1, BitMask(200, 240, true), Provenance::annotated);
  CHECK(prepare_reference_crop(img, full) == img);
}

TEST_CASE("clip score ingestion") {
  TempDir dir("clip");
  divergen::testing::write_text(dir / "s.json",
                                R"([{"image_id": 1, "score": 0.3}, {"image_id": 2, "score": 0.9},)"
                                R"( {"image_id": 3, "score": 0.0}, {"image_id": 4, "score": 1.7}, {"score": 2}])");
  const auto got = ingest_clip_scores(dir / "s.json", {{1, 10}, {2, 20}});
  CHECK(got.records.size() == 3);
  for (const auto& r : got.records) CHECK(r.metric == SimilarityMetric::clip_score);
  CHECK(got.records[0].category_id == 10);
  CHECK(got.records[2].category_id == 0);
  REQUIRE(got.rejected.size() == 2);
  CHECK(got.rejected[0].find("image_id 4") != std::string::npos);

  divergen::testing::write_text(dir / "bad.json", R"({"image_id": 1})");
  CHECK_THROWS_AS(ingest_clip_scores(dir / "bad.json"), FormatError);
}

TEST_CASE("decision lines") {
  TempDir dir("dec");
  write_decisions_jsonl({{5, SimilarityMetric::inter_similarity, 0.25, false, FilterReason::below_threshold}},
                        dir / "d.jsonl");
  std::ifstream in(dir / "d.jsonl");
  std::string line;
  std::getline(in, line);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["image_id"] == 5);
  CHECK(j["kept"] == false);
  CHECK(j["reason"] == "below_threshold");
  CHECK(j["metric"] == "inter_similarity");
  CHECK(parse_metric("clip_score") == SimilarityMetric::clip_score);
}
