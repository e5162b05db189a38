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

#include "divergen/reference.hpp"
#include "support.hpp"

using namespace divergen;

TEST_CASE("blur: parallel equals reference") {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const int h = 1 + rng.below(120), w = 1 + rng.below(120);
    const RgbImage img = divergen::testing::random_image(rng, h, w);
    const BitMask m = divergen::testing::random_mask(rng, h, w, 0.4);
    const KernelSize k{1 + static_cast<int>(rng.below(15)), 1 + static_cast<int>(rng.below(15))};
    CHECK(box_blur_outside_mask(img, m, k) == reference::box_blur_outside_mask(img, m, k));
  }
}

TEST_CASE("composite: parallel equals reference") {
  Rng rng(2);
  const InstanceStore store = divergen::testing::random_instance_store(rng, 10, 40);
  std::vector<RgbImage> bases;
  std::vector<PastePlan> plans;
  for (int t = 0; t < 40; ++t) {
    bases.push_back(divergen::testing::random_image(rng, 64, 80));
    plans.push_back(sample_paste_plan(store, {t + 1, 80, 64, "x"}, 20, {}, rng.next_u64()));
  }
  const auto a = composite_batch(bases, plans, store);
  const auto b = reference::composite_batch(bases, plans, store);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].image == b[i].image);
    CHECK(a[i].annotations == b[i].annotations);
  }
}

TEST_CASE("energy: parallel equals reference") {
  Rng rng(3);
  std::vector<LogitRecord> recs;
  for (int i = 0; i < 500; ++i) {
    LogitRecord r{std::to_string(i), std::vector<double>(1 + rng.below(100))};
    for (auto& x : r.logits) x = rng.uniform(-20, 20);
    recs.push_back(std::move(r));
  }
  CHECK(energy_batch(recs, {0.9}) == reference::energy_batch(recs, {0.9}));
}

TEST_CASE("inter-similarity: parallel equals reference") {
  Rng rng(4);
  ReferenceEmbeddingIndex index(24);
  std::vector<GeneratedEmbedding> gen;
  auto vec = [&] {
    std::vector<float> v(24);
    for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
    return v;
  };
  for (Id c = 1; c <= 4; ++c)
    for (int k = 0; k < 10; ++k) index.add(c, vec());
  for (Id i = 1; i <= 300; ++i) gen.push_back({i, 1 + static_cast<Id>(i % 5), vec()});
  const auto a = inter_similarity_batch(gen, index);
  const auto b = reference::inter_similarity_batch(gen, index);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].reference_count == b[i].reference_count);
  }
}

TEST_CASE("k-means: result independent of thread count") {
  Rng rng(5);
  std::vector<Point2> pts;
  for (int i = 0; i < 3000; ++i) pts.push_back({rng.uniform(0, 500), rng.uniform(0, 500)});
  const auto a = kmeanspp_centers(pts, 8, 11);
  const auto b = kmeanspp_centers(pts, 8, 11);
  CHECK(a.centers == b.centers);
  const auto assign = reference::assign_to_centers(pts, a.centers);
  // Every point is at least as close to its assigned center as to any other.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto d = [&](const Point2& c) { return (pts[i].x - c.x) * (pts[i].x - c.x) + (pts[i].y - c.y) * (pts[i].y - c.y); };
    for (const auto& c : a.centers) CHECK(d(a.centers[assign[i]]) <= d(c));
  }
}
