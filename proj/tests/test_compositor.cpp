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

#include "divergen/compositor.hpp"
#include "divergen/error.hpp"
#include "divergen/png_io.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace divergen;
using divergen::testing::TempDir;

namespace {

ImageRecord target(int w, int h) { return {1, w, h, "t.png", ImageSource::generative}; }

}  // namespace

TEST_CASE("instance store") {
  InstanceStore store;
  BitMask m(10, 12);
  m.set(2, 3);
  m.set(4, 7);
  Rng rng(1);
  const RgbImage img = divergen::testing::random_image(rng, 10, 12);
  store.add("a.png", 3, img, rle_encode(m));
  const auto& s = store.at(0);
  CHECK(s.mask.height() == 3);
  CHECK(s.mask.width() == 5);
  CHECK(s.patch.at(0, 0) == img.at(2, 3));
  CHECK(s.patch.at(2, 4) == img.at(4, 7));
  CHECK_THROWS_AS(store.add("b.png", 1, img, rle_encode(BitMask(10, 12))), EmptyMaskError);
  CHECK_THROWS_AS(store.add("c.png", 1, img, rle_encode(BitMask(9, 12, true))), DimensionError);
}

TEST_CASE("nearest-neighbour scaling") {
  Rng rng(2);
  const BitMask m = divergen::testing::random_mask(rng, 7, 9, 0.5);
  const RgbImage p = divergen::testing::random_image(rng, 7, 9);
  const auto [m1, p1] = scale_mask_and_patch(m, p, 1.0);
  CHECK(m1 == m);
  CHECK(p1 == p);

  BitMask two(2, 2);
  two.set(0, 1);
  const auto [m2, p2] = scale_mask_and_patch(two, RgbImage(2, 2), 2.0);
  BitMask expect(4, 4);
  for (int r = 0; r < 2; ++r)
    for (int c = 2; c < 4; ++c) expect.set(r, c);
  CHECK(m2 == expect);

  for (int t = 0; t < 200; ++t) {
    const int h = 1 + rng.below(30), w = 1 + rng.below(30);
    const BitMask mm = divergen::testing::random_mask(rng, h, w, 0.5);
    const RgbImage pp = divergen::testing::random_image(rng, h, w);
    const double s = rng.uniform(0.1, 2.0);
    const auto got = scale_mask_and_patch(mm, pp, s);
    const auto want = oracle::index_map_scale(mm, pp, s);
    CHECK(got.first == want.first);
    CHECK(got.second == want.second);
  }
}

TEST_CASE("paste plan sampling") {
  Rng rng(3);
  const InstanceStore store = divergen::testing::random_instance_store(rng, 12, 40);
  CHECK(sample_paste_plan(store, target(128, 96), 0, {}, 5).instances.empty());

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const PastePlan plan = sample_paste_plan(store, target(128, 96), 20, {0.1, 2.0}, seed);
    REQUIRE(plan.instances.size() <= 20);
    std::vector<int> z;
    for (const auto& pi : plan.instances) {
      CHECK(pi.scale >= 0.1);
      CHECK(pi.scale <= 2.0);
      CHECK(pi.category_id == store.at(pi.source_index).category_id);
      z.push_back(pi.z_order);
    }
    std::sort(z.begin(), z.end());
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == static_cast<int>(i));
  }
  const PastePlan a = sample_paste_plan(store, target(128, 96), 20, {}, 77);
  const PastePlan b = sample_paste_plan(store, target(128, 96), 20, {}, 77);
  REQUIRE(a.instances.size() == b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].x == b.instances[i].x);
    CHECK(a.instances[i].scale == b.instances[i].scale);
  }
}

TEST_CASE("every planned paste shows at least one mask pixel on the canvas") {
  Rng rng(4);
  const InstanceStore store = divergen::testing::random_instance_store(rng, 6, 60);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const PastePlan plan = sample_paste_plan(store, target(20, 16), 20, {0.1, 2.0}, seed);
    for (const auto& pi : plan.instances) {
      const auto [m, p] = scale_mask_and_patch(store.at(pi.source_index).mask, store.at(pi.source_index).patch,
                                               pi.scale);
      bool inside = false;
      for (int r = 0; r < m.height() && !inside; ++r)
        for (int c = 0; c < m.width() && !inside; ++c)
          inside = m.at(r, c) && pi.y + r >= 0 && pi.y + r < 16 && pi.x + c >= 0 && pi.x + c < 20;
      CHECK(inside);
    }
  }
}

TEST_CASE("empty plan leaves the base untouched") {
  Rng rng(5);
  const RgbImage base = divergen::testing::random_image(rng, 30, 40);
  InstanceStore store;
  const CompositeResult r = composite(base, {1, 40, 30, {}}, store);
  CHECK(r.image == base);
  CHECK(r.annotations.empty());
}

TEST_CASE("single paste fully inside") {
  Rng rng(6);
  const RgbImage src = divergen::testing::random_image(rng, 20, 20);
  BitMask m(20, 20);
  for (int r = 5; r < 12; ++r)
    for (int c = 4; c < 15; ++c) m.set(r, c, (r * c) % 4 != 0);
  InstanceStore store;
  store.add("s.png", 9, src, rle_encode(m));
  const RgbImage base(50, 50, {255, 255, 255});
  const PastePlan plan{1, 50, 50, {{0, 9, 1.0, 10, 20, 0}}};
  const CompositeResult r = composite(base, plan, store);
  REQUIRE(r.annotations.size() == 1);
  const BitMask vis = rle_decode(r.annotations[0].mask);
  const auto& s = store.at(0);
  for (int y = 0; y < 50; ++y)
    for (int x = 0; x < 50; ++x) {
      const int sr = y - 20, sc = x - 10;
      const bool in = sr >= 0 && sc >= 0 && sr < s.mask.height() && sc < s.mask.width() && s.mask.at(sr, sc);
      CHECK(vis.at(y, x) == in);
      CHECK(r.image.at(y, x) == (in ? s.patch.at(sr, sc) : base.at(y, x)));
    }
  CHECK(r.annotations[0].provenance == Provenance::pasted);
  CHECK(r.annotations[0].category_id == 9);
}

TEST_CASE("overlapping pastes: the lower one loses the overlap") {
  InstanceStore store;
  store.add("a.png", 1, RgbImage(10, 10, {255, 0, 0}), rle_encode(BitMask(10, 10, true)));
  store.add("b.png", 2, RgbImage(10, 10, {0, 0, 255}), rle_encode(BitMask(10, 10, true)));
  const RgbImage base(30, 30);
  const PastePlan plan{1, 30, 30, {{0, 1, 1.0, 5, 5, 0}, {1, 2, 1.0, 10, 10, 1}}};
  const CompositeResult r = composite(base, plan, store);
  REQUIRE(r.annotations.size() == 2);
  CHECK(r.annotations[0].area == 100 - 25);
  CHECK(r.annotations[1].area == 100);
  CHECK(oracle::check_composite(base, plan, store, r).empty());

  // Fully covered instance disappears.
  const PastePlan hidden{1, 30, 30, {{0, 1, 1.0, 10, 10, 0}, {1, 2, 1.0, 10, 10, 1}}};
  const CompositeResult h = composite(base, hidden, store);
  REQUIRE(h.annotations.size() == 1);
  CHECK(h.annotations[0].category_id == 2);
}

TEST_CASE("random plans satisfy the painter properties, serial and batched") {
  Rng rng(7);
  const InstanceStore store = divergen::testing::random_instance_store(rng, 15, 48);
  std::vector<RgbImage> bases;
  std::vector<PastePlan> plans;
  for (int t = 0; t < 60; ++t) {
    const int w = 16 + rng.below(80), h = 16 + rng.below(80);
    bases.push_back(divergen::testing::random_image(rng, h, w));
    plans.push_back(sample_paste_plan(store, {t + 1, w, h, "x"}, 20, {0.1, 2.0}, rng.next_u64()));
  }
  const auto batch = composite_batch(bases, plans, store);
  REQUIRE(batch.size() == plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const std::string why = oracle::check_composite(bases[i], plans[i], store, batch[i]);
    CHECK_MESSAGE(why.empty(), "plan ", i, ": ", why);
  }
}

TEST_CASE("occluded base annotations") {
  InstanceStore store;
  store.add("a.png", 1, RgbImage(10, 10, {255, 0, 0}), rle_encode(BitMask(10, 10, true)));
  const RgbImage base(30, 30);
  CompositeResult r = composite(base, {1, 30, 30, {{0, 1, 1.0, 0, 0, 0}}}, store);
  BitMask under(30, 30), hidden(30, 30);
  for (int y = 5; y < 15; ++y)
    for (int x = 5; x < 15; ++x) under.set(y, x);
  for (int y = 2; y < 6; ++y)
    for (int x = 2; x < 6; ++x) hidden.set(y, x);
  add_occluded_base_annotations(r, {make_annotation(1, 1, 4, under, Provenance::annotated),
                                    make_annotation(2, 1, 5, hidden, Provenance::annotated)});
  REQUIRE(r.annotations.size() == 2);
  const auto& kept = r.annotations[0].provenance == Provenance::annotated ? r.annotations[0] : r.annotations[1];
  CHECK(kept.category_id == 4);
  CHECK(kept.area == 100 - 25);
}

TEST_CASE("emitting the augmented dataset") {
  TempDir dir("emit");
  InstanceStore store;
  store.add("a.png", 1, RgbImage(6, 6, {255, 0, 0}), rle_encode(BitMask(6, 6, true)));
  const RgbImage base(20, 20);
  const PastePlan plan{7, 20, 20, {{0, 1, 1.0, 0, 0, 0}, {0, 1, 1.0, 7, 7, 1}, {0, 1, 1.0, 14, 14, 2}}};
  const auto result = composite(base, plan, store);
  const DatasetBundle b = emit_augmented_dataset({result}, {{1, "thing"}}, dir.path());
  CHECK(b.images.size() == 1);
  CHECK(b.annotations.size() == 3);
  CHECK(b.images[0].source == ImageSource::composite);
  CHECK(load_dataset(dir / "dataset.json") == b);
  CHECK(read_png(resolve_uri(dir / "dataset.json", b.images[0].uri)) == result.image);
}
