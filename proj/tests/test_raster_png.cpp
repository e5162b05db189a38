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

#include "divergen/error.hpp"
#include "divergen/png_io.hpp"
#include "support.hpp"

using namespace divergen;
using divergen::testing::TempDir;

TEST_CASE("rasters start filled and compare by value") {
  BitMask m(3, 4);
  CHECK(m.count() == 0);
  m.set(2, 3);
  CHECK(m.at(2, 3));
  CHECK(m.count() == 1);
  CHECK_FALSE(m == BitMask(3, 4));
  CHECK(BitMask(2, 2, true).count() == 4);

  RgbImage img(2, 3, {9, 8, 7});
  CHECK(img.at(1, 2) == Rgb{9, 8, 7});
  img.set(0, 0, {1, 2, 3});
  CHECK(img.data()[0] == 1);
  CHECK(img.data()[2] == 3);
}

TEST_CASE("RGB PNG round trip is exact and byte-stable") {
  TempDir dir("png");
  Rng rng(11);
  const RgbImage img = divergen::testing::random_image(rng, 17, 23);
  write_png(dir / "a.png", img);
  write_png(dir / "b.png", img);
  CHECK(read_png(dir / "a.png") == img);
  CHECK(divergen::testing::read_bytes(dir / "a.png") == divergen::testing::read_bytes(dir / "b.png"));
}

TEST_CASE("mask and gray PNGs round trip") {
  TempDir dir("pngmask");
  Rng rng(5);
  const BitMask m = divergen::testing::random_mask(rng, 9, 14, 0.4);
  write_mask_png(dir / "m.png", m);
  CHECK(read_mask_png(dir / "m.png") == m);

  GrayImage g{2, 3, {0, 10, 20, 127, 128, 255}};
  write_png_gray(dir / "g.png", g);
  const GrayImage back = read_png_gray(dir / "g.png");
  CHECK(back.height == 2);
  CHECK(back.width == 3);
  CHECK(back.data == g.data);

  const BitMask thresholded = read_mask_png(dir / "g.png");
  CHECK(thresholded.count() == 2);
  CHECK(thresholded.at(1, 1));
  CHECK(thresholded.at(1, 2));
}

TEST_CASE("reading a missing or corrupt PNG throws") {
  TempDir dir("pngbad");
  CHECK_THROWS_AS(read_png(dir / "missing.png"), Error);
  divergen::testing::write_text(dir / "junk.png", "not a png at all");
  CHECK_THROWS_AS(read_png(dir / "junk.png"), Error);
}
