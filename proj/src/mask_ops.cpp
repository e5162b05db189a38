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
#include "divergen/mask_ops.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "divergen/error.hpp"

namespace divergen {

RleMask rle_encode(const BitMask& mask) {
  RleMask rle{mask.height(), mask.width(), {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int col = 0; col < mask.width(); ++col) {
    for (int row = 0; row < mask.height(); ++row) {
      const std::uint8_t bit = mask.at(row, col) ? 1 : 0;
      if (bit != current) {
        rle.counts.push_back(run);
        run = 0;
        current = bit;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BitMask rle_decode(const RleMask& rle) {
  if (rle.height <= 0 || rle.width <= 0) throw FormatError("RLE size must be positive");
  const std::uint64_t total = static_cast<std::uint64_t>(rle.height) * rle.width;
  const std::uint64_t sum =
      std::accumulate(rle.counts.begin(), rle.counts.end(), std::uint64_t{0});
  if (sum != total) {
    throw FormatError("RLE counts sum to " + std::to_string(sum) + ", expected " +
                      std::to_string(total));
  }
  BitMask mask(rle.height, rle.width);
  auto bits = mask.bits();
  std::uint64_t pos = 0;
  bool value = false;
  for (std::uint32_t n : rle.counts) {
    if (value) {
      for (std::uint64_t i = pos; i < pos + n; ++i) {
        const auto row = static_cast<std::size_t>(i % rle.height);
        const auto col = static_cast<std::size_t>(i / rle.height);
        bits[row * rle.width + col] = 1;
      }
    }
    pos += n;
    value = !value;
  }
  return mask;
}

std::size_t rle_area(const RleMask& rle) {
  std::size_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

BitMask invert_mask(const BitMask& mask) {
  BitMask out = mask;
  for (auto& b : out.bits()) b ^= 1;
  return out;
}

BoundingBox bbox_from_mask(const BitMask& mask) {
  int min_r = mask.height(), max_r = -1, min_c = mask.width(), max_c = -1;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(r, c)) continue;
      min_r = std::min(min_r, r);
      max_r = std::max(max_r, r);
      min_c = std::min(min_c, c);
      max_c = std::max(max_c, c);
    }
  }
  if (max_r < 0) throw EmptyMaskError("bbox of an empty mask");
  return {min_c, min_r, max_c - min_c + 1, max_r - min_r + 1};
}

double mask_iou(const BitMask& a, const BitMask& b) {
  if (!a.same_shape(b)) throw DimensionError("mask_iou: shape mismatch");
  std::size_t inter = 0, uni = 0;
  auto ab = a.bits();
  auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    inter += ab[i] & bb[i];
    uni += ab[i] | bb[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

RgbImage box_blur_outside_mask(const RgbImage& image, const BitMask& mask, KernelSize kernel) {
  if (!image.same_shape(mask)) throw DimensionError("blur: image and mask shapes differ");
  if (kernel.height < 1 || kernel.width < 1) throw ValidationError("blur: kernel must be >= 1");
  const int H = image.height();
  const int W = image.width();
  const std::size_t stride = static_cast<std::size_t>(W + 1) * 3;

  // Summed-area table with a zero first row and column.
  std::vector<std::uint64_t> sat(static_cast<std::size_t>(H + 1) * stride, 0);
  auto src = image.data();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < H; ++r) {
    std::uint64_t acc[3] = {0, 0, 0};
    std::uint64_t* row = sat.data() + static_cast<std::size_t>(r + 1) * stride;
    const std::uint8_t* in = src.data() + static_cast<std::size_t>(r) * W * 3;
    for (int c = 0; c < W; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        acc[ch] += in[c * 3 + ch];
        row[(c + 1) * 3 + ch] = acc[ch];
      }
    }
  }
#pragma omp parallel for schedule(static)
  for (std::size_t col = 3; col < stride; ++col) {
    for (int r = 1; r <= H; ++r) sat[r * stride + col] += sat[(r - 1) * stride + col];
  }

  const int up = kernel.height / 2;
  const int left = kernel.width / 2;
  RgbImage out = image;
  auto dst = out.data();
  auto bits = mask.bits();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < H; ++r) {
    const int r0 = std::max(0, r - up);
    const int r1 = std::min(H, r - up + kernel.height);
    for (int c = 0; c < W; ++c) {
      if (bits[static_cast<std::size_t>(r) * W + c]) continue;
      const int c0 = std::max(0, c - left);
      const int c1 = std::min(W, c - left + kernel.width);
      const std::uint64_t n = static_cast<std::uint64_t>(r1 - r0) * (c1 - c0);
      for (int ch = 0; ch < 3; ++ch) {
        const std::uint64_t s = sat[r1 * stride + c1 * 3 + ch] - sat[r0 * stride + c1 * 3 + ch] -
                                sat[r1 * stride + c0 * 3 + ch] + sat[r0 * stride + c0 * 3 + ch];
        dst[(static_cast<std::size_t>(r) * W + c) * 3 + ch] =
            static_cast<std::uint8_t>((s + n / 2) / n);
      }
    }
  }
  return out;
}

namespace {

// Grows [lo, lo+len) to [lo-before, lo+len+after), shifts it back inside
// [0, limit) when it crosses an edge, then clamps.
std::pair<int, int> grow_span(int lo, int len, int before, int after, int limit) {
  int a = lo - before;
  int b = lo + len + after;
  if (a < 0) {
    b -= a;
    a = 0;
  }
  if (b > limit) {
    a -= b - limit;
    b = limit;
  }
  a = std::max(a, 0);
  return {a, b};
}

void require_inside(const BoundingBox& box, int width, int height) {
  if (box.x < 0 || box.y < 0 || box.w < 1 || box.h < 1 || box.x + box.w > width ||
      box.y + box.h > height) {
    throw ValidationError("box outside image");
  }
}

}  // namespace

BoundingBox padded_box(const BoundingBox& box, int image_width, int image_height, int min_width) {
  require_inside(box, image_width, image_height);
  if (box.w >= min_width) return box;
  const int extra = min_width - box.w;
  const int before = extra / 2;
  const int after = extra - before;
  auto [x0, x1] = grow_span(box.x, box.w, before, after, image_width);
  auto [y0, y1] = grow_span(box.y, box.h, before, after, image_height);
  return {x0, y0, x1 - x0, y1 - y0};
}

RgbImage pad_and_crop_region(const RgbImage& image, const BoundingBox& box, int min_width) {
  return crop_image(image, padded_box(box, image.width(), image.height(), min_width));
}

RgbImage crop_image(const RgbImage& image, const BoundingBox& box) {
  require_inside(box, image.width(), image.height());
  RgbImage out(box.h, box.w);
  auto src = image.data();
  auto dst = out.data();
  for (int r = 0; r < box.h; ++r) {
    const auto* from = src.data() + (static_cast<std::size_t>(box.y + r) * image.width() + box.x) * 3;
    std::copy(from, from + static_cast<std::size_t>(box.w) * 3,
              dst.data() + static_cast<std::size_t>(r) * box.w * 3);
  }
  return out;
}

BitMask crop_mask(const BitMask& mask, const BoundingBox& box) {
  require_inside(box, mask.width(), mask.height());
  BitMask out(box.h, box.w);
  for (int r = 0; r < box.h; ++r) {
    for (int c = 0; c < box.w; ++c) out.set(r, c, mask.at(box.y + r, box.x + c));
  }
  return out;
}

BitMask largest_component(const BitMask& mask) {
  const int H = mask.height();
  const int W = mask.width();
  std::vector<int> label(mask.size(), -1);
  std::vector<std::size_t> areas;
  std::vector<std::size_t> stack;
  auto bits = mask.bits();
  for (std::size_t start = 0; start < bits.size(); ++start) {
    if (!bits[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(areas.size());
    std::size_t area = 0;
    stack.push_back(start);
    label[start] = id;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++area;
      const int r = static_cast<int>(p / W);
      const int c = static_cast<int>(p % W);
      const std::size_t nbr[4] = {p - W, p + W, p - 1, p + 1};
      const bool ok[4] = {r > 0, r + 1 < H, c > 0, c + 1 < W};
      for (int k = 0; k < 4; ++k) {
        if (ok[k] && bits[nbr[k]] && label[nbr[k]] < 0) {
          label[nbr[k]] = id;
          stack.push_back(nbr[k]);
        }
      }
    }
    areas.push_back(area);
  }
  BitMask out(H, W);
  if (areas.empty()) return out;
  const int best = static_cast<int>(std::max_element(areas.begin(), areas.end()) - areas.begin());
  auto ob = out.bits();
  for (std::size_t i = 0; i < ob.size(); ++i) ob[i] = label[i] == best ? 1 : 0;
  return out;
}

}  // namespace divergen
