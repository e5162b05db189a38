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
#include <vector>

#include "divergen/raster.hpp"

namespace divergen {

/// COCO uncompressed RLE: column-major run lengths, first run counts zeros.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const RleMask&, const RleMask&) = default;
};

struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

RleMask rle_encode(const BitMask& mask);

/// Throws FormatError when the counts do not sum to height * width.
BitMask rle_decode(const RleMask& rle);

/// Pixel count of the decoded mask without decoding it.
std::size_t rle_area(const RleMask& rle);

BitMask invert_mask(const BitMask& mask);

/// Tight box around the set pixels. Throws EmptyMaskError on an empty mask.
BoundingBox bbox_from_mask(const BitMask& mask);

/// |a & b| / |a | b|, 1.0 when both are empty. Throws DimensionError when
/// shapes differ.
double mask_iou(const BitMask& a, const BitMask& b);

struct KernelSize {
  int height = 10;
  int width = 10;
};

/// Replaces every pixel outside the mask by the mean of its kernel window
/// over the original image. Windows are truncated at the border and the
/// mean is taken over in-bounds pixels only, rounded half up. Pixels inside
/// the mask are copied unchanged. OpenMP-parallel over rows.
RgbImage box_blur_outside_mask(const RgbImage& image, const BitMask& mask, KernelSize kernel);

/// Window grown to at least `min_width` wide, keeping the box centered, with
/// the height grown by the same per-side amounts. A window that crosses an
/// image edge is shifted back inside and then clamped to the image.
BoundingBox padded_box(const BoundingBox& box, int image_width, int image_height, int min_width);

/// Crops `padded_box(box, ...)` out of the image. Throws ValidationError
/// when the box is not inside the image.
RgbImage pad_and_crop_region(const RgbImage& image, const BoundingBox& box, int min_width);

RgbImage crop_image(const RgbImage& image, const BoundingBox& box);
BitMask crop_mask(const BitMask& mask, const BoundingBox& box);

/// Keeps only the largest 4-connected component of set pixels. Equal areas
/// resolve to the component reached first in row-major order.
BitMask largest_component(const BitMask& mask);

}  // namespace divergen
