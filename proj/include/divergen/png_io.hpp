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

#include <filesystem>

#include "divergen/raster.hpp"

namespace divergen {

/// Reads any PNG and converts it to 8-bit RGB (alpha dropped, gray expanded).
RgbImage read_png(const std::filesystem::path& path);

/// Writes RGB8 with fixed zlib settings and no time chunk, so equal
/// rasters always produce equal bytes.
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// Reads any PNG as 8-bit grayscale (RGB converted by luminance).
GrayImage read_png_gray(const std::filesystem::path& path);
void write_png_gray(const std::filesystem::path& path, const GrayImage& image);

/// Mask PNGs are 8-bit gray, 0 = unset, 255 = set. On read any value
/// >= 128 counts as set.
BitMask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const BitMask& mask);

}  // namespace divergen
