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
#include "divergen/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "divergen/error.hpp"

namespace divergen {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error("cannot open " + path.string());
  return f;
}

[[noreturn]] void on_png_error(png_structp, png_const_charp msg) { throw FormatError(msg); }
void on_png_warning(png_structp, png_const_charp) {}

struct Decoded {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

// Decodes to 8-bit RGB (want_gray=false) or 8-bit gray (want_gray=true).
Decoded decode(const std::filesystem::path& path, bool want_gray) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("not a PNG file: " + path.string());
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                           on_png_warning);
  if (!png) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};

  Decoded out;
  try {
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    const bool src_gray = (color & PNG_COLOR_MASK_COLOR) == 0;
    if (want_gray && !src_gray) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (!want_gray && src_gray) png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    out.pixels.resize(stride * static_cast<std::size_t>(out.height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
    for (int r = 0; r < out.height; ++r) rows[r] = out.pixels.data() + stride * r;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

void encode(const std::filesystem::path& path, int height, int width, int channels,
            std::span<const std::uint8_t> pixels) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                            on_png_warning);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};

  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int r = 0; r < height; ++r) {
    png_write_row(png, const_cast<png_bytep>(pixels.data() + stride * r));
  }
  png_write_end(png, nullptr);
}

}  // namespace

RgbImage read_png(const std::filesystem::path& path) {
  Decoded d = decode(path, false);
  RgbImage img(d.height, d.width);
  std::copy(d.pixels.begin(), d.pixels.end(), img.data().begin());
  return img;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  encode(path, image.height(), image.width(), 3, image.data());
}

GrayImage read_png_gray(const std::filesystem::path& path) {
  Decoded d = decode(path, true);
  return GrayImage{d.height, d.width, std::move(d.pixels)};
}

void write_png_gray(const std::filesystem::path& path, const GrayImage& image) {
  encode(path, image.height, image.width, 1, image.data);
}

BitMask read_mask_png(const std::filesystem::path& path) {
  GrayImage g = read_png_gray(path);
  BitMask m(g.height, g.width);
  auto bits = m.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = g.data[i] >= 128 ? 1 : 0;
  return m;
}

void write_mask_png(const std::filesystem::path& path, const BitMask& mask) {
  GrayImage g{mask.height(), mask.width(), std::vector<std::uint8_t>(mask.size())};
  auto bits = mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) g.data[i] = bits[i] ? 255 : 0;
  write_png_gray(path, g);
}

}  // namespace divergen
