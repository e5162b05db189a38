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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace divergen {

/// Binary mask, row-major, one byte per pixel holding 0 or 1.
/// Dimensions are fixed at construction.
class BitMask {
 public:
  BitMask() = default;
  BitMask(int height, int width, bool fill = false);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
  void set(int row, int col, bool value = true) { bits_[index(row, col)] = value ? 1 : 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }

  /// Number of set pixels.
  std::size_t count() const;

  bool same_shape(const BitMask& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const BitMask&, const BitMask&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major, interleaved channels.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int height, int width, Rgb fill = {0, 0, 0});

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return data_.empty(); }

  Rgb at(int row, int col) const {
    const std::size_t i = offset(row, col);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int row, int col, Rgb px) {
    const std::size_t i = offset(row, col);
    data_[i] = px[0];
    data_[i + 1] = px[1];
    data_[i + 2] = px[2];
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  bool same_shape(const BitMask& m) const { return height_ == m.height() && width_ == m.width(); }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t offset(int row, int col) const {
    return 3 * (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(col));
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Single-channel 8-bit raster (attention maps, mask PNGs).
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;
};

}  // namespace divergen
