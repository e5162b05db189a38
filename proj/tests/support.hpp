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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "divergen/compositor.hpp"
#include "divergen/mask_ops.hpp"
#include "divergen/random.hpp"
#include "divergen/raster.hpp"

namespace divergen::testing {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(DIVERGEN_TEST_DATA_DIR); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("divergen-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

inline BitMask random_mask(Rng& rng, int h, int w, double density) {
  BitMask m(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) m.set(r, c, rng.uniform01() < density);
  }
  return m;
}

inline RgbImage random_image(Rng& rng, int h, int w) {
  RgbImage img(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      img.set(r, c, {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
                     static_cast<std::uint8_t>(rng.below(256))});
    }
  }
  return img;
}

/// Box-Muller over the portable generator.
inline double normal(Rng& rng, double mu, double sigma) {
  double u1 = rng.uniform01();
  while (u1 <= 0.0) u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Relative path -> bytes for every regular file below `root`.
inline std::vector<std::pair<std::string, std::string>> tree_contents(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).generic_string(), read_bytes(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}


/// Source instances of random size and shape (blobby masks, noisy colors).
inline InstanceStore random_instance_store(Rng& rng, int count, int max_side) {
  InstanceStore store;
  for (int i = 0; i < count; ++i) {
    const int h = 2 + static_cast<int>(rng.below(max_side - 1));
    const int w = 2 + static_cast<int>(rng.below(max_side - 1));
    const RgbImage img = random_image(rng, h, w);
    BitMask m(h, w);
    const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double dy = (r - cy) / (h / 2.0), dx = (c - cx) / (w / 2.0);
        m.set(r, c, dy * dy + dx * dx <= 1.0 + 0.3 * rng.uniform01());
      }
    }
    m.set(static_cast<int>(cy), static_cast<int>(cx));
    store.add("src" + std::to_string(i) + ".png", 1 + static_cast<Id>(i % 5), img, rle_encode(m));
  }
  return store;
}

}  // namespace divergen::testing
