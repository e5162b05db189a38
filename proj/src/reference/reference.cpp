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
#include "divergen/reference.hpp"

#include <algorithm>
#include <limits>

#include "divergen/error.hpp"

namespace divergen::reference {

RgbImage box_blur_outside_mask(const RgbImage& image, const BitMask& mask, KernelSize kernel) {
  if (!image.same_shape(mask)) throw DimensionError("blur: image and mask shapes differ");
  if (kernel.height < 1 || kernel.width < 1) throw ValidationError("blur: kernel must be >= 1");
  const int H = image.height(), W = image.width();
  RgbImage out = image;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (mask.at(r, c)) continue;
      unsigned long sum[3] = {0, 0, 0};
      unsigned long n = 0;
      for (int dr = -(kernel.height / 2); dr < kernel.height - kernel.height / 2; ++dr) {
        for (int dc = -(kernel.width / 2); dc < kernel.width - kernel.width / 2; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
          const Rgb px = image.at(rr, cc);
          for (int ch = 0; ch < 3; ++ch) sum[ch] += px[ch];
          ++n;
        }
      }
      Rgb v{};
      for (int ch = 0; ch < 3; ++ch) v[ch] = static_cast<std::uint8_t>((sum[ch] + n / 2) / n);
      out.set(r, c, v);
    }
  }
  return out;
}

std::vector<CompositeResult> composite_batch(const std::vector<RgbImage>& bases,
                                             const std::vector<PastePlan>& plans, const InstanceStore& sources) {
  if (bases.size() != plans.size()) throw ValidationError("composite_batch: bases and plans differ in length");
  std::vector<CompositeResult> out;
  out.reserve(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) out.push_back(divergen::composite(bases[i], plans[i], sources));
  return out;
}

std::vector<double> energy_batch(const std::vector<LogitRecord>& records, const EnergyConfig& config) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(divergen::energy(r, config));
  return out;
}

std::vector<SimilarityRecord> inter_similarity_batch(const std::vector<GeneratedEmbedding>& generated,
                                                     const ReferenceEmbeddingIndex& index) {
  std::vector<SimilarityRecord> out;
  out.reserve(generated.size());
  for (const auto& g : generated) {
    out.push_back(divergen::inter_similarity(g.image_id, g.category_id, g.embedding, index.references(g.category_id)));
  }
  return out;
}

std::vector<int> assign_to_centers(const std::vector<Point2>& points, const std::vector<Point2>& centers) {
  std::vector<int> out(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double dx = points[i].x - centers[k].x, dy = points[i].y - centers[k].y;
      const double d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        out[i] = static_cast<int>(k);
      }
    }
  }
  return out;
}

}  // namespace divergen::reference
