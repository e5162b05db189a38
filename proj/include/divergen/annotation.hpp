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

#include "divergen/backend.hpp"
#include "divergen/raster.hpp"

namespace divergen {

/// (0,0), (w-1,0), (0,h-1), (w-1,h-1), labeled foreground: the predictor
/// is asked for the region containing the corners, i.e. the background.
std::vector<PointPrompt> corner_prompts(int width, int height);

/// Inverts the predicted background and keeps the largest 4-connected
/// foreground component (holes inside it are kept). Throws EmptyMaskError
/// when the background covers the whole image.
BitMask background_to_instance_mask(const BitMask& background);

class AttentionMap {
 public:
  /// Throws DimensionError for non-positive sizes and ValidationError for
  /// negative or non-finite values.
  AttentionMap(int height, int width, std::vector<double> values);

  /// Gray PNG as attention map, values 0..255.
  static AttentionMap from_gray(const GrayImage& gray);

  int height() const { return height_; }
  int width() const { return width_; }
  double at(int row, int col) const { return values_[static_cast<std::size_t>(row) * width_ + col]; }
  const std::vector<double>& values() const { return values_; }

 private:
  int height_;
  int width_;
  std::vector<double> values_;
};

/// Bits where value >= fraction * max. Throws ValidationError for an
/// all-zero map or a fraction outside (0, 1).
BitMask foreground_region_from_attention(const AttentionMap& map, double threshold_fraction);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct KMeansResult {
  std::vector<Point2> centers;
  int iterations = 0;
  /// Set when k exceeded the number of distinct points; centers then holds
  /// the distinct points.
  bool degenerate = false;
};

/// k-means++ seeding only: first center uniform over points, each next one
/// drawn with probability proportional to the squared distance to the
/// nearest chosen center. Returns indices into `points`.
std::vector<std::size_t> kmeanspp_seed_indices(const std::vector<Point2>& points, int k,
                                               std::uint64_t seed);

/// Seeding followed by Lloyd iterations until no center moves by 1e-6 or
/// more, or 100 iterations. The assignment step is OpenMP-parallel;
/// accumulation runs in point order, so results do not depend on the
/// thread count.
KMeansResult kmeanspp_centers(const std::vector<Point2>& points, int k, std::uint64_t seed);

/// min(n, |centers|) distinct centers without replacement, rounded to
/// pixels, labeled foreground, sorted by (x, y).
std::vector<PointPrompt> sample_point_prompts(const std::vector<Point2>& centers, int n,
                                              std::uint64_t seed);

struct MaskCandidate {
  BitMask mask;
  double score = 0.0;
};

/// Index of the highest score; the lowest index wins ties.
std::size_t select_best_mask(const std::vector<MaskCandidate>& candidates);

/// Mean pairwise IoU. Throws ValidationError on a length mismatch.
double evaluate_masks_miou(const std::vector<BitMask>& predicted, const std::vector<BitMask>& truth);

struct ForegroundPromptConfig {
  double threshold_fraction = 0.5;
  int clusters = 8;
  int points = 3;
};

/// Attention map -> region -> k-means++ centers -> sampled point prompts.
std::vector<PointPrompt> foreground_point_prompts(const AttentionMap& map,
                                                  const ForegroundPromptConfig& config,
                                                  std::uint64_t seed);

}  // namespace divergen
