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
#include "divergen/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "divergen/error.hpp"
#include "divergen/mask_ops.hpp"
#include "divergen/random.hpp"

namespace divergen {

std::vector<PointPrompt> corner_prompts(int width, int height) {
  if (width < 1 || height < 1) throw DimensionError("corner_prompts: dimensions must be >= 1");
  return {{0, 0, PointLabel::foreground},
          {width - 1, 0, PointLabel::foreground},
          {0, height - 1, PointLabel::foreground},
          {width - 1, height - 1, PointLabel::foreground}};
}

BitMask background_to_instance_mask(const BitMask& background) {
  if (background.count() == background.size()) {
    throw EmptyMaskError("background covers the whole image; no foreground");
  }
  return largest_component(invert_mask(background));
}

AttentionMap::AttentionMap(int height, int width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height <= 0 || width <= 0) throw DimensionError("attention map dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("attention map value count does not match its dimensions");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("attention values must be finite and >= 0");
  }
}

AttentionMap AttentionMap::from_gray(const GrayImage& gray) {
  return AttentionMap(gray.height, gray.width, std::vector<double>(gray.data.begin(), gray.data.end()));
}

BitMask foreground_region_from_attention(const AttentionMap& map, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw ValidationError("threshold_fraction must be in (0, 1)");
  }
  const double peak = *std::max_element(map.values().begin(), map.values().end());
  if (peak <= 0.0) throw ValidationError("attention map is all zero");
  const double cut = threshold_fraction * peak;
  BitMask out(map.height(), map.width());
  auto bits = out.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = map.values()[i] >= cut ? 1 : 0;
  return out;
}

namespace {

double sq_dist(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::vector<Point2> distinct_points(const std::vector<Point2>& points) {
  std::vector<Point2> out;
  std::set<std::pair<double, double>> seen;
  for (const auto& p : points) {
    if (seen.insert({p.x, p.y}).second) out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> kmeanspp_seed_indices(const std::vector<Point2>& points, int k,
                                               std::uint64_t seed) {
  if (points.empty()) throw ValidationError("k-means++ needs at least one point");
  if (k < 1) throw ValidationError("k must be >= 1");
  Rng rng(seed);
  std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.below(points.size()))};
  std::vector<double> nearest(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) nearest[i] = sq_dist(points[i], points[chosen[0]]);

  while (static_cast<int>(chosen.size()) < k) {
    double total = 0.0;
    for (double d : nearest) total += d;
    if (total <= 0.0) break;  // every point coincides with a center
    const double target = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t pick = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      acc += nearest[i];
      if (nearest[i] > 0.0 && target < acc) {
        pick = i;
        break;
      }
    }
    while (nearest[pick] <= 0.0) --pick;  // rounding at the tail
    chosen.push_back(pick);
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(points[i], points[pick]));
    }
  }
  return chosen;
}

KMeansResult kmeanspp_centers(const std::vector<Point2>& points, int k, std::uint64_t seed) {
  if (points.empty()) throw ValidationError("k-means++ needs at least one point");
  if (k < 1) throw ValidationError("k must be >= 1");
  KMeansResult result;
  auto distinct = distinct_points(points);
  if (static_cast<std::size_t>(k) > distinct.size()) {
    result.centers = std::move(distinct);
    result.degenerate = true;
    return result;
  }

  for (std::size_t idx : kmeanspp_seed_indices(points, k, seed)) result.centers.push_back(points[idx]);

  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<int> assignment(points.size());
  for (result.iterations = 0; result.iterations < 100;) {
    const auto& centers = result.centers;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(points[i], centers[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assignment[i] = best_c;
    }
    std::vector<double> sx(k, 0.0), sy(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      sx[assignment[i]] += points[i].x;
      sy[assignment[i]] += points[i].y;
      ++count[assignment[i]];
    }
    double max_move = 0.0;
    for (int c = 0; c < k; ++c) {
      if (count[c] == 0) continue;
      const Point2 next{sx[c] / count[c], sy[c] / count[c]};
      max_move = std::max(max_move, std::sqrt(sq_dist(next, result.centers[c])));
      result.centers[c] = next;
    }
    ++result.iterations;
    if (max_move < 1e-6) break;
  }
  return result;
}

std::vector<PointPrompt> sample_point_prompts(const std::vector<Point2>& centers, int n,
                                              std::uint64_t seed) {
  if (centers.empty()) throw ValidationError("no centers to sample from");
  if (n < 1) throw ValidationError("n must be >= 1");
  std::vector<std::size_t> order(centers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t take = std::min<std::size_t>(n, centers.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);
  std::vector<PointPrompt> out;
  for (std::size_t i = 0; i < take; ++i) {
    const auto& c = centers[order[i]];
    out.push_back({static_cast<int>(std::lround(c.x)), static_cast<int>(std::lround(c.y)),
                   PointLabel::foreground});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t select_best_mask(const std::vector<MaskCandidate>& candidates) {
  if (candidates.empty()) throw ValidationError("no mask candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].score > candidates[best].score) best = i;
  }
  return best;
}

double evaluate_masks_miou(const std::vector<BitMask>& predicted, const std::vector<BitMask>& truth) {
  if (predicted.size() != truth.size()) throw ValidationError("mIoU: list lengths differ");
  if (predicted.empty()) throw ValidationError("mIoU: empty lists");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) sum += mask_iou(predicted[i], truth[i]);
  return sum / static_cast<double>(predicted.size());
}

std::vector<PointPrompt> foreground_point_prompts(const AttentionMap& map,
                                                  const ForegroundPromptConfig& config,
                                                  std::uint64_t seed) {
  const BitMask region = foreground_region_from_attention(map, config.threshold_fraction);
  std::vector<Point2> pts;
  for (int r = 0; r < region.height(); ++r) {
    for (int c = 0; c < region.width(); ++c) {
      if (region.at(r, c)) pts.push_back({static_cast<double>(c), static_cast<double>(r)});
    }
  }
  const auto km = kmeanspp_centers(pts, config.clusters, derive_seed({seed, 1}));
  auto prompts = sample_point_prompts(km.centers, config.points, derive_seed({seed, 2}));
  for (auto& p : prompts) {
    p.x = std::clamp(p.x, 0, map.width() - 1);
    p.y = std::clamp(p.y, 0, map.height() - 1);
  }
  return prompts;
}

}  // namespace divergen
