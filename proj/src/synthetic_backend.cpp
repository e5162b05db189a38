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
#include "divergen/synthetic_backend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "divergen/embedding_io.hpp"
#include "divergen/error.hpp"
#include "divergen/mask_ops.hpp"
#include "divergen/png_io.hpp"
#include "divergen/random.hpp"

namespace divergen {

namespace {

Rgb hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  const double m = v - c;
  auto to8 = [m](double t) { return static_cast<std::uint8_t>(std::lround((t + m) * 255.0)); };
  return {to8(r), to8(g), to8(b)};
}

BackendResult failure(std::uint64_t job_id, std::string message) {
  BackendResult r;
  r.job_id = job_id;
  r.status = JobStatus::error;
  r.message = std::move(message);
  return r;
}

template <typename T>
const T* payload_as(const BackendJob& job) {
  return std::get_if<T>(&job.payload);
}

}  // namespace

SyntheticScene synthetic_scene(std::string_view prompt, std::uint64_t seed, Resolution res) {
  if (res.width <= 0 || res.height <= 0) throw DimensionError("resolution must be positive");
  Rng rng(derive_seed({fnv1a64(prompt), seed}));
  const Rgb background = {static_cast<std::uint8_t>(244 + rng.below(12)),
                          static_cast<std::uint8_t>(244 + rng.below(12)),
                          static_cast<std::uint8_t>(244 + rng.below(12))};
  // The prompt fixes the hue, so images of one prompt look alike.
  const double base_hue = static_cast<double>(fnv1a64(prompt) % 3600) / 10.0;
  const double hue = std::fmod(base_hue + rng.uniform(-8.0, 8.0) + 360.0, 360.0);
  const Rgb color = hsv_to_rgb(hue, rng.uniform(0.75, 1.0), rng.uniform(0.55, 0.8));
  const int shape = static_cast<int>(rng.below(3));

  const double W = res.width, H = res.height;
  const double radius = std::min(W, H) * rng.uniform(0.12, 0.3);
  const double rx = radius * rng.uniform(0.6, 1.0);
  const double ry = radius * rng.uniform(0.6, 1.0);
  const double margin = 2.0;
  auto place = [&](double extent, double size) {
    const double lo = margin + extent;
    const double hi = size - margin - extent;
    return lo < hi ? rng.uniform(lo, hi) : size / 2.0;
  };
  const double cx = place(radius, W);
  const double cy = place(radius, H);
  const int lobes = 3 + static_cast<int>(rng.below(4));
  const double wobble = rng.uniform(0.1, 0.25);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  auto inside = [&](double x, double y) {
    const double dx = x - cx, dy = y - cy;
    switch (shape) {
      case 0: return (dx * dx) / (rx * rx) + (dy * dy) / (ry * ry) <= 1.0;
      case 1: return std::abs(dx) <= rx && std::abs(dy) <= ry;
      default: {
        const double r = std::hypot(dx, dy);
        const double limit = radius * (1.0 - wobble) * (1.0 + wobble * std::sin(lobes * std::atan2(dy, dx) + phase));
        return r <= limit;
      }
    }
  };

  BitMask mask(res.height, res.width);
  for (int r = 0; r < res.height; ++r) {
    for (int c = 0; c < res.width; ++c) mask.set(r, c, inside(c + 0.5, r + 0.5));
  }
  if (mask.count() == 0) mask.set(res.height / 2, res.width / 2);
  mask = largest_component(mask);

  RgbImage image(res.height, res.width, background);
  for (int r = 0; r < res.height; ++r) {
    for (int c = 0; c < res.width; ++c) {
      if (mask.at(r, c)) image.set(r, c, color);
    }
  }
  return {std::move(image), std::move(mask)};
}

RgbImage synthetic_generate(std::string_view prompt, std::uint64_t seed, Resolution resolution) {
  return synthetic_scene(prompt, seed, resolution).image;
}

BitMask grow_region(const RgbImage& image, const std::vector<PointPrompt>& points, int tolerance) {
  const int H = image.height(), W = image.width();
  BitMask add(H, W), remove(H, W);
  std::vector<std::pair<int, int>> stack;
  for (const auto& p : points) {
    if (p.x < 0 || p.y < 0 || p.x >= W || p.y >= H) throw ValidationError("point prompt outside image");
    BitMask& target = p.label == PointLabel::foreground ? add : remove;
    BitMask seen(H, W);
    const Rgb seed = image.at(p.y, p.x);
    auto similar = [&](int r, int c) {
      const Rgb px = image.at(r, c);
      for (int ch = 0; ch < 3; ++ch) {
        if (std::abs(int(px[ch]) - int(seed[ch])) > tolerance) return false;
      }
      return true;
    };
    stack.emplace_back(p.y, p.x);
    seen.set(p.y, p.x);
    while (!stack.empty()) {
      auto [r, c] = stack.back();
      stack.pop_back();
      target.set(r, c);
      const int nr[4] = {r - 1, r + 1, r, r};
      const int nc[4] = {c, c, c - 1, c + 1};
      for (int k = 0; k < 4; ++k) {
        if (nr[k] < 0 || nc[k] < 0 || nr[k] >= H || nc[k] >= W || seen.at(nr[k], nc[k])) continue;
        seen.set(nr[k], nc[k]);
        if (similar(nr[k], nc[k])) stack.emplace_back(nr[k], nc[k]);
      }
    }
  }
  auto ab = add.bits();
  auto rb = remove.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) ab[i] &= static_cast<std::uint8_t>(rb[i] ^ 1);
  return add;
}

std::vector<std::pair<BitMask, double>> synthetic_predict_masks(const RgbImage& image,
                                                                const std::vector<PointPrompt>& points) {
  std::vector<std::pair<BitMask, double>> out;
  for (int tol : {24, 12, 48}) {
    BitMask m = grow_region(image, points, tol);
    const double stability = mask_iou(m, grow_region(image, points, 2 * tol));
    out.emplace_back(std::move(m), stability);
  }
  return out;
}

std::vector<float> synthetic_embed(const RgbImage& image) {
  // Saturation-weighted hue histogram, smoothed over neighboring bins.
  constexpr int kBins = static_cast<int>(kSyntheticEmbeddingDim);
  constexpr int kSpread = 4;
  constexpr double kWidth = 1.5;
  std::vector<double> hist(kBins, 0.0);
  auto px = image.data();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    const int r = px[i], g = px[i + 1], b = px[i + 2];
    const int hi = std::max({r, g, b}), lo = std::min({r, g, b});
    if (hi == lo) continue;
    double h;
    if (hi == r) {
      h = 60.0 * (g - b) / (hi - lo);
    } else if (hi == g) {
      h = 60.0 * (2.0 + static_cast<double>(b - r) / (hi - lo));
    } else {
      h = 60.0 * (4.0 + static_cast<double>(r - g) / (hi - lo));
    }
    if (h < 0.0) h += 360.0;
    const double sat = static_cast<double>(hi - lo) / hi;
    const double pos = h / 360.0 * kBins;
    const int center = static_cast<int>(pos);
    for (int d = -kSpread; d <= kSpread; ++d) {
      const int bin = ((center + d) % kBins + kBins) % kBins;
      const double dist = pos - (center + d + 0.5);
      hist[bin] += sat * std::exp(-dist * dist / (2.0 * kWidth * kWidth));
    }
  }
  double norm = 0.0;
  for (double h : hist) norm += h * h;
  std::vector<float> out(kBins, 0.0f);
  if (norm == 0.0) {
    out[0] = 1.0f;  // achromatic image
    return out;
  }
  norm = std::sqrt(norm);
  for (int i = 0; i < kBins; ++i) out[i] = static_cast<float>(hist[i] / norm);
  return out;
}

SyntheticGenerator::SyntheticGenerator(Resolution resolution, std::string id) {
  descriptor_.id = std::move(id);
  descriptor_.kind = BackendKind::image_generator;
  descriptor_.resolution = resolution;
}

BackendResult SyntheticGenerator::execute(const BackendJob& job, const ExchangeDir& exchange) const {
  const auto* p = payload_as<GenerateImage>(job);
  if (!p) return failure(job.job_id, "synthetic generator only accepts generate_image jobs");
  BackendResult r;
  r.job_id = job.job_id;
  const auto path = exchange.image_path(job.job_id);
  write_png(path, synthetic_generate(p->prompt, p->seed, p->resolution));
  r.artifacts.push_back(path);
  r.status = JobStatus::ok;
  exchange.write_response(r);
  return r;
}

SyntheticMaskPredictor::SyntheticMaskPredictor() {
  descriptor_.id = kSyntheticMaskPredictorId;
  descriptor_.kind = BackendKind::mask_predictor;
}

BackendResult SyntheticMaskPredictor::execute(const BackendJob& job, const ExchangeDir& exchange) const {
  const auto* p = payload_as<PredictMask>(job);
  if (!p) return failure(job.job_id, "synthetic mask predictor only accepts predict_mask jobs");
  const RgbImage image = read_png(p->image);
  BackendResult r;
  r.job_id = job.job_id;
  auto candidates = synthetic_predict_masks(image, p->points);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto path = exchange.mask_path(job.job_id, k);
    write_mask_png(path, candidates[k].first);
    r.artifacts.push_back(path);
    r.scores.push_back(candidates[k].second);
  }
  r.status = JobStatus::ok;
  exchange.write_response(r);
  return r;
}

SyntheticEmbedder::SyntheticEmbedder() {
  descriptor_.id = kSyntheticEmbedderId;
  descriptor_.kind = BackendKind::embedder;
}

BackendResult SyntheticEmbedder::execute(const BackendJob& job, const ExchangeDir& exchange) const {
  const auto* p = payload_as<EmbedImage>(job);
  if (!p) return failure(job.job_id, "synthetic embedder only accepts embed_image jobs");
  EmbeddingMatrix m(kSyntheticEmbeddingDim);
  m.add_row(job.job_id, synthetic_embed(read_png(p->image)));
  BackendResult r;
  r.job_id = job.job_id;
  const auto path = exchange.embedding_path(job.job_id);
  write_embedding_file(m, path);
  r.artifacts.push_back(path);
  r.status = JobStatus::ok;
  exchange.write_response(r);
  return r;
}

}  // namespace divergen
