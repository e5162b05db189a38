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

#include <string_view>
#include <utility>
#include <vector>

#include "divergen/backend.hpp"
#include "divergen/raster.hpp"

namespace divergen {

inline constexpr char kSyntheticGeneratorId[] = "synthetic";
inline constexpr char kSyntheticMaskPredictorId[] = "synthetic-sam";
inline constexpr char kSyntheticEmbedderId[] = "synthetic-embed";
inline constexpr std::uint32_t kSyntheticEmbeddingDim = 64;

struct SyntheticScene {
  RgbImage image;
  BitMask object_mask;  // ground truth for the single foreground shape
};

/// Near-white flat background (every channel >= 244) with one saturated
/// shape (ellipse, rectangle or star-shaped blob) fully inside the frame.
/// Shape, color, size and placement derive from (prompt, seed) only.
SyntheticScene synthetic_scene(std::string_view prompt, std::uint64_t seed, Resolution resolution);

RgbImage synthetic_generate(std::string_view prompt, std::uint64_t seed, Resolution resolution);

/// Point-prompted segmentation by region growing: from every prompt point,
/// 4-connected pixels within `tolerance` (max channel difference) of the
/// point's color. Foreground points add their region, background points
/// remove theirs.
BitMask grow_region(const RgbImage& image, const std::vector<PointPrompt>& points, int tolerance);

/// Candidates at tolerances 24, 12 and 48, scored by stability (IoU of the
/// candidate with its double-tolerance variant).
std::vector<std::pair<BitMask, double>> synthetic_predict_masks(const RgbImage& image,
                                                                const std::vector<PointPrompt>& points);

/// L2-normalized, saturation-weighted hue histogram (64 circular bins).
std::vector<float> synthetic_embed(const RgbImage& image);

class SyntheticGenerator : public Backend {
 public:
  explicit SyntheticGenerator(Resolution resolution = {512, 512}, std::string id = kSyntheticGeneratorId);
  const BackendDescriptor& descriptor() const override { return descriptor_; }
  BackendResult execute(const BackendJob& job, const ExchangeDir& exchange) const override;

 private:
  BackendDescriptor descriptor_;
};

class SyntheticMaskPredictor : public Backend {
 public:
  SyntheticMaskPredictor();
  const BackendDescriptor& descriptor() const override { return descriptor_; }
  BackendResult execute(const BackendJob& job, const ExchangeDir& exchange) const override;

 private:
  BackendDescriptor descriptor_;
};

class SyntheticEmbedder : public Backend {
 public:
  SyntheticEmbedder();
  const BackendDescriptor& descriptor() const override { return descriptor_; }
  BackendResult execute(const BackendJob& job, const ExchangeDir& exchange) const override;

 private:
  BackendDescriptor descriptor_;
};

}  // namespace divergen
