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

// Serial, loop-for-loop versions of the OpenMP kernels. They favor
// obviousness over speed and serve as comparison points in tests and in
// bench/.

#include <vector>

#include "divergen/analysis.hpp"
#include "divergen/annotation.hpp"
#include "divergen/compositor.hpp"
#include "divergen/filtration.hpp"
#include "divergen/mask_ops.hpp"

namespace divergen::reference {

/// Direct window summation per pixel, no summed-area table.
RgbImage box_blur_outside_mask(const RgbImage& image, const BitMask& mask, KernelSize kernel);

std::vector<CompositeResult> composite_batch(const std::vector<RgbImage>& bases,
                                             const std::vector<PastePlan>& plans, const InstanceStore& sources);

std::vector<double> energy_batch(const std::vector<LogitRecord>& records, const EnergyConfig& config);

std::vector<SimilarityRecord> inter_similarity_batch(const std::vector<GeneratedEmbedding>& generated,
                                                     const ReferenceEmbeddingIndex& index);

/// Nearest-center assignment for Lloyd iterations; ties go to the lower index.
std::vector<int> assign_to_centers(const std::vector<Point2>& points, const std::vector<Point2>& centers);

}  // namespace divergen::reference
