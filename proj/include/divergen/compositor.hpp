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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "divergen/dataset.hpp"
#include "divergen/mask_ops.hpp"
#include "divergen/raster.hpp"

namespace divergen {

/// A pasteable instance: its mask and pixels cropped to the mask's box.
struct StoredInstance {
  std::string source_uri;
  Id category_id = 0;
  RleMask source_mask;
  BitMask mask;   // cropped to the tight box
  RgbImage patch; // same box, source pixels
};

/// Read-only pool of paste sources during a run.
class InstanceStore {
 public:
  /// Throws EmptyMaskError for an empty mask and DimensionError when the
  /// mask and image shapes differ.
  std::size_t add(std::string source_uri, Id category_id, const RgbImage& source, const RleMask& mask);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const StoredInstance& at(std::size_t i) const { return items_.at(i); }

 private:
  std::vector<StoredInstance> items_;
};

struct PasteInstance {
  std::size_t source_index = 0;  // into the InstanceStore
  Id category_id = 0;
  double scale = 1.0;
  int x = 0;  // top-left of the scaled patch in the target, may be negative
  int y = 0;
  int z_order = 0;
};

struct PastePlan {
  Id target_image_id = 0;
  int target_width = 0;
  int target_height = 0;
  std::vector<PasteInstance> instances;
};

struct ScaleRange {
  double lo = 0.1;
  double hi = 2.0;
};

/// Nearest-neighbor resize of both rasters to max(1, round(dim * scale)).
/// Output pixel (r, c) samples input ((2r+1) * h_in / (2 h_out), ...).
std::pair<BitMask, RgbImage> scale_mask_and_patch(const BitMask& mask, const RgbImage& patch, double scale);

/// Count uniform in [0, max_paste]; sources uniform with replacement; scale
/// uniform in [lo, hi]; placement uniform over positions that keep at least
/// one scaled mask pixel inside the target; z-order a random permutation.
/// Draws whose scaled mask is empty are re-drawn a bounded number of times
/// and then skipped.
PastePlan sample_paste_plan(const InstanceStore& pool, const ImageRecord& target, int max_paste,
                            ScaleRange scale_range, std::uint64_t seed);

struct CompositeResult {
  Id target_image_id = 0;
  RgbImage image;
  /// Visible masks (image_id = target); ids are 1..n within the composite.
  std::vector<InstanceAnnotation> annotations;
};

/// Paints instances back to front (ascending z). An instance's visible mask
/// is its scaled, clipped mask minus every mask above it; instances left
/// with no visible pixel are dropped.
CompositeResult composite(const RgbImage& base, const PastePlan& plan, const InstanceStore& sources);

/// composite() over many targets, OpenMP-parallel. `bases[i]` pairs with
/// `plans[i]`.
std::vector<CompositeResult> composite_batch(const std::vector<RgbImage>& bases,
                                             const std::vector<PastePlan>& plans,
                                             const InstanceStore& sources);

/// Appends the target image's own instances, each reduced to what the pasted
/// instances leave visible. Instances left empty are dropped. Provenance is
/// kept as given.
void add_occluded_base_annotations(CompositeResult& result, const std::vector<InstanceAnnotation>& base);

/// Writes `images/composite_<n>.png` and `dataset.json` under `out_dir`.
/// Images get ids 1..N and annotations ids 1..M; provenance is kept. Throws
/// ValidationError if the emitted bundle fails validation.
DatasetBundle emit_augmented_dataset(const std::vector<CompositeResult>& results,
                                     const std::vector<CategoryRecord>& categories,
                                     const std::filesystem::path& out_dir);

}  // namespace divergen
