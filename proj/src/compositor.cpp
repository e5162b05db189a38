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
#include "divergen/compositor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "divergen/error.hpp"
#include "divergen/png_io.hpp"
#include "divergen/random.hpp"

namespace divergen {

std::size_t InstanceStore::add(std::string source_uri, Id category_id, const RgbImage& source,
                               const RleMask& mask) {
  const BitMask full = rle_decode(mask);
  if (!source.same_shape(full)) throw DimensionError("instance mask and source image shapes differ");
  const BoundingBox box = bbox_from_mask(full);
  items_.push_back({std::move(source_uri), category_id, mask, crop_mask(full, box), crop_image(source, box)});
  return items_.size() - 1;
}

std::pair<BitMask, RgbImage> scale_mask_and_patch(const BitMask& mask, const RgbImage& patch, double scale) {
  if (!(scale > 0.0)) throw ValidationError("scale must be positive");
  if (!patch.same_shape(mask)) throw DimensionError("mask and patch shapes differ");
  const int h_in = mask.height(), w_in = mask.width();
  const int h_out = std::max(1, static_cast<int>(std::lround(h_in * scale)));
  const int w_out = std::max(1, static_cast<int>(std::lround(w_in * scale)));
  BitMask m(h_out, w_out);
  RgbImage p(h_out, w_out);
  std::vector<int> col_src(w_out);
  for (int c = 0; c < w_out; ++c) {
    col_src[c] = static_cast<int>((2LL * c + 1) * w_in / (2LL * w_out));
  }
  for (int r = 0; r < h_out; ++r) {
    const int sr = static_cast<int>((2LL * r + 1) * h_in / (2LL * h_out));
    for (int c = 0; c < w_out; ++c) {
      m.set(r, c, mask.at(sr, col_src[c]));
      p.set(r, c, patch.at(sr, col_src[c]));
    }
  }
  return {std::move(m), std::move(p)};
}

namespace {

bool lands_inside(const BitMask& m, int x, int y, int W, int H) {
  const int r0 = std::max(0, -y), r1 = std::min(m.height(), H - y);
  const int c0 = std::max(0, -x), c1 = std::min(m.width(), W - x);
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      if (m.at(r, c)) return true;
    }
  }
  return false;
}

constexpr int kScaleRedraws = 8;
constexpr int kPlacementTries = 256;

}  // namespace

PastePlan sample_paste_plan(const InstanceStore& pool, const ImageRecord& target, int max_paste,
                            ScaleRange scale_range, std::uint64_t seed) {
  if (max_paste < 0) throw ValidationError("max_paste must be >= 0");
  if (!(scale_range.lo > 0.0 && scale_range.lo <= scale_range.hi)) {
    throw ValidationError("scale range must satisfy 0 < lo <= hi");
  }
  const int W = target.width, H = target.height;
  PastePlan plan{target.id, W, H, {}};
  Rng rng(seed);
  const int count = static_cast<int>(rng.between(0, max_paste));
  if (count > 0 && pool.empty()) throw ValidationError("paste pool is empty");

  for (int i = 0; i < count; ++i) {
    const std::size_t src = rng.below(pool.size());
    const StoredInstance& inst = pool.at(src);
    double scale = 0.0;
    BitMask scaled;
    for (int attempt = 0; attempt < kScaleRedraws; ++attempt) {
      scale = rng.uniform(scale_range.lo, scale_range.hi);
      scaled = scale_mask_and_patch(inst.mask, inst.patch, scale).first;
      if (scaled.count() > 0) break;
    }
    if (scaled.count() == 0) continue;

    int x = 0, y = 0;
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementTries && !placed; ++attempt) {
      x = static_cast<int>(rng.between(-(scaled.width() - 1), W - 1));
      y = static_cast<int>(rng.between(-(scaled.height() - 1), H - 1));
      placed = lands_inside(scaled, x, y, W, H);
    }
    if (!placed) {
      // Pin a random mask pixel onto a random target pixel.
      std::vector<std::pair<int, int>> set_px;
      for (int r = 0; r < scaled.height(); ++r) {
        for (int c = 0; c < scaled.width(); ++c) {
          if (scaled.at(r, c)) set_px.emplace_back(r, c);
        }
      }
      const auto [pr, pc] = set_px[rng.below(set_px.size())];
      x = static_cast<int>(rng.below(W)) - pc;
      y = static_cast<int>(rng.below(H)) - pr;
    }
    plan.instances.push_back({src, inst.category_id, scale, x, y, 0});
  }

  std::vector<int> z(plan.instances.size());
  std::iota(z.begin(), z.end(), 0);
  for (std::size_t i = z.size(); i > 1; --i) std::swap(z[i - 1], z[rng.below(i)]);
  for (std::size_t i = 0; i < z.size(); ++i) plan.instances[i].z_order = z[i];
  return plan;
}

CompositeResult composite(const RgbImage& base, const PastePlan& plan, const InstanceStore& sources) {
  const int W = base.width(), H = base.height();
  if (plan.target_width != W || plan.target_height != H) {
    throw DimensionError("paste plan target size differs from the base image");
  }
  const std::size_t n = plan.instances.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return plan.instances[a].z_order < plan.instances[b].z_order;
  });

  std::vector<std::pair<BitMask, RgbImage>> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pi = plan.instances[i];
    if (pi.source_index >= sources.size()) throw ValidationError("paste source is not in the store");
    const StoredInstance& s = sources.at(pi.source_index);
    scaled[i] = scale_mask_and_patch(s.mask, s.patch, pi.scale);
  }

  CompositeResult out{plan.target_image_id, base, {}};
  for (std::size_t i : order) {
    const auto& pi = plan.instances[i];
    const auto& [m, p] = scaled[i];
    for (int r = std::max(0, -pi.y); r < std::min(m.height(), H - pi.y); ++r) {
      for (int c = std::max(0, -pi.x); c < std::min(m.width(), W - pi.x); ++c) {
        if (m.at(r, c)) out.image.set(pi.y + r, pi.x + c, p.at(r, c));
      }
    }
  }

  // Front to back: each instance sees only what nothing above it covers.
  BitMask covered(H, W);
  std::vector<BitMask> visible(n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& pi = plan.instances[*it];
    const BitMask& m = scaled[*it].first;
    BitMask v(H, W);
    for (int r = std::max(0, -pi.y); r < std::min(m.height(), H - pi.y); ++r) {
      for (int c = std::max(0, -pi.x); c < std::min(m.width(), W - pi.x); ++c) {
        if (!m.at(r, c)) continue;
        if (!covered.at(pi.y + r, pi.x + c)) v.set(pi.y + r, pi.x + c);
        covered.set(pi.y + r, pi.x + c);
      }
    }
    visible[*it] = std::move(v);
  }

  Id next_id = 1;
  for (std::size_t i : order) {
    if (visible[i].count() == 0) continue;
    out.annotations.push_back(make_annotation(next_id++, plan.target_image_id,
                                              plan.instances[i].category_id, visible[i],
                                              Provenance::pasted));
  }
  return out;
}

std::vector<CompositeResult> composite_batch(const std::vector<RgbImage>& bases,
                                             const std::vector<PastePlan>& plans,
                                             const InstanceStore& sources) {
  if (bases.size() != plans.size()) throw ValidationError("composite_batch: bases and plans differ in length");
  std::vector<CompositeResult> out(plans.size());
  std::vector<std::string> errors(plans.size());
  const auto n = static_cast<std::ptrdiff_t>(plans.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = composite(bases[i], plans[i], sources);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw Error("composite " + std::to_string(i) + ": " + errors[i]);
  }
  return out;
}

void add_occluded_base_annotations(CompositeResult& result, const std::vector<InstanceAnnotation>& base) {
  const int H = result.image.height(), W = result.image.width();
  BitMask pasted(H, W);
  for (const auto& a : result.annotations) {
    const BitMask m = rle_decode(a.mask);
    if (!m.same_shape(pasted)) throw DimensionError("pasted mask does not match the composite size");
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.bits()[i]) pasted.bits()[i] = 1;
    }
  }
  Id next_id = 1;
  for (const auto& a : result.annotations) next_id = std::max(next_id, a.id + 1);
  std::vector<InstanceAnnotation> kept;
  for (const auto& a : base) {
    BitMask m = rle_decode(a.mask);
    if (!m.same_shape(pasted)) throw DimensionError("base annotation does not match the composite size");
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (pasted.bits()[i]) m.bits()[i] = 0;
    }
    if (m.count() == 0) continue;
    kept.push_back(make_annotation(next_id++, result.target_image_id, a.category_id, m, a.provenance));
  }
  // Base instances sit underneath, so they are listed first.
  kept.insert(kept.end(), result.annotations.begin(), result.annotations.end());
  result.annotations = std::move(kept);
}

DatasetBundle emit_augmented_dataset(const std::vector<CompositeResult>& results,
                                     const std::vector<CategoryRecord>& categories,
                                     const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "images");
  DatasetBundle bundle;
  bundle.categories = categories;
  Id image_id = 1;
  Id ann_id = 1;
  for (const auto& r : results) {
    const std::string uri = "images/composite_" + std::to_string(image_id) + ".png";
    write_png(out_dir / uri, r.image);
    bundle.images.push_back({image_id, r.image.width(), r.image.height(), uri, ImageSource::composite});
    for (auto a : r.annotations) {
      a.id = ann_id++;
      a.image_id = image_id;
      bundle.annotations.push_back(std::move(a));
    }
    ++image_id;
  }
  if (auto problems = validation_problems(bundle); !problems.empty()) {
    std::ostringstream msg;
    msg << "emitted dataset is invalid:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw ValidationError(msg.str());
  }
  save_dataset(bundle, out_dir / "dataset.json");
  return bundle;
}

}  // namespace divergen
