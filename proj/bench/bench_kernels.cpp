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
#include <benchmark/benchmark.h>

#include <vector>

#include "divergen/analysis.hpp"
#include "divergen/compositor.hpp"
#include "divergen/filtration.hpp"
#include "divergen/mask_ops.hpp"
#include "divergen/random.hpp"
#include "divergen/reference.hpp"
#include "divergen/synthetic_backend.hpp"

namespace {

using namespace divergen;

struct BlurInput {
  RgbImage image;
  BitMask mask;
};

BlurInput make_blur_input(int side) {
  const SyntheticScene scene = synthetic_scene("bench", 11, {side, side});
  return {scene.image, scene.object_mask};
}

void BM_BlurParallel(benchmark::State& state) {
  const auto in = make_blur_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(box_blur_outside_mask(in.image, in.mask, {10, 10}));
}
void BM_BlurReference(benchmark::State& state) {
  const auto in = make_blur_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::box_blur_outside_mask(in.image, in.mask, {10, 10}));
}
BENCHMARK(BM_BlurParallel)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlurReference)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

struct CompositeInput {
  InstanceStore store;
  std::vector<RgbImage> bases;
  std::vector<PastePlan> plans;
};

CompositeInput make_composite_input(int targets) {
  CompositeInput in;
  for (int i = 0; i < 16; ++i) {
    const SyntheticScene s = synthetic_scene("src", static_cast<std::uint64_t>(i), {256, 256});
    in.store.add("src" + std::to_string(i), 1 + i % 4, s.image, rle_encode(s.object_mask));
  }
  for (int t = 0; t < targets; ++t) {
    const ImageRecord target{t + 1, 512, 512, "", ImageSource::real};
    in.bases.push_back(synthetic_generate("base", static_cast<std::uint64_t>(t), {512, 512}));
    in.plans.push_back(sample_paste_plan(in.store, target, 20, {0.1, 2.0}, derive_seed({99, std::uint64_t(t)})));
  }
  return in;
}

void BM_CompositeParallel(benchmark::State& state) {
  const auto in = make_composite_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(composite_batch(in.bases, in.plans, in.store));
}
void BM_CompositeReference(benchmark::State& state) {
  const auto in = make_composite_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::composite_batch(in.bases, in.plans, in.store));
}
BENCHMARK(BM_CompositeParallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompositeReference)->Arg(32)->Unit(benchmark::kMillisecond);

std::vector<LogitRecord> make_logits(int n, int classes) {
  Rng rng(5);
  std::vector<LogitRecord> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].instance_id = std::to_string(i);
    out[i].logits.resize(classes);
    for (auto& v : out[i].logits) v = rng.uniform(-10.0, 10.0);
  }
  return out;
}

void BM_EnergyParallel(benchmark::State& state) {
  const auto recs = make_logits(static_cast<int>(state.range(0)), 1203);
  for (auto _ : state) benchmark::DoNotOptimize(energy_batch(recs, {0.9}));
}
void BM_EnergyReference(benchmark::State& state) {
  const auto recs = make_logits(static_cast<int>(state.range(0)), 1203);
  for (auto _ : state) benchmark::DoNotOptimize(reference::energy_batch(recs, {0.9}));
}
BENCHMARK(BM_EnergyParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyReference)->Arg(10000)->Unit(benchmark::kMillisecond);

struct SimilarityInput {
  ReferenceEmbeddingIndex index{768};
  std::vector<GeneratedEmbedding> generated;
};

SimilarityInput make_similarity_input(int n) {
  SimilarityInput in;
  Rng rng(8);
  std::vector<float> v(768);
  for (int cat = 1; cat <= 8; ++cat) {
    for (int r = 0; r < 64; ++r) {
      for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
      in.index.add(cat, v);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    in.generated.push_back({i + 1, 1 + i % 8, v});
  }
  return in;
}

void BM_SimilarityParallel(benchmark::State& state) {
  const auto in = make_similarity_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(inter_similarity_batch(in.generated, in.index));
}
void BM_SimilarityReference(benchmark::State& state) {
  const auto in = make_similarity_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::inter_similarity_batch(in.generated, in.index));
}
BENCHMARK(BM_SimilarityParallel)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimilarityReference)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
