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
#include <doctest.h>

#include <thread>

#include "divergen/backend.hpp"
#include "divergen/embedding_io.hpp"
#include "divergen/error.hpp"
#include "divergen/png_io.hpp"
#include "divergen/synthetic_backend.hpp"
#include "support.hpp"

using namespace divergen;
using namespace std::chrono_literals;
using divergen::testing::TempDir;

TEST_CASE("descriptor JSON round trip") {
  BackendDescriptor d{"sd-v1.5", BackendKind::image_generator, {640, 480}, {{"steps", "50"}}};
  const auto back = descriptor_from_json(descriptor_to_json(d));
  CHECK(back.id == d.id);
  CHECK(back.kind == d.kind);
  CHECK(back.resolution == d.resolution);
  CHECK(back.params == d.params);
  CHECK_THROWS(parse_backend_kind("painter"));
}

TEST_CASE("job JSON round trip for every payload kind") {
  const std::vector<JobPayload> payloads{
      GenerateImage{"a dog, in a white background", 123456789012345ULL, {256, 128}, {{"guidance", "7.5"}}},
      PredictMask{"/tmp/x.png", {{0, 0, PointLabel::foreground}, {5, 6, PointLabel::background}}},
      EmbedImage{"/tmp/y.png"}};
  for (const auto& p : payloads) {
    const BackendJob job{content_job_id("b", p), "b", p};
    const BackendJob back = job_from_json(job_to_json(job));
    CHECK(back.job_id == job.job_id);
    CHECK(back.backend_id == "b");
    CHECK(back.payload.index() == p.index());
    CHECK(job_to_json(back) == job_to_json(job));
  }
}

TEST_CASE("content job ids") {
  const GenerateImage a{"p", 1, {512, 512}, {}};
  GenerateImage b = a;
  CHECK(content_job_id("s", a) == content_job_id("s", b));
  b.seed = 2;
  CHECK(content_job_id("s", a) != content_job_id("s", b));
  CHECK(content_job_id("s", a) != content_job_id("t", a));
  CHECK(content_job_id("s", a) < (1ULL << 53));
  CHECK(content_job_id("s", a) != 0);
}

TEST_CASE("file exchange: request out, response in") {
  TempDir dir("xchg");
  const ExchangeDir ex(dir.path());
  ex.prepare();
  const FileExchangeBackend backend({"external", BackendKind::image_generator, {8, 8}, {}}, 5000ms, 5ms);
  const BackendJob job{42, "external", GenerateImage{"p", 3, {8, 8}, {}}};

  std::thread adapter([&] {
    while (!std::filesystem::exists(ex.request_path(42))) std::this_thread::sleep_for(2ms);
    const BackendJob seen = job_from_json(read_json_file(ex.request_path(42)));
    const auto& g = std::get<GenerateImage>(seen.payload);
    write_png(ex.image_path(42), RgbImage(g.resolution.height, g.resolution.width, {1, 2, 3}));
    BackendResult r;
    r.job_id = 42;
    r.status = JobStatus::ok;
    r.artifacts.push_back(ex.image_path(42));
    ex.write_response(r);
  });
  const BackendResult r = backend.execute(job, ex);
  adapter.join();
  REQUIRE(r.ok());
  REQUIRE(r.artifacts.size() == 1);
  CHECK(read_png(r.artifacts[0]) == RgbImage(8, 8, {1, 2, 3}));
}

TEST_CASE("file exchange: silent adapter times out") {
  TempDir dir("xchg-dead");
  const ExchangeDir ex(dir.path());
  ex.prepare();
  const FileExchangeBackend backend({"dead", BackendKind::embedder, {}, {}}, 60ms, 5ms);
  const BackendResult r = backend.execute({7, "dead", EmbedImage{"/nowhere.png"}}, ex);
  CHECK(r.status == JobStatus::timeout);
  CHECK(std::filesystem::exists(ex.request_path(7)));
}

TEST_CASE("response artifacts are stored relative to the exchange root") {
  TempDir dir("xchg-rel");
  const ExchangeDir ex(dir.path());
  ex.prepare();
  BackendResult r;
  r.job_id = 5;
  r.status = JobStatus::ok;
  r.artifacts = {ex.mask_path(5, 0), ex.mask_path(5, 1)};
  r.scores = {0.9, 0.4};
  ex.write_response(r);
  // Artifacts not on disk yet: the response is not usable.
  CHECK_FALSE(ex.read_response(5)->ok());
  write_mask_png(ex.mask_path(5, 0), BitMask(2, 2));
  write_mask_png(ex.mask_path(5, 1), BitMask(2, 2));
  const auto doc = read_json_file(ex.response_path(5));
  CHECK(doc.dump().find(dir.path().string()) == std::string::npos);
  const auto back = ex.read_response(5);
  REQUIRE(back);
  CHECK(back->ok());
  CHECK(back->artifacts == r.artifacts);
  CHECK(back->scores == r.scores);
  CHECK_FALSE(ex.read_response(6).has_value());
}

TEST_CASE("synthetic backends honour their contracts") {
  TempDir dir("xchg-syn");
  const ExchangeDir ex(dir.path());
  ex.prepare();
  const SyntheticGenerator gen({64, 48});
  const GenerateImage g{"a red thing", 9, {64, 48}, {}};
  const auto gr = gen.execute({content_job_id("synthetic", g), "synthetic", g}, ex);
  REQUIRE(gr.ok());
  const RgbImage img = read_png(gr.artifacts[0]);
  CHECK(img.width() == 64);
  CHECK(img.height() == 48);

  const SyntheticMaskPredictor sam;
  const PredictMask pm{gr.artifacts[0].string(), {{0, 0}, {63, 0}, {0, 47}, {63, 47}}};
  const auto mr = sam.execute({content_job_id("synthetic-sam", pm), "synthetic-sam", pm}, ex);
  REQUIRE(mr.ok());
  CHECK(mr.artifacts.size() == mr.scores.size());
  CHECK(mr.artifacts.size() == 3);

  const SyntheticEmbedder emb;
  const EmbedImage ei{gr.artifacts[0].string()};
  const auto er = emb.execute({content_job_id("synthetic-embed", ei), "synthetic-embed", ei}, ex);
  REQUIRE(er.ok());
  const EmbeddingMatrix m = read_embedding_file(er.artifacts[0]);
  CHECK(m.rows() == 1);
  CHECK(m.dim() == kSyntheticEmbeddingDim);

  // Wrong payload for the backend kind is an error result, not an exception.
  CHECK_FALSE(gen.execute({1, "synthetic", ei}, ex).ok());
}

TEST_CASE("registry rejects duplicate ids") {
  BackendRegistry reg;
  reg.add(std::make_shared<SyntheticGenerator>());
  CHECK_THROWS_AS(reg.add(std::make_shared<SyntheticGenerator>()), ConfigError);
  CHECK(reg.find("synthetic") != nullptr);
  CHECK(reg.find("nope") == nullptr);
}

TEST_CASE("atomic writes leave no temp files") {
  TempDir dir("atomic");
  write_file_atomic(dir / "f.txt", "hello");
  write_file_atomic(dir / "f.txt", "world");
  CHECK(divergen::testing::read_bytes(dir / "f.txt") == "world");
  int n = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++n;
  CHECK(n == 1);
}
