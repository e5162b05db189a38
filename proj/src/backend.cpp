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
#include "divergen/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "divergen/dataset.hpp"
#include "divergen/error.hpp"
#include "divergen/random.hpp"

namespace divergen {

using nlohmann::json;

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::image_generator: return "image_generator";
    case BackendKind::mask_predictor: return "mask_predictor";
    case BackendKind::embedder: return "embedder";
  }
  return "?";
}

BackendKind parse_backend_kind(std::string_view s) {
  if (s == "image_generator") return BackendKind::image_generator;
  if (s == "mask_predictor") return BackendKind::mask_predictor;
  if (s == "embedder") return BackendKind::embedder;
  throw FormatError("unknown backend kind '" + std::string(s) + "'");
}

std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::ok: return "ok";
    case JobStatus::error: return "error";
    case JobStatus::timeout: return "timeout";
  }
  return "?";
}

json descriptor_to_json(const BackendDescriptor& d) {
  json o = {{"id", d.id}, {"kind", to_string(d.kind)}, {"params", d.params}};
  if (d.kind == BackendKind::image_generator) {
    o["resolution"] = {d.resolution.width, d.resolution.height};
  }
  return o;
}

BackendDescriptor descriptor_from_json(const json& doc) {
  BackendDescriptor d;
  try {
    d.id = doc.at("id").get<std::string>();
    d.kind = parse_backend_kind(doc.at("kind").get<std::string>());
    if (doc.contains("resolution")) {
      const auto res = doc.at("resolution").get<std::vector<int>>();
      if (res.size() != 2) throw FormatError("resolution must be [width, height]");
      d.resolution = {res[0], res[1]};
    }
    if (doc.contains("params")) {
      for (const auto& [k, v] : doc.at("params").items()) {
        d.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("backend descriptor: ") + e.what());
  }
  if (d.id.empty()) throw ConfigError("backend id must not be empty");
  if (d.kind == BackendKind::image_generator &&
      (d.resolution.width <= 0 || d.resolution.height <= 0)) {
    throw ConfigError("backend " + d.id + ": generator resolution must be positive");
  }
  return d;
}

BackendKind kind_of(const JobPayload& payload) {
  switch (payload.index()) {
    case 0: return BackendKind::image_generator;
    case 1: return BackendKind::mask_predictor;
    default: return BackendKind::embedder;
  }
}

namespace {

constexpr std::string_view kind_tag(BackendKind k) {
  switch (k) {
    case BackendKind::image_generator: return "generate_image";
    case BackendKind::mask_predictor: return "predict_mask";
    case BackendKind::embedder: return "embed_image";
  }
  return "?";
}

json payload_to_json(const JobPayload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GenerateImage>) {
          return {{"prompt", p.prompt},
                  {"seed", p.seed},
                  {"resolution", {p.resolution.width, p.resolution.height}},
                  {"params", p.params}};
        } else if constexpr (std::is_same_v<T, PredictMask>) {
          json pts = json::array();
          for (const auto& pt : p.points) {
            pts.push_back({{"x", pt.x},
                           {"y", pt.y},
                           {"label", pt.label == PointLabel::foreground ? "foreground" : "background"}});
          }
          return {{"image", p.image}, {"points", pts}};
        } else {
          return {{"image", p.image}};
        }
      },
      payload);
}

}  // namespace

std::uint64_t content_job_id(const std::string& backend_id, const JobPayload& payload) {
  const json key = {{"backend_id", backend_id},
                    {"kind", kind_tag(kind_of(payload))},
                    {"payload", payload_to_json(payload)}};
  const std::uint64_t id = mix64(fnv1a64(key.dump())) & ((std::uint64_t{1} << 53) - 1);
  return id == 0 ? 1 : id;
}

json job_to_json(const BackendJob& job) {
  return {{"job_id", job.job_id},
          {"kind", kind_tag(kind_of(job.payload))},
          {"backend_id", job.backend_id},
          {"payload", payload_to_json(job.payload)}};
}

BackendJob job_from_json(const json& doc) {
  BackendJob job;
  try {
    job.job_id = doc.at("job_id").get<std::uint64_t>();
    job.backend_id = doc.at("backend_id").get<std::string>();
    const auto kind = doc.at("kind").get<std::string>();
    const json& p = doc.at("payload");
    if (kind == "generate_image") {
      GenerateImage g;
      g.prompt = p.at("prompt").get<std::string>();
      g.seed = p.at("seed").get<std::uint64_t>();
      const auto res = p.at("resolution").get<std::vector<int>>();
      if (res.size() != 2) throw FormatError("resolution must be [width, height]");
      g.resolution = {res[0], res[1]};
      if (p.contains("params")) g.params = p.at("params").get<std::map<std::string, std::string>>();
      job.payload = std::move(g);
    } else if (kind == "predict_mask") {
      PredictMask m;
      m.image = p.at("image").get<std::string>();
      for (const auto& pt : p.at("points")) {
        const auto label = pt.at("label").get<std::string>();
        if (label != "foreground" && label != "background") {
          throw FormatError("point label must be foreground or background");
        }
        m.points.push_back({pt.at("x").get<int>(), pt.at("y").get<int>(),
                            label == "foreground" ? PointLabel::foreground : PointLabel::background});
      }
      job.payload = std::move(m);
    } else if (kind == "embed_image") {
      job.payload = EmbedImage{p.at("image").get<std::string>()};
    } else {
      throw FormatError("unknown job kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("job request: ") + e.what());
  }
  return job;
}

ExchangeDir::ExchangeDir(std::filesystem::path root) : root_(std::filesystem::absolute(root)) {}

void ExchangeDir::prepare() const {
  for (const char* sub : {"requests", "responses", "images", "masks", "embeddings", "scratch"}) {
    std::filesystem::create_directories(root_ / sub);
  }
}

std::filesystem::path ExchangeDir::request_path(std::uint64_t id) const {
  return root_ / "requests" / (std::to_string(id) + ".json");
}
std::filesystem::path ExchangeDir::response_path(std::uint64_t id) const {
  return root_ / "responses" / (std::to_string(id) + ".json");
}
std::filesystem::path ExchangeDir::image_path(std::uint64_t id) const {
  return root_ / "images" / (std::to_string(id) + ".png");
}
std::filesystem::path ExchangeDir::mask_path(std::uint64_t id, std::size_t candidate) const {
  std::string name = std::to_string(id);
  if (candidate > 0) name += "_" + std::to_string(candidate);
  return root_ / "masks" / (name + ".png");
}
std::filesystem::path ExchangeDir::embedding_path(std::uint64_t id) const {
  return root_ / "embeddings" / (std::to_string(id) + ".bin");
}

std::filesystem::path ExchangeDir::resolve(const std::string& artifact) const {
  std::filesystem::path p(artifact);
  return p.is_absolute() ? p : root_ / p;
}

std::string ExchangeDir::relative(const std::filesystem::path& artifact) const {
  return std::filesystem::relative(artifact, root_).generic_string();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << ::getpid() << "." << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const auto tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void ExchangeDir::write_request(const BackendJob& job) const {
  write_file_atomic(request_path(job.job_id), job_to_json(job).dump(2) + "\n");
}

void ExchangeDir::write_response(const BackendResult& r) const {
  json o = {{"job_id", r.job_id}, {"status", r.ok() ? "ok" : "error"}};
  if (r.artifacts.size() == 1) {
    o["artifact"] = relative(r.artifacts.front());
  } else if (!r.artifacts.empty()) {
    json arr = json::array();
    for (const auto& a : r.artifacts) arr.push_back(relative(a));
    o["artifact"] = std::move(arr);
  } else {
    o["artifact"] = nullptr;
  }
  if (!r.scores.empty()) o["scores"] = r.scores;
  if (!r.message.empty()) o["message"] = r.message;
  write_file_atomic(response_path(r.job_id), o.dump(2) + "\n");
}

std::optional<BackendResult> ExchangeDir::read_response(std::uint64_t job_id) const {
  const auto path = response_path(job_id);
  if (!std::filesystem::exists(path)) return std::nullopt;
  BackendResult r;
  r.job_id = job_id;
  json doc;
  try {
    doc = read_json_file(path);
    if (doc.at("job_id").get<std::uint64_t>() != job_id) {
      r.message = "response job_id does not match request";
      return r;
    }
    const auto status = doc.at("status").get<std::string>();
    if (status != "ok" && status != "error") {
      r.message = "response status must be ok or error";
      return r;
    }
    if (doc.contains("message") && doc["message"].is_string()) r.message = doc["message"];
    if (status == "error") return r;
    const json& art = doc.at("artifact");
    if (art.is_string()) {
      r.artifacts.push_back(resolve(art.get<std::string>()));
    } else if (art.is_array()) {
      for (const auto& a : art) r.artifacts.push_back(resolve(a.get<std::string>()));
    }
    if (r.artifacts.empty()) {
      r.message = "ok response without artifact";
      return r;
    }
    for (const auto& a : r.artifacts) {
      if (!std::filesystem::exists(a)) {
        r.message = "artifact missing: " + a.string();
        r.artifacts.clear();
        return r;
      }
    }
    if (doc.contains("scores")) r.scores = doc.at("scores").get<std::vector<double>>();
    r.status = JobStatus::ok;
  } catch (const std::exception& e) {
    r.status = JobStatus::error;
    r.artifacts.clear();
    r.message = std::string("malformed response: ") + e.what();
  }
  return r;
}

std::filesystem::path exchange_dir_from_env(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("DIVERGEN_EXCHANGE_DIR"); env && *env) return env;
  return fallback;
}

FileExchangeBackend::FileExchangeBackend(BackendDescriptor descriptor,
                                         std::chrono::milliseconds timeout,
                                         std::chrono::milliseconds poll_interval)
    : descriptor_(std::move(descriptor)), timeout_(timeout), poll_interval_(poll_interval) {}

BackendResult FileExchangeBackend::execute(const BackendJob& job, const ExchangeDir& exchange) const {
  exchange.write_request(job);
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    if (auto r = exchange.read_response(job.job_id)) return *r;
    if (std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(poll_interval_);
  }
  BackendResult r;
  r.job_id = job.job_id;
  r.status = JobStatus::timeout;
  r.message = "no response from backend '" + descriptor_.id + "' within " +
              std::to_string(timeout_.count()) + " ms";
  return r;
}

void BackendRegistry::add(std::shared_ptr<const Backend> backend) {
  const std::string id = backend->descriptor().id;
  if (!backends_.emplace(id, std::move(backend)).second) {
    throw ConfigError("duplicate backend id '" + id + "'");
  }
}

const Backend* BackendRegistry::find(const std::string& id) const {
  auto it = backends_.find(id);
  return it == backends_.end() ? nullptr : it->second.get();
}

std::vector<BackendDescriptor> BackendRegistry::descriptors() const {
  std::vector<BackendDescriptor> out;
  for (const auto& [id, b] : backends_) out.push_back(b->descriptor());
  return out;
}

}  // namespace divergen
