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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace divergen {

enum class BackendKind { image_generator, mask_predictor, embedder };

std::string_view to_string(BackendKind k);
BackendKind parse_backend_kind(std::string_view s);

struct Resolution {
  int width = 512;
  int height = 512;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

struct BackendDescriptor {
  std::string id;
  BackendKind kind = BackendKind::image_generator;
  Resolution resolution;  // generators only
  std::map<std::string, std::string> params;
};

nlohmann::json descriptor_to_json(const BackendDescriptor& d);
BackendDescriptor descriptor_from_json(const nlohmann::json& doc);

enum class PointLabel { foreground, background };

struct PointPrompt {
  int x = 0;
  int y = 0;
  PointLabel label = PointLabel::foreground;

  friend bool operator==(const PointPrompt&, const PointPrompt&) = default;
  friend auto operator<=>(const PointPrompt&, const PointPrompt&) = default;
};

struct GenerateImage {
  std::string prompt;
  std::uint64_t seed = 0;
  Resolution resolution;
  std::map<std::string, std::string> params;
};

struct PredictMask {
  std::string image;  // absolute path
  std::vector<PointPrompt> points;
};

struct EmbedImage {
  std::string image;  // absolute path
};

using JobPayload = std::variant<GenerateImage, PredictMask, EmbedImage>;

BackendKind kind_of(const JobPayload& payload);

struct BackendJob {
  std::uint64_t job_id = 0;
  std::string backend_id;
  JobPayload payload;
};

/// Content-derived job id (53 bits, non-zero, JSON-safe): equal requests
/// map to the same id, so finished responses can be reused.
std::uint64_t content_job_id(const std::string& backend_id, const JobPayload& payload);

nlohmann::json job_to_json(const BackendJob& job);
BackendJob job_from_json(const nlohmann::json& doc);

enum class JobStatus { ok, error, timeout };

std::string_view to_string(JobStatus s);

struct BackendResult {
  std::uint64_t job_id = 0;
  JobStatus status = JobStatus::error;
  std::vector<std::filesystem::path> artifacts;  // absolute
  std::vector<double> scores;                    // mask candidates only
  std::string message;
  bool reused = false;

  bool ok() const { return status == JobStatus::ok; }
};

/// Directory layout shared with external adapters:
///   requests/<job_id>.json, responses/<job_id>.json,
///   images/, masks/, embeddings/ for artifacts.
class ExchangeDir {
 public:
  explicit ExchangeDir(std::filesystem::path root);

  /// Creates the subdirectories.
  void prepare() const;

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path request_path(std::uint64_t job_id) const;
  std::filesystem::path response_path(std::uint64_t job_id) const;
  std::filesystem::path image_path(std::uint64_t job_id) const;
  std::filesystem::path mask_path(std::uint64_t job_id, std::size_t candidate) const;
  std::filesystem::path embedding_path(std::uint64_t job_id) const;
  std::filesystem::path scratch_dir() const { return root_ / "scratch"; }

  /// Artifact paths in responses are relative to the root.
  std::filesystem::path resolve(const std::string& artifact) const;
  std::string relative(const std::filesystem::path& artifact) const;

  void write_request(const BackendJob& job) const;
  void write_response(const BackendResult& result) const;

  /// Parses responses/<id>.json if it exists.
  std::optional<BackendResult> read_response(std::uint64_t job_id) const;

 private:
  std::filesystem::path root_;
};

/// `DIVERGEN_EXCHANGE_DIR` when set, otherwise `fallback`.
std::filesystem::path exchange_dir_from_env(const std::filesystem::path& fallback);

/// Writes `text` to a sibling temp file and renames it into place, so
/// readers polling the directory never see partial files.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual const BackendDescriptor& descriptor() const = 0;

  /// Produces the job's artifacts inside `exchange` and reports them.
  /// Implementations must be safe to call from several threads at once.
  virtual BackendResult execute(const BackendJob& job, const ExchangeDir& exchange) const = 0;
};

/// Talks to an out-of-process adapter: writes the request file and polls
/// for the response until the timeout.
class FileExchangeBackend : public Backend {
 public:
  FileExchangeBackend(BackendDescriptor descriptor, std::chrono::milliseconds timeout,
                      std::chrono::milliseconds poll_interval = std::chrono::milliseconds(20));

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  BackendResult execute(const BackendJob& job, const ExchangeDir& exchange) const override;

 private:
  BackendDescriptor descriptor_;
  std::chrono::milliseconds timeout_;
  std::chrono::milliseconds poll_interval_;
};

class BackendRegistry {
 public:
  void add(std::shared_ptr<const Backend> backend);
  const Backend* find(const std::string& id) const;
  std::vector<BackendDescriptor> descriptors() const;

 private:
  std::map<std::string, std::shared_ptr<const Backend>> backends_;
};

}  // namespace divergen
