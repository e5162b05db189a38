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
#include "common.hpp"

#include <cstdio>
#include <iostream>
#include <string_view>

#include <omp.h>

#include "divergen/error.hpp"
#include "divergen/png_io.hpp"
#include "divergen/random.hpp"
#include "divergen/synthetic_backend.hpp"

namespace divergen::cli {

void add_common_options(CLI::App& sub, CommonOptions& opts) {
  sub.add_option("--config", opts.config_path, "Run configuration JSON");
  sub.add_option("--workers", opts.workers, "Parallel workers")->check(CLI::PositiveNumber);
  sub.add_option("--seed", opts.seed, "Global seed");
  sub.add_option("--summary", opts.summary_path, "Where to write the summary JSON");
}

Session open_session(const CommonOptions& opts) {
  Session s;
  if (!opts.config_path.empty()) s.config = load_run_config(opts.config_path);
  if (opts.workers > 0) s.config.workers = opts.workers;
  if (opts.seed) s.config.seed = *opts.seed;
  validate_run_config(s.config);
  s.workers = s.config.workers;
  s.seed = s.config.seed;
  omp_set_num_threads(s.workers);
  return s;
}

BackendRegistry make_registry(const RunConfig& config) {
  BackendRegistry registry;
  registry.add(std::make_shared<SyntheticGenerator>(config.generation.resolution));
  registry.add(std::make_shared<SyntheticMaskPredictor>());
  registry.add(std::make_shared<SyntheticEmbedder>());
  for (const auto& d : config.backends) {
    registry.add(std::make_shared<FileExchangeBackend>(d, std::chrono::milliseconds(config.generation.timeout_ms)));
  }
  return registry;
}

fs::path resolve_exchange(const std::string& flag, const fs::path& out_dir, const RunConfig& config) {
  if (!flag.empty()) return fs::absolute(flag);
  const fs::path fallback = config.paths.exchange_dir.empty() ? out_dir / "exchange" : config.paths.exchange_dir;
  return fs::absolute(exchange_dir_from_env(fallback));
}

fs::path dataset_file(const fs::path& path) {
  return fs::is_directory(path) ? path / "dataset.json" : path;
}

fs::path stage_image(const ExchangeDir& exchange, const RgbImage& image) {
  const auto px = image.data();
  const std::string_view bytes(reinterpret_cast<const char*>(px.data()), px.size());
  const std::uint64_t h = derive_seed({static_cast<std::uint64_t>(image.height()),
                                       static_cast<std::uint64_t>(image.width()), fnv1a64(bytes)});
  char name[40];
  std::snprintf(name, sizeof name, "img_%016llx.png", static_cast<unsigned long long>(h));
  const fs::path path = exchange.scratch_dir() / name;
  if (!fs::exists(path)) {
    fs::create_directories(path.parent_path());
    write_png(path, image);
  }
  return path;
}

void log(std::string_view command, const std::string& message) {
  std::cerr << "divergen " << command << ": " << message << '\n';
}

void write_summary(const CommonOptions& opts, const fs::path& default_path, const json& summary, bool stdout_busy) {
  if (!opts.summary_path.empty()) {
    write_json_file(opts.summary_path, summary);
  } else if (!default_path.empty()) {
    write_json_file(default_path, summary);
  } else {
    (stdout_busy ? std::cerr : std::cout) << summary.dump(2) << '\n';
  }
}

json failure_entry(const std::string& key, std::int64_t id, const std::string& message) {
  return {{key, id}, {"message", message}};
}

}  // namespace divergen::cli
