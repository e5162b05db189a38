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
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "divergen/backend.hpp"
#include "divergen/config.hpp"
#include "divergen/dataset.hpp"
#include "divergen/raster.hpp"

namespace divergen::cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOptions {
  std::string config_path;
  int workers = 0;  // 0 keeps the config value
  std::optional<std::uint64_t> seed;
  std::string summary_path;
};

void add_common_options(CLI::App& sub, CommonOptions& opts);

struct Session {
  RunConfig config;
  int workers = 1;
  std::uint64_t seed = 0;
};

/// Loads --config, applies flag overrides, validates and sets the OpenMP
/// thread count.
Session open_session(const CommonOptions& opts);

/// Built-in synthetic backends plus every descriptor from the config.
BackendRegistry make_registry(const RunConfig& config);

/// --exchange, then DIVERGEN_EXCHANGE_DIR, then the config, then
/// `<out>/exchange`.
fs::path resolve_exchange(const std::string& flag, const fs::path& out_dir, const RunConfig& config);

/// A directory argument means `<dir>/dataset.json`.
fs::path dataset_file(const fs::path& path);

/// Writes `image` to `<exchange>/scratch/img_<hash>.png` unless present.
/// The name is derived from the pixels, so a path always denotes one
/// content and reused backend responses stay valid.
fs::path stage_image(const ExchangeDir& exchange, const RgbImage& image);

void log(std::string_view command, const std::string& message);

/// Writes to --summary when given, else to `default_path` when non-empty,
/// else to stdout (or stderr when stdout carries a report).
void write_summary(const CommonOptions& opts, const fs::path& default_path, const json& summary,
                   bool stdout_busy = false);

json failure_entry(const std::string& key, std::int64_t id, const std::string& message);

using Runner = std::function<int()>;

void register_data_commands(CLI::App& app, Runner& selected);
void register_pipeline_commands(CLI::App& app, Runner& selected);
void register_analyze_commands(CLI::App& app, Runner& selected);

}  // namespace divergen::cli
