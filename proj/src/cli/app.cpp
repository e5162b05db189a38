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
#include "divergen/cli.hpp"

#include "common.hpp"
#include "divergen/error.hpp"

namespace divergen {

int run_subcommand(int argc, char** argv) {
  CLI::App app{"Generative dataset construction engine", "divergen"};
  app.require_subcommand(1);
  cli::Runner selected;
  cli::register_data_commands(app, selected);
  cli::register_pipeline_commands(app, selected);
  cli::register_analyze_commands(app, selected);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }
  if (!selected) return kExitConfigError;
  try {
    return selected();
  } catch (const ConfigError& e) {
    cli::log("error", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    cli::log("error", e.what());
    return kExitItemFailure;
  }
}

}  // namespace divergen
