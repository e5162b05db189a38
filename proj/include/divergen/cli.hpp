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

namespace divergen {

inline constexpr int kExitOk = 0;
inline constexpr int kExitItemFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Entry point of the `divergen` tool. argv[1] names the subcommand:
/// prompts, categories, generate, annotate, filter, compose, analyze,
/// validate or config. Returns 0 on full success, 1 when any item failed
/// and 2 on a configuration or usage error.
int run_subcommand(int argc, char** argv);

}  // namespace divergen
