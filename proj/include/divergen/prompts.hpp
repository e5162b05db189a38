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

#include <string>
#include <vector>

#include <json.hpp>

#include "divergen/dataset.hpp"

namespace divergen {

inline constexpr char kDefaultBackgroundClause[] = "in a white background";

/// `pattern` carries `{category_name}` exactly once and optionally
/// `{category_def}`. The background clause is appended after a comma.
class PromptTemplate {
 public:
  PromptTemplate();
  PromptTemplate(std::string pattern, std::string background_clause);

  const std::string& pattern() const { return pattern_; }
  const std::string& background_clause() const { return background_clause_; }

 private:
  std::string pattern_;
  std::string background_clause_;
};

/// Fills the template. Without a definition, the definition slot and the
/// separator in front of it are dropped.
std::string render_manual_prompt(const CategoryRecord& category, const PromptTemplate& tmpl);

struct LlmInstruction {
  std::string category_name;
  std::vector<std::string> constraints;
  int requested_count = 0;

  /// The message text sent to the language model.
  std::string text() const;
};

LlmInstruction build_llm_instruction(const CategoryRecord& category, int count);

/// One prompt per non-empty line. Enumeration markers ("1.", "2)", "-",
/// "*") and wrapping quotes are stripped, whitespace is collapsed, the
/// background clause is appended unless already present, duplicates are
/// dropped and at most `expected` prompts are returned. Throws FormatError
/// when nothing parses.
std::vector<std::string> parse_llm_prompts(const std::string& response, int expected,
                                           const std::string& background_clause);

/// Even split of `category_budget` over `prompt_count` prompts; the first
/// budget % n prompts get one extra image.
std::vector<int> allocate_generation_budget(int prompt_count, int category_budget);

struct PromptPool {
  Id category_id = 0;
  std::vector<std::string> prompts;
  std::vector<int> images_per_prompt;

  friend bool operator==(const PromptPool&, const PromptPool&) = default;
};

/// Manual prompt first, then the parsed language-model prompts, with the
/// budget spread over however many prompts there are.
PromptPool build_prompt_pool(const CategoryRecord& category, const PromptTemplate& tmpl,
                             const std::vector<std::string>& llm_prompts, int category_budget);

nlohmann::json prompt_pool_to_json(const PromptPool& pool);
PromptPool prompt_pool_from_json(const nlohmann::json& doc);

}  // namespace divergen
