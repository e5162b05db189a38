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
#include "divergen/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "divergen/error.hpp"

namespace divergen {

namespace {

constexpr std::string_view kNameSlot = "{category_name}";
constexpr std::string_view kDefSlot = "{category_def}";

std::size_t count_occurrences(const std::string& s, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

void replace_first(std::string& s, std::string_view needle, const std::string& with) {
  auto pos = s.find(needle);
  if (pos != std::string::npos) s.replace(pos, needle.size(), with);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// "12." / "12)" / "12:" / "-" / "*" / "•" at the start of a line.
std::string_view strip_marker(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')' || s[i] == ':')) {
    s.remove_prefix(i + 1);
  } else if (!s.empty() && (s[0] == '-' || s[0] == '*')) {
    s.remove_prefix(1);
  } else if (s.starts_with("\xE2\x80\xA2")) {
    s.remove_prefix(3);
  }
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_quotes(std::string_view s) {
  static constexpr std::string_view kOpen[] = {"\"", "'", "\xE2\x80\x9C"};
  static constexpr std::string_view kClose[] = {"\"", "'", "\xE2\x80\x9D"};
  for (std::size_t k = 0; k < 3; ++k) {
    if (s.size() >= kOpen[k].size() + kClose[k].size() && s.starts_with(kOpen[k]) &&
        s.ends_with(kClose[k])) {
      s.remove_prefix(kOpen[k].size());
      s.remove_suffix(kClose[k].size());
      return trim(s);
    }
  }
  return s;
}

}  // namespace

PromptTemplate::PromptTemplate()
    : PromptTemplate("a photo of a single {category_name}, {category_def}", kDefaultBackgroundClause) {}

PromptTemplate::PromptTemplate(std::string pattern, std::string background_clause)
    : pattern_(std::move(pattern)), background_clause_(std::move(background_clause)) {
  if (count_occurrences(pattern_, kNameSlot) != 1) {
    throw ConfigError("prompt pattern must contain {category_name} exactly once");
  }
  if (count_occurrences(pattern_, kDefSlot) > 1) {
    throw ConfigError("prompt pattern may contain {category_def} at most once");
  }
}

std::string render_manual_prompt(const CategoryRecord& category, const PromptTemplate& tmpl) {
  if (category.name.empty()) throw ValidationError("category name is empty");
  std::string out = tmpl.pattern();
  if (category.definition) {
    replace_first(out, kDefSlot, *category.definition);
  } else if (auto pos = out.find(kDefSlot); pos != std::string::npos) {
    // Drop the slot together with the ", " (or " ") that introduces it.
    std::size_t begin = pos;
    while (begin > 0 && out[begin - 1] == ' ') --begin;
    if (begin > 0 && out[begin - 1] == ',') --begin;
    out.erase(begin, pos + kDefSlot.size() - begin);
  }
  replace_first(out, kNameSlot, category.name);
  if (!tmpl.background_clause().empty()) out += ", " + tmpl.background_clause();
  return out;
}

std::string LlmInstruction::text() const {
  std::ostringstream s;
  s << "Please generate " << requested_count << " prompts for a text-to-image model to create"
    << " images of " << category_name << ". Requirements:\n";
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    s << (i + 1) << ") " << constraints[i] << "\n";
  }
  s << "Return one prompt per line.";
  return s.str();
}

LlmInstruction build_llm_instruction(const CategoryRecord& category, int count) {
  if (count < 1) throw ValidationError("requested prompt count must be >= 1");
  return LlmInstruction{
      category.name,
      {"each prompt should be as different as possible",
       "each prompt should ensure that there is only one object in the image",
       "prompts should describe different attributes of the category"},
      count};
}

std::vector<std::string> parse_llm_prompts(const std::string& response, int expected,
                                           const std::string& background_clause) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  const std::string suffix = ", " + background_clause;
  std::istringstream lines(response);
  std::string raw;
  while (std::getline(lines, raw) && static_cast<int>(out.size()) < expected) {
    std::string_view line = trim(raw);
    line = trim(strip_marker(line));
    line = strip_quotes(line);
    std::string prompt = collapse_whitespace(line);
    while (!prompt.empty() && (prompt.back() == '.' || prompt.back() == ',')) prompt.pop_back();
    if (prompt.empty()) continue;
    if (!background_clause.empty() && !ends_with(prompt, background_clause)) prompt += suffix;
    if (seen.insert(prompt).second) out.push_back(std::move(prompt));
  }
  if (out.empty()) throw FormatError("no prompts could be parsed from the response");
  return out;
}

std::vector<int> allocate_generation_budget(int prompt_count, int category_budget) {
  if (prompt_count < 1) throw ValidationError("prompt_count must be >= 1");
  if (category_budget < 0) throw ValidationError("category_budget must be >= 0");
  std::vector<int> out(prompt_count, category_budget / prompt_count);
  for (int i = 0; i < category_budget % prompt_count; ++i) ++out[i];
  return out;
}

PromptPool build_prompt_pool(const CategoryRecord& category, const PromptTemplate& tmpl,
                             const std::vector<std::string>& llm_prompts, int category_budget) {
  PromptPool pool;
  pool.category_id = category.id;
  pool.prompts.push_back(render_manual_prompt(category, tmpl));
  for (const auto& p : llm_prompts) {
    if (std::find(pool.prompts.begin(), pool.prompts.end(), p) == pool.prompts.end()) {
      pool.prompts.push_back(p);
    }
  }
  pool.images_per_prompt =
      allocate_generation_budget(static_cast<int>(pool.prompts.size()), category_budget);
  return pool;
}

nlohmann::json prompt_pool_to_json(const PromptPool& pool) {
  return {{"category_id", pool.category_id},
          {"prompts", pool.prompts},
          {"images_per_prompt", pool.images_per_prompt}};
}

PromptPool prompt_pool_from_json(const nlohmann::json& doc) {
  PromptPool pool;
  try {
    pool.category_id = doc.at("category_id").get<Id>();
    pool.prompts = doc.at("prompts").get<std::vector<std::string>>();
    pool.images_per_prompt = doc.at("images_per_prompt").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("prompt pool: ") + e.what());
  }
  if (pool.prompts.size() != pool.images_per_prompt.size()) {
    throw FormatError("prompt pool " + std::to_string(pool.category_id) +
                      ": prompts and images_per_prompt differ in length");
  }
  for (int n : pool.images_per_prompt) {
    if (n < 0) throw FormatError("prompt pool: negative images_per_prompt");
  }
  return pool;
}

}  // namespace divergen
