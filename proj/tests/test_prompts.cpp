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

#include <numeric>

#include "divergen/error.hpp"
#include "divergen/prompts.hpp"

using namespace divergen;

namespace {
CategoryRecord cat(std::string name, std::optional<std::string> def = std::nullopt) {
  CategoryRecord c;
  c.id = 1;
  c.name = std::move(name);
  c.definition = std::move(def);
  return c;
}
}  // namespace

TEST_CASE("manual template") {
  const PromptTemplate t;
  CHECK(render_manual_prompt(cat("banana", "an elongated curved fruit"), t) ==
        "a photo of a single banana, an elongated curved fruit, in a white background");
  CHECK(render_manual_prompt(cat("banana"), t) == "a photo of a single banana, in a white background");
  CHECK(render_manual_prompt(cat("fire hose"), t) == "a photo of a single fire hose, in a white background");
  CHECK_THROWS_AS(render_manual_prompt(cat(""), t), ValidationError);
}

TEST_CASE("language-model instruction") {
  const std::string text = build_llm_instruction(cat("dolphin"), 32).text();
  CHECK(text.find("32") != std::string::npos);
  CHECK(text.find("dolphin") != std::string::npos);
  CHECK(text.find("as different as possible") != std::string::npos);
  CHECK(text.find("only one object") != std::string::npos);
  CHECK(text.find("different attributes") != std::string::npos);
  CHECK(build_llm_instruction(cat("dolphin"), 1).constraints.size() == 3);

  std::string a = build_llm_instruction(cat("dolphin"), 8).text();
  std::string b = build_llm_instruction(cat("teapot"), 8).text();
  a.replace(a.find("dolphin"), 7, "X");
  b.replace(b.find("teapot"), 6, "X");
  CHECK(a == b);
  CHECK_THROWS_AS(build_llm_instruction(cat("x"), 0), ValidationError);
}

TEST_CASE("parsing language-model output") {
  const std::string clause = kDefaultBackgroundClause;
  CHECK(parse_llm_prompts("1. A ripe banana with brown spots", 32, clause) ==
        std::vector<std::string>{"A ripe banana with brown spots, in a white background"});
  CHECK(parse_llm_prompts("a banana on a plate, in a white background", 32, clause) ==
        std::vector<std::string>{"a banana on a plate, in a white background"});
  const auto dedup = parse_llm_prompts("- same thing\n\n* same thing\n2) other   thing\n\"quoted\"", 32, clause);
  CHECK(dedup == std::vector<std::string>{"same thing, in a white background", "other thing, in a white background",
                                          "quoted, in a white background"});
  CHECK(parse_llm_prompts("a\nb\nc\nd", 2, clause).size() == 2);
  CHECK_THROWS_AS(parse_llm_prompts("\n  \n", 4, clause), FormatError);
}

TEST_CASE("budget allocation") {
  CHECK(allocate_generation_budget(32, 256) == std::vector<int>(32, 8));
  CHECK(allocate_generation_budget(128, 256) == std::vector<int>(128, 2));
  CHECK(allocate_generation_budget(3, 10) == std::vector<int>{4, 3, 3});
  for (int n = 1; n < 50; ++n) {
    for (int budget : {0, 1, 7, 100, 257}) {
      const auto v = allocate_generation_budget(n, budget);
      CHECK(std::accumulate(v.begin(), v.end(), 0) == budget);
      CHECK(*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()) <= 1);
    }
  }
}

TEST_CASE("prompt pool") {
  const PromptPool pool = build_prompt_pool(cat("banana"), PromptTemplate{}, {"x, in a white background"}, 5);
  CHECK(pool.prompts.size() == 2);
  CHECK(pool.prompts[0] == "a photo of a single banana, in a white background");
  CHECK(pool.images_per_prompt == std::vector<int>{3, 2});
  CHECK(prompt_pool_from_json(prompt_pool_to_json(pool)) == pool);
}
