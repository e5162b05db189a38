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
#include "divergen/taxonomy.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <set>

#include "divergen/error.hpp"

namespace divergen {

TaxonomyGraph::TaxonomyGraph(const std::vector<std::pair<std::string, std::string>>& edges) {
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = index_.try_emplace(name, static_cast<int>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  };
  std::vector<std::pair<int, int>> links;
  std::vector<bool> has_parent;
  for (const auto& [child, parent] : edges) {
    if (child == parent) throw ValidationError("taxonomy self-loop on " + child);
    const int c = intern(child);
    const int p = intern(parent);
    links.emplace_back(c, p);
    if (has_parent.size() < names_.size()) has_parent.resize(names_.size(), false);
    has_parent[c] = true;
  }
  has_parent.resize(names_.size(), false);

  const int root = static_cast<int>(names_.size());
  adjacency_.assign(names_.size() + 1, {});
  std::set<std::pair<int, int>> seen;
  auto connect = [&](int a, int b) {
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) return;
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  };
  for (auto [c, p] : links) connect(c, p);
  for (int n = 0; n < root; ++n) {
    if (!has_parent[n]) connect(n, root);
  }
}

TaxonomyGraph TaxonomyGraph::from_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected child<TAB>parent");
    }
    edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return TaxonomyGraph(edges);
}

int TaxonomyGraph::node_id(const std::string& synset) const {
  auto it = index_.find(synset);
  if (it == index_.end()) throw ValidationError("unknown synset '" + synset + "'");
  return it->second;
}

std::vector<int> TaxonomyGraph::distances_from(const std::string& source) const {
  std::vector<int> dist(adjacency_.size(), -1);
  std::deque<int> queue{node_id(source)};
  dist[queue.front()] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adjacency_[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  dist.pop_back();
  return dist;
}

int TaxonomyGraph::path_length(const std::string& a, const std::string& b) const {
  const int target = node_id(b);
  return distances_from(a)[target];
}

double path_similarity(const TaxonomyGraph& graph, const std::string& a, const std::string& b) {
  return 1.0 / (graph.path_length(a, b) + 1.0);
}

std::vector<CategoryMatch> select_extra_categories(const std::vector<CategorySenses>& candidates,
                                                   const std::vector<CategorySenses>& references,
                                                   const TaxonomyGraph& graph, double threshold) {
  if (references.empty()) throw ValidationError("reference category list is empty");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("threshold must be in (0, 1]");

  // Reference synset node -> owning reference category (first by name order).
  std::vector<std::pair<int, std::size_t>> ref_nodes;
  for (std::size_t r = 0; r < references.size(); ++r) {
    for (const auto& s : references[r].synsets) ref_nodes.emplace_back(graph.node_id(s), r);
  }
  for (const auto& c : candidates) {
    for (const auto& s : c.synsets) graph.node_id(s);
  }

  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
  std::vector<CategoryMatch> best(candidates.size());
  std::vector<char> keep(candidates.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& cand = candidates[i];
    int best_d = std::numeric_limits<int>::max();
    std::size_t best_ref = 0;
    for (const auto& sense : cand.synsets) {
      const auto dist = graph.distances_from(sense);
      for (auto [node, r] : ref_nodes) {
        if (dist[node] < best_d || (dist[node] == best_d && r < best_ref)) {
          best_d = dist[node];
          best_ref = r;
        }
      }
    }
    if (best_d == std::numeric_limits<int>::max()) continue;  // candidate without senses
    const double sim = 1.0 / (best_d + 1.0);
    best[i] = {cand.name, references[best_ref].name, sim};
    keep[i] = sim < threshold ? 1 : 0;
  }

  std::vector<CategoryMatch> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (keep[i]) out.push_back(best[i]);
  }
  return out;
}

std::vector<CategoryMatch> select_extra_categories(const std::vector<std::string>& candidates,
                                                   const std::vector<std::string>& references,
                                                   const TaxonomyGraph& graph, double threshold) {
  auto wrap = [](const std::vector<std::string>& names) {
    std::vector<CategorySenses> out;
    for (const auto& n : names) out.push_back({n, {n}});
    return out;
  };
  return select_extra_categories(wrap(candidates), wrap(references), graph, threshold);
}

std::vector<CategorySenses> load_sense_map(const std::filesystem::path& path) {
  const nlohmann::json doc = read_json_file(path);
  if (!doc.is_object()) throw FormatError(path.string() + ": expected an object of name -> synsets");
  std::vector<CategorySenses> out;
  for (const auto& [name, synsets] : doc.items()) {
    CategorySenses cs{name, {}};
    if (synsets.is_string()) {
      cs.synsets.push_back(synsets.get<std::string>());
    } else if (synsets.is_array()) {
      for (const auto& s : synsets) {
        if (!s.is_string()) throw FormatError(path.string() + ": synset names must be strings");
        cs.synsets.push_back(s.get<std::string>());
      }
    } else {
      throw FormatError(path.string() + ": '" + name + "' must map to a synset or a list");
    }
    out.push_back(std::move(cs));
  }
  return out;
}

std::size_t LabelSpacePartition::index_of(Id id) const {
  if (auto it = std::lower_bound(base_ids.begin(), base_ids.end(), id);
      it != base_ids.end() && *it == id) {
    return static_cast<std::size_t>(it - base_ids.begin());
  }
  if (auto it = std::lower_bound(extra_ids.begin(), extra_ids.end(), id);
      it != extra_ids.end() && *it == id) {
    return base_ids.size() + static_cast<std::size_t>(it - extra_ids.begin());
  }
  throw ValidationError("category id " + std::to_string(id) + " is not in the label space");
}

std::vector<std::size_t> LabelSpacePartition::truncation_indices() const {
  std::vector<std::size_t> out(extra_ids.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = base_ids.size() + i;
  return out;
}

LabelSpacePartition build_label_partition(const std::vector<CategoryRecord>& base,
                                          const std::vector<CategoryRecord>& extra) {
  LabelSpacePartition p;
  for (const auto& c : base) p.base_ids.push_back(c.id);
  for (const auto& c : extra) p.extra_ids.push_back(c.id);
  std::sort(p.base_ids.begin(), p.base_ids.end());
  std::sort(p.extra_ids.begin(), p.extra_ids.end());
  std::vector<Id> all = p.base_ids;
  all.insert(all.end(), p.extra_ids.begin(), p.extra_ids.end());
  std::sort(all.begin(), all.end());
  if (auto dup = std::adjacent_find(all.begin(), all.end()); dup != all.end()) {
    throw ValidationError("category id collision: " + std::to_string(*dup));
  }
  p.total = all.size();
  return p;
}

}  // namespace divergen
