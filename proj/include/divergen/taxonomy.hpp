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

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "divergen/dataset.hpp"

namespace divergen {

/// Undirected hypernym graph over synset names. A synthetic root is linked
/// to every node without a parent, so any two synsets are connected.
class TaxonomyGraph {
 public:
  /// Edges are (child, parent) pairs. Self-loops are rejected.
  explicit TaxonomyGraph(const std::vector<std::pair<std::string, std::string>>& edges);

  /// One `child<TAB>parent` edge per line; blank lines and `#` comments skipped.
  static TaxonomyGraph from_edge_list(const std::filesystem::path& path);

  bool contains(const std::string& synset) const { return index_.contains(synset); }
  std::size_t node_count() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  /// Hop count between two synsets. Throws ValidationError for unknown names.
  int path_length(const std::string& a, const std::string& b) const;

  /// Hop counts from `source` to every node (indexed like names()).
  std::vector<int> distances_from(const std::string& source) const;

  int node_id(const std::string& synset) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> adjacency_;  // last node is the virtual root
};

/// 1 / (d + 1) with d the undirected shortest-path length.
double path_similarity(const TaxonomyGraph& graph, const std::string& a, const std::string& b);

/// A category name and the synsets it may denote.
struct CategorySenses {
  std::string name;
  std::vector<std::string> synsets;
};

struct CategoryMatch {
  std::string source_category;
  std::string best_target;
  double similarity = 0.0;
};

/// Candidates whose best similarity over all (candidate sense, reference
/// sense) pairs is strictly below `threshold`, each with its best match.
/// Parallel over candidates.
std::vector<CategoryMatch> select_extra_categories(const std::vector<CategorySenses>& candidates,
                                                   const std::vector<CategorySenses>& references,
                                                   const TaxonomyGraph& graph, double threshold);

/// Single-sense convenience overload.
std::vector<CategoryMatch> select_extra_categories(const std::vector<std::string>& candidates,
                                                   const std::vector<std::string>& references,
                                                   const TaxonomyGraph& graph, double threshold);

/// `{"name": ["synset", ...], ...}` → senses, ordered by name.
std::vector<CategorySenses> load_sense_map(const std::filesystem::path& path);

struct LabelSpacePartition {
  std::vector<Id> base_ids;
  std::vector<Id> extra_ids;
  std::size_t total = 0;

  /// Unified index of a category id; base categories come first.
  std::size_t index_of(Id id) const;

  /// Unified indices of the extra categories, dropped from the classifier
  /// at inference time.
  std::vector<std::size_t> truncation_indices() const;
};

/// Both lists sorted by id; throws ValidationError on an id present in both
/// or repeated.
LabelSpacePartition build_label_partition(const std::vector<CategoryRecord>& base,
                                          const std::vector<CategoryRecord>& extra);

}  // namespace divergen
