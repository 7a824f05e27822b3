// Copyright 2026 The HGC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgc/common.hpp"
#include "hgc/sparse.hpp"

namespace hgc {

struct NodeType {
  std::string name;
  std::size_t count = 0;

  friend bool operator==(const NodeType&, const NodeType&) = default;
};

// A directed relation between two node types. Logically undirected data
// declares both directions as separate edge types.
struct EdgeType {
  std::string name;
  NodeTypeId src = 0;
  NodeTypeId dst = 0;

  friend bool operator==(const EdgeType&, const EdgeType&) = default;
};

enum class Split : std::uint8_t { none = 0, train, val, test };

std::string_view to_string(Split s);
std::optional<Split> parse_split(std::string_view s);

// One byte per node; nonzero means "in the mask".
using NodeMask = std::vector<std::uint8_t>;

// Class labels and split assignment for the nodes of the target type.
// A node carries at most one split, so split masks are disjoint.
class Labels {
 public:
  Labels() = default;
  Labels(std::size_t num_nodes, int num_classes)
      : num_classes_(num_classes), classes_(num_nodes, kUnlabeled), splits_(num_nodes, Split::none) {}

  std::size_t size() const { return classes_.size(); }
  int num_classes() const { return num_classes_; }

  ClassId class_of(NodeId v) const { return classes_[v]; }
  bool labeled(NodeId v) const { return classes_[v] != kUnlabeled; }
  Split split_of(NodeId v) const { return splits_[v]; }

  void set_class(NodeId v, ClassId c) { classes_[v] = c; }
  void set_split(NodeId v, Split s) { splits_[v] = s; }

  std::span<const ClassId> classes() const { return classes_; }
  std::span<const Split> splits() const { return splits_; }

  NodeMask labeled_mask() const;
  NodeMask split_mask(Split s) const;
  std::size_t labeled_count() const;

  // V_c (intersected with `pool` when given), ascending node ids, one list
  // per class id 0..K-1.
  std::vector<std::vector<NodeId>> class_members(const NodeMask* pool = nullptr) const;

  friend bool operator==(const Labels&, const Labels&) = default;

 private:
  int num_classes_ = 0;
  std::vector<ClassId> classes_;
  std::vector<Split> splits_;
};

// Typed heterogeneous graph. Treated as immutable once built; read-only
// sharing across threads is safe.
struct HeteroGraph {
  std::vector<NodeType> node_types;
  std::vector<EdgeType> edge_types;
  std::vector<SparseAdjacency> adjacency;              // indexed by EdgeTypeId
  std::vector<std::optional<FeatureMatrix>> features;  // indexed by NodeTypeId
  Labels labels;                                       // over the target type
  NodeTypeId target = 0;

  std::optional<NodeTypeId> find_node_type(std::string_view name) const;
  std::optional<EdgeTypeId> find_edge_type(std::string_view name) const;
  // Throws DataError naming the unknown type.
  NodeTypeId node_type_id(std::string_view name) const;

  std::size_t node_count(NodeTypeId t) const { return node_types[t].count; }
  std::size_t num_nodes() const;
  std::size_t num_edges() const;
  const FeatureMatrix& target_features() const;

  friend bool operator==(const HeteroGraph&, const HeteroGraph&) = default;
};

// SHA-256 over the canonical in-memory content (names, shapes, CSR arrays,
// feature bits, labels, splits). Independent of on-disk encoding.
std::string content_digest(const HeteroGraph& g);

enum class Severity { warning, error };

struct Finding {
  Severity severity = Severity::error;
  std::string code;   // e.g. "dangling_endpoint", "non_finite_value"
  std::string where;  // e.g. "edge type 'pa' row 3 entry 1"
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const;  // no error-severity findings
  std::size_t count(std::string_view code) const;
  std::string to_string() const;
};

// Report-only structural check; never mutates the graph.
ValidationReport validate(const HeteroGraph& g);

// For each node type, new local id -> original id, strictly ascending.
struct IdMap {
  std::vector<std::vector<NodeId>> original_ids;

  std::optional<NodeId> to_new(NodeTypeId t, NodeId original) const;

  friend bool operator==(const IdMap&, const IdMap&) = default;
};

// Which non-target nodes survive extraction. Nodes within `hops` steps of a
// selected target node (walking through non-target nodes only, either edge
// direction) are retained, optionally capped per node type; caps keep the
// smallest ids among each hop's new candidates. Unselected target nodes are
// never admitted.
struct NeighborPolicy {
  int hops = 1;
  std::map<std::string, std::size_t> caps;  // node type name -> max retained

  // "1hop" | "khop:K" | "khop:K:type=cap,type=cap"
  static NeighborPolicy parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const NeighborPolicy&, const NeighborPolicy&) = default;
};

struct Subgraph {
  HeteroGraph graph;
  IdMap ids;
};

// Restricts `g` to the selected target nodes plus the neighbors admitted by
// `policy`, keeping every edge whose endpoints are both retained. Labels
// and splits follow their nodes. Throws UsageError on empty, duplicate or
// out-of-range selections.
Subgraph induced_subgraph(const HeteroGraph& g, std::span<const NodeId> selected,
                          const NeighborPolicy& policy = {});

}  // namespace hgc
