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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgc/graph.hpp"
#include "hgc/propagation.hpp"

namespace hgc {

// Per-class means of (propagated) features, accumulated in 64-bit.
struct PrototypeSet {
  DenseMatrix<double> means;  // K x dim
  std::vector<std::size_t> support;

  std::span<const double> mean(std::size_t c) const { return means.row(c); }
  std::size_t num_classes() const { return means.rows(); }
};

// Exact mean over pool ∩ V_c for every class. Throws UsageError naming the
// first class with no pooled node.
PrototypeSet class_prototypes(const FeatureMatrix& h, const Labels& labels, const NodeMask& pool);

enum class PoolKind { train, labeled };

std::string_view to_string(PoolKind p);
PoolKind parse_pool(std::string_view s);
NodeMask pool_mask(const Labels& labels, PoolKind kind);

struct BudgetPlan {
  double ratio = 0.0;
  std::vector<std::size_t> budgets;     // b_c
  std::vector<std::size_t> pool_sizes;  // |V_c ∩ pool|
  NodeMask pool;                        // selectable target nodes

  std::size_t total() const;
};

// Largest-remainder apportionment of round(r * N_pool) proportional to the
// pooled class sizes, then every nonempty class raised to at least one with
// the excess taken back from the largest budgets. The total is
// max(#nonempty classes, round(r * N_pool)) and b_c never exceeds the
// pooled class size.
BudgetPlan allocate_budgets(const Labels& labels, double ratio, const NodeMask& pool);

// Independent ratio per class: b_c = clamp(round(r_c * n_c), 1, n_c).
BudgetPlan allocate_budgets_per_class(const Labels& labels, std::span<const double> ratios,
                                      const NodeMask& pool);

struct ClassSelection {
  std::vector<NodeId> order;        // in selection order
  std::vector<double> running_sum;  // sum of selected features, 64-bit
  double mean_distance = 0.0;       // ||mu_c - mean(S_c)||_2
};

struct SelectionState {
  std::vector<ClassSelection> classes;

  std::size_t total() const;
  std::vector<NodeId> sorted_ids() const;
};

// Single-class selectors. Candidate order does not matter; ties always go
// to the smallest node id.
ClassSelection herd_class(const FeatureMatrix& h, std::span<const NodeId> candidates,
                          std::span<const double> mu, std::size_t budget);
ClassSelection kcenter_class(const FeatureMatrix& h, std::span<const NodeId> candidates,
                             std::span<const double> mu, std::size_t budget);
ClassSelection topk_class(const FeatureMatrix& h, std::span<const NodeId> candidates,
                          std::span<const double> mu, std::size_t budget);

// Greedy herding: each step adds the candidate whose inclusion brings the
// selection mean closest to the class prototype.
SelectionState herd_select(const FeatureMatrix& h, const Labels& labels, const PrototypeSet& protos,
                           const BudgetPlan& plan);
// Uniform sampling without replacement, reproducible from the seed.
SelectionState random_select(const Labels& labels, const BudgetPlan& plan, std::uint64_t seed);
// Farthest-point traversal seeded at the node nearest the prototype.
SelectionState kcenter_select(const FeatureMatrix& h, const Labels& labels, const PrototypeSet& protos,
                              const BudgetPlan& plan);
// The b_c nodes nearest the prototype.
SelectionState topk_prototype_select(const FeatureMatrix& h, const Labels& labels,
                                     const PrototypeSet& protos, const BudgetPlan& plan);

// Recomputes running sums and mean distances of every class from scratch.
void summarize_selection(const FeatureMatrix& h, const PrototypeSet& protos, SelectionState& state);

enum class Method { herding, random, kcenter, topk_prototype };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct CondensationConfig {
  Method method = Method::herding;
  double ratio = 0.012;
  std::vector<double> class_ratios;  // optional per-class override
  std::vector<std::string> metapaths;
  Fusion fusion = Fusion::concat;
  std::optional<std::uint64_t> seed;
  PoolKind pool = PoolKind::train;
  NeighborPolicy neighbor_policy;
  bool use_raw_features = false;

  // Throws UsageError: ratio outside (0, 1], missing seed for random,
  // no metapaths while propagation is enabled.
  void check() const;

  nlohmann::json to_json() const;
  static CondensationConfig from_json(const nlohmann::json& j);
  // "key = value" lines, '#' starts a comment. Same keys as the JSON form.
  static CondensationConfig from_key_values(std::string_view text);
};

// Features selection runs on: fused metapath propagation, or the raw target
// features in the ablation mode.
FeatureMatrix selection_features(const HeteroGraph& g, const CondensationConfig& cfg,
                                 PropagationCache* cache = nullptr);

struct CondensedResult {
  Subgraph subgraph;
  std::vector<NodeId> selected;  // original target ids, ascending
  BudgetPlan plan;
  PrototypeSet prototypes;
  SelectionState selection;
  nlohmann::json provenance;
};

// Full pipeline: features, prototypes over all labeled nodes, budgets over
// the pool, selection, induced subgraph, provenance.
CondensedResult condense(const HeteroGraph& g, const CondensationConfig& cfg);

}  // namespace hgc
