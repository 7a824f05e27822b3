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

#include <atomic>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hgc/graph.hpp"

namespace hgc {

// Relation matrix whose nonzero rows sum to one. Only row_normalize builds it.
class NormalizedAdjacency {
 public:
  const SparseAdjacency& matrix() const { return m_; }

 private:
  friend NormalizedAdjacency row_normalize(const SparseAdjacency& a);
  explicit NormalizedAdjacency(SparseAdjacency m) : m_(std::move(m)) {}
  SparseAdjacency m_;
};

// Divides every entry by its row sum. Zero rows stay zero; the sparsity
// pattern is unchanged. Throws DataError on non-finite or non-positive
// values.
NormalizedAdjacency row_normalize(const SparseAdjacency& a);

// out = A * x with 64-bit accumulation in ascending column order per row,
// rows computed in parallel. Results do not depend on the thread count.
template <typename T>
DenseMatrix<T> spmm(const NormalizedAdjacency& a, const DenseMatrix<T>& x);

// Node-type sequence [c, c1, ..., cl] starting at the target type, together
// with the edge type realizing each hop.
struct Metapath {
  std::vector<NodeTypeId> types;
  std::vector<EdgeTypeId> relations;  // relations[i]: types[i] -> types[i+1]
  std::string text;                   // canonical string form

  std::size_t length() const { return relations.size(); }
  friend bool operator==(const Metapath&, const Metapath&) = default;
};

// Parses "paper-author-paper". A hop may name its relation explicitly,
// "paper>writes<author", which is required when several edge types connect
// the same ordered type pair. Throws UsageError when a hop has no (or an
// ambiguous) relation, when the path does not start at the target type, or
// when it has no hops.
Metapath compile_metapath(const HeteroGraph& g, std::string_view text);

// Comma-separated list of metapaths.
std::vector<Metapath> compile_metapaths(const HeteroGraph& g, std::string_view list);

// Propagated intermediates keyed by the exact relation sequence applied to
// the terminal features (the metapath read from its terminal end). One cache
// serves one graph. Reads are concurrent, inserts serialized.
class PropagationCache {
 public:
  using Key = std::vector<EdgeTypeId>;

  std::shared_ptr<const FeatureMatrix> find(const Key& key) const;
  // Keeps an existing entry if another caller inserted first.
  std::shared_ptr<const FeatureMatrix> insert(const Key& key, FeatureMatrix value);

  std::shared_ptr<const NormalizedAdjacency> normalized(const HeteroGraph& g, EdgeTypeId e);

  std::size_t size() const;
  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

  void bind(const HeteroGraph& g);

 private:
  friend FeatureMatrix propagate_metapath(const HeteroGraph&, const Metapath&, PropagationCache&);

  mutable std::shared_mutex mu_;
  const HeteroGraph* graph_ = nullptr;
  std::map<Key, std::shared_ptr<const FeatureMatrix>> entries_;
  std::map<EdgeTypeId, std::shared_ptr<const NormalizedAdjacency>> normalized_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

// Right-to-left chain product of the normalized relations of `p` applied to
// the terminal type's features. Reuses the longest cached suffix.
FeatureMatrix propagate_metapath(const HeteroGraph& g, const Metapath& p, PropagationCache& cache);

enum class Fusion { concat, mean };

std::string_view to_string(Fusion f);
Fusion parse_fusion(std::string_view s);

// concat: columns of each path in the given order. mean: elementwise
// average, dims must agree.
FeatureMatrix propagate_and_fuse(const HeteroGraph& g, const std::vector<Metapath>& paths,
                                 Fusion fusion, PropagationCache* cache = nullptr);

}  // namespace hgc
