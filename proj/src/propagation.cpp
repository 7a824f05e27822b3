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

#include "hgc/propagation.hpp"

#include <cmath>
#include <mutex>

namespace hgc {

NormalizedAdjacency row_normalize(const SparseAdjacency& a) {
  std::vector<double> values(a.values().begin(), a.values().end());
  const auto off = a.offsets();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double sum = 0.0;
    for (auto k = off[r]; k < off[r + 1]; ++k) {
      if (!std::isfinite(values[k]) || values[k] <= 0.0) {
        throw DataError("row_normalize: row " + std::to_string(r) +
                        " holds a non-finite or non-positive value");
      }
      sum += values[k];
    }
    for (auto k = off[r]; k < off[r + 1]; ++k) values[k] /= sum;
  }
  return NormalizedAdjacency(SparseAdjacency(
      a.rows(), a.cols(), std::vector<std::uint64_t>(off.begin(), off.end()),
      std::vector<NodeId>(a.indices().begin(), a.indices().end()), std::move(values)));
}

template <typename T>
DenseMatrix<T> spmm(const NormalizedAdjacency& na, const DenseMatrix<T>& x) {
  const SparseAdjacency& a = na.matrix();
  if (a.cols() != x.rows()) {
    throw std::invalid_argument("spmm: adjacency has " + std::to_string(a.cols()) +
                                " columns but features have " + std::to_string(x.rows()) + " rows");
  }
  const std::size_t dim = x.cols();
  DenseMatrix<T> out(a.rows(), dim);
  const auto n_rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel
  {
    std::vector<double> acc(dim);
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < n_rows; ++r) {
      const auto idx = a.row_indices(static_cast<std::size_t>(r));
      if (idx.empty()) continue;
      // Start from -0.0, the exact additive identity.
      std::fill(acc.begin(), acc.end(), -0.0);
      const auto val = a.row_values(static_cast<std::size_t>(r));
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto src = x.row(idx[k]);
        const double w = val[k];
        for (std::size_t c = 0; c < dim; ++c) acc[c] += w * static_cast<double>(src[c]);
      }
      auto dst = out.row(static_cast<std::size_t>(r));
      for (std::size_t c = 0; c < dim; ++c) dst[c] = static_cast<T>(acc[c]);
    }
  }
  return out;
}

template DenseMatrix<float> spmm(const NormalizedAdjacency&, const DenseMatrix<float>&);
template DenseMatrix<double> spmm(const NormalizedAdjacency&, const DenseMatrix<double>&);

namespace {

bool is_delim(char c) { return c == '-' || c == '>' || c == '<'; }

EdgeTypeId resolve_hop(const HeteroGraph& g, std::string_view text, NodeTypeId from, NodeTypeId to,
                       const std::string& explicit_name) {
  if (!explicit_name.empty()) {
    const auto e = g.find_edge_type(explicit_name);
    if (!e) throw UsageError("metapath '" + std::string(text) + "': unknown relation '" + explicit_name + "'");
    if (g.edge_types[*e].src != from || g.edge_types[*e].dst != to) {
      throw UsageError("metapath '" + std::string(text) + "': relation '" + explicit_name + "' does not connect " +
                       g.node_types[from].name + " to " + g.node_types[to].name);
    }
    return *e;
  }
  std::vector<EdgeTypeId> found;
  for (std::size_t e = 0; e < g.edge_types.size(); ++e) {
    if (g.edge_types[e].src == from && g.edge_types[e].dst == to) found.push_back(static_cast<EdgeTypeId>(e));
  }
  if (found.empty()) {
    throw UsageError("metapath '" + std::string(text) + "': no relation from " + g.node_types[from].name +
                     " to " + g.node_types[to].name);
  }
  if (found.size() > 1) {
    throw UsageError("metapath '" + std::string(text) + "': several relations connect " +
                     g.node_types[from].name + " to " + g.node_types[to].name +
                     "; name one with the type>relation<type form");
  }
  return found.front();
}

}  // namespace

Metapath compile_metapath(const HeteroGraph& g, std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);

  Metapath p;
  p.text = std::string(text);
  std::vector<std::string> hop_names;  // explicit relation per hop, "" if implicit
  std::size_t pos = 0;
  auto read_type = [&]() {
    const std::size_t start = pos;
    while (pos < text.size() && !is_delim(text[pos])) ++pos;
    const std::string_view name = text.substr(start, pos - start);
    const auto t = g.find_node_type(name);
    if (!t) throw UsageError("metapath '" + p.text + "': unknown node type '" + std::string(name) + "'");
    p.types.push_back(*t);
  };

  read_type();
  while (pos < text.size()) {
    const char d = text[pos++];
    if (d == '-') {
      hop_names.emplace_back();
    } else if (d == '>') {
      const auto close = text.find('<', pos);
      if (close == std::string_view::npos) throw UsageError("metapath '" + p.text + "': unterminated relation");
      hop_names.emplace_back(text.substr(pos, close - pos));
      pos = close + 1;
    } else {
      throw UsageError("metapath '" + p.text + "': unexpected '<'");
    }
    read_type();
  }

  if (p.types.size() < 2) throw UsageError("metapath '" + p.text + "': needs at least one hop");
  if (p.types.front() != g.target) {
    throw UsageError("metapath '" + p.text + "': must start at the target type '" +
                     g.node_types[g.target].name + "'");
  }
  for (std::size_t i = 0; i + 1 < p.types.size(); ++i) {
    p.relations.push_back(resolve_hop(g, p.text, p.types[i], p.types[i + 1], hop_names[i]));
  }
  return p;
}

std::vector<Metapath> compile_metapaths(const HeteroGraph& g, std::string_view list) {
  std::vector<Metapath> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    const auto item = list.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (!item.empty()) out.push_back(compile_metapath(g, item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void PropagationCache::bind(const HeteroGraph& g) {
  std::unique_lock lock(mu_);
  if (graph_ && graph_ != &g) throw std::logic_error("PropagationCache reused with a different graph");
  graph_ = &g;
}

std::shared_ptr<const FeatureMatrix> PropagationCache::find(const Key& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  return it->second;
}

std::shared_ptr<const FeatureMatrix> PropagationCache::insert(const Key& key, FeatureMatrix value) {
  std::unique_lock lock(mu_);
  auto [it, inserted] = entries_.try_emplace(key, nullptr);
  if (inserted) it->second = std::make_shared<const FeatureMatrix>(std::move(value));
  return it->second;
}

std::shared_ptr<const NormalizedAdjacency> PropagationCache::normalized(const HeteroGraph& g, EdgeTypeId e) {
  {
    std::shared_lock lock(mu_);
    auto it = normalized_.find(e);
    if (it != normalized_.end()) return it->second;
  }
  auto value = std::make_shared<const NormalizedAdjacency>(row_normalize(g.adjacency[e]));
  std::unique_lock lock(mu_);
  auto [it, inserted] = normalized_.try_emplace(e, value);
  return it->second;
}

std::size_t PropagationCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

FeatureMatrix propagate_metapath(const HeteroGraph& g, const Metapath& p, PropagationCache& cache) {
  if (p.length() == 0 || p.types.size() != p.length() + 1) {
    throw UsageError("propagate_metapath: metapath '" + p.text + "' is not compiled");
  }
  const NodeTypeId terminal = p.types.back();
  if (terminal >= g.features.size() || !g.features[terminal]) {
    throw DataError("metapath '" + p.text + "': terminal type '" + g.node_types[terminal].name +
                    "' has no features");
  }
  cache.bind(g);

  // Longest cached suffix of the relation chain.
  std::size_t start = p.length();
  std::shared_ptr<const FeatureMatrix> current;
  for (std::size_t s = 0; s < p.length(); ++s) {
    PropagationCache::Key key(p.relations.begin() + static_cast<std::ptrdiff_t>(s), p.relations.end());
    if (auto hit = cache.find(key)) {
      current = std::move(hit);
      start = s;
      cache.hits_++;
      break;
    }
  }
  const FeatureMatrix* x = current ? current.get() : &*g.features[terminal];
  for (std::size_t i = start; i-- > 0;) {
    cache.misses_++;
    const auto norm = cache.normalized(g, p.relations[i]);
    PropagationCache::Key key(p.relations.begin() + static_cast<std::ptrdiff_t>(i), p.relations.end());
    current = cache.insert(key, spmm(*norm, *x));
    x = current.get();
  }
  return *x;
}

std::string_view to_string(Fusion f) { return f == Fusion::concat ? "concat" : "mean"; }

Fusion parse_fusion(std::string_view s) {
  if (s == "concat") return Fusion::concat;
  if (s == "mean") return Fusion::mean;
  throw UsageError("unknown fusion '" + std::string(s) + "' (expected concat or mean)");
}

FeatureMatrix propagate_and_fuse(const HeteroGraph& g, const std::vector<Metapath>& paths, Fusion fusion,
                                 PropagationCache* cache) {
  if (paths.empty()) throw UsageError("propagate_and_fuse: at least one metapath is required");
  PropagationCache local;
  PropagationCache& c = cache ? *cache : local;

  std::vector<FeatureMatrix> parts;
  parts.reserve(paths.size());
  for (const auto& p : paths) parts.push_back(propagate_metapath(g, p, c));
  if (parts.size() == 1) return std::move(parts.front());

  const std::size_t rows = parts.front().rows();
  if (fusion == Fusion::concat) {
    std::size_t dim = 0;
    for (const auto& m : parts) dim += m.cols();
    FeatureMatrix out(rows, dim);
    for (std::size_t r = 0; r < rows; ++r) {
      auto dst = out.row(r).begin();
      for (const auto& m : parts) dst = std::copy(m.row(r).begin(), m.row(r).end(), dst);
    }
    return out;
  }

  const std::size_t dim = parts.front().cols();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].cols() != dim) {
      throw UsageError("mean fusion needs equal dims: '" + paths[0].text + "' has " + std::to_string(dim) +
                       ", '" + paths[i].text + "' has " + std::to_string(parts[i].cols()));
    }
  }
  FeatureMatrix out(rows, dim);
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      double s = 0.0;
      for (const auto& m : parts) s += static_cast<double>(m(r, c));
      out(r, c) = static_cast<float>(s * inv);
    }
  }
  return out;
}

}  // namespace hgc
