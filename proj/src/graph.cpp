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

#include "hgc/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "hgc/digest.hpp"

namespace hgc {

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::none: break;
  }
  return "none";
}

std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  return std::nullopt;
}

NodeMask Labels::labeled_mask() const {
  NodeMask m(size(), 0);
  for (std::size_t v = 0; v < size(); ++v) m[v] = classes_[v] != kUnlabeled;
  return m;
}

NodeMask Labels::split_mask(Split s) const {
  NodeMask m(size(), 0);
  for (std::size_t v = 0; v < size(); ++v) m[v] = splits_[v] == s && classes_[v] != kUnlabeled;
  return m;
}

std::size_t Labels::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(classes_.begin(), classes_.end(), [](ClassId c) { return c != kUnlabeled; }));
}

std::vector<std::vector<NodeId>> Labels::class_members(const NodeMask* pool) const {
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(std::max(num_classes_, 0)));
  for (std::size_t v = 0; v < size(); ++v) {
    const ClassId c = classes_[v];
    if (c < 0 || c >= num_classes_) continue;
    if (pool && !(*pool)[v]) continue;
    out[static_cast<std::size_t>(c)].push_back(static_cast<NodeId>(v));
  }
  return out;
}

std::optional<NodeTypeId> HeteroGraph::find_node_type(std::string_view name) const {
  for (std::size_t t = 0; t < node_types.size(); ++t) {
    if (node_types[t].name == name) return static_cast<NodeTypeId>(t);
  }
  return std::nullopt;
}

std::optional<EdgeTypeId> HeteroGraph::find_edge_type(std::string_view name) const {
  for (std::size_t e = 0; e < edge_types.size(); ++e) {
    if (edge_types[e].name == name) return static_cast<EdgeTypeId>(e);
  }
  return std::nullopt;
}

NodeTypeId HeteroGraph::node_type_id(std::string_view name) const {
  if (auto t = find_node_type(name)) return *t;
  throw DataError("unknown node type '" + std::string(name) + "'");
}

std::size_t HeteroGraph::num_nodes() const {
  std::size_t n = 0;
  for (const auto& t : node_types) n += t.count;
  return n;
}

std::size_t HeteroGraph::num_edges() const {
  std::size_t n = 0;
  for (const auto& a : adjacency) n += a.nnz();
  return n;
}

const FeatureMatrix& HeteroGraph::target_features() const {
  if (target >= features.size() || !features[target]) {
    throw DataError("target type has no feature matrix");
  }
  return *features[target];
}

std::string content_digest(const HeteroGraph& g) {
  Sha256 h;
  auto put_u64 = [&](std::uint64_t v) { h.update(&v, sizeof v); };
  auto put_str = [&](const std::string& s) {
    put_u64(s.size());
    h.update(s);
  };
  put_u64(g.node_types.size());
  for (const auto& t : g.node_types) {
    put_str(t.name);
    put_u64(t.count);
  }
  put_u64(g.edge_types.size());
  for (std::size_t e = 0; e < g.edge_types.size(); ++e) {
    put_str(g.edge_types[e].name);
    put_u64(g.edge_types[e].src);
    put_u64(g.edge_types[e].dst);
    if (e < g.adjacency.size()) {
      const auto& a = g.adjacency[e];
      h.update_span(a.offsets());
      h.update_span(a.indices());
      h.update_span(a.values());
    }
  }
  for (const auto& f : g.features) {
    put_u64(f ? f->cols() : ~std::uint64_t{0});
    if (f) h.update_span(f->data());
  }
  put_u64(g.target);
  put_u64(static_cast<std::uint64_t>(g.labels.num_classes()));
  h.update_span(g.labels.classes());
  h.update_span(g.labels.splits());
  return h.hex_digest();
}

bool ValidationReport::ok() const {
  return std::none_of(findings.begin(), findings.end(),
                      [](const Finding& f) { return f.severity == Severity::error; });
}

std::size_t ValidationReport::count(std::string_view code) const {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; }));
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& f : findings) {
    os << (f.severity == Severity::error ? "error" : "warning") << " [" << f.code << "] "
       << f.where << ": " << f.message << '\n';
  }
  return os.str();
}

namespace {

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == '-';
  });
}

void check_adjacency(const HeteroGraph& g, std::size_t e, std::vector<Finding>& out) {
  const auto& et = g.edge_types[e];
  const auto& a = g.adjacency[e];
  const std::string where = "edge type '" + et.name + "'";
  auto add = [&](std::string code, std::string loc, std::string msg) {
    out.push_back({Severity::error, std::move(code), where + loc, std::move(msg)});
  };

  if (et.src < g.node_types.size() && a.rows() != g.node_types[et.src].count) {
    add("shape_mismatch", "", "rows " + std::to_string(a.rows()) + " != count of '" +
                                  g.node_types[et.src].name + "' (" +
                                  std::to_string(g.node_types[et.src].count) + ")");
  }
  if (et.dst < g.node_types.size() && a.cols() != g.node_types[et.dst].count) {
    add("shape_mismatch", "", "cols " + std::to_string(a.cols()) + " != count of '" +
                                  g.node_types[et.dst].name + "' (" +
                                  std::to_string(g.node_types[et.dst].count) + ")");
  }

  const auto off = a.offsets();
  if (off.size() != a.rows() + 1 || off.front() != 0 || off.back() != a.nnz()) {
    add("bad_offsets", "", "offsets must start at 0 and end at nnz");
    return;
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (off[r + 1] < off[r]) {
      add("bad_offsets", " row " + std::to_string(r), "offsets decrease");
      return;
    }
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto idx = a.row_indices(r);
    const auto val = a.row_values(r);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::string loc = " row " + std::to_string(r) + " entry " + std::to_string(k);
      if (idx[k] >= a.cols()) {
        add("dangling_endpoint", loc,
            "column " + std::to_string(idx[k]) + " >= " + std::to_string(a.cols()));
      }
      if (k > 0 && idx[k] <= idx[k - 1]) {
        add("unsorted_row", loc, "column indices not strictly increasing");
      }
      if (!std::isfinite(val[k])) {
        add("non_finite_value", loc, "adjacency value is not finite");
      } else if (val[k] <= 0.0) {
        add("non_positive_weight", loc, "edge weight must be positive");
      }
    }
  }
}

}  // namespace

ValidationReport validate(const HeteroGraph& g) {
  ValidationReport rep;
  auto& out = rep.findings;
  auto err = [&](std::string code, std::string where, std::string msg) {
    out.push_back({Severity::error, std::move(code), std::move(where), std::move(msg)});
  };

  std::set<std::string> seen;
  for (std::size_t t = 0; t < g.node_types.size(); ++t) {
    const auto& name = g.node_types[t].name;
    if (!valid_name(name)) err("bad_name", "node type " + std::to_string(t), "invalid name '" + name + "'");
    if (!seen.insert(name).second) err("duplicate_name", "node type " + std::to_string(t), "duplicate name '" + name + "'");
  }
  seen.clear();
  for (std::size_t e = 0; e < g.edge_types.size(); ++e) {
    const auto& et = g.edge_types[e];
    const std::string where = "edge type " + std::to_string(e);
    if (!valid_name(et.name)) err("bad_name", where, "invalid name '" + et.name + "'");
    if (!seen.insert(et.name).second) err("duplicate_name", where, "duplicate name '" + et.name + "'");
    if (et.src >= g.node_types.size() || et.dst >= g.node_types.size()) {
      err("unknown_node_type", where, "references an undeclared node type");
    }
  }

  if (g.adjacency.size() != g.edge_types.size()) {
    err("shape_mismatch", "graph", "adjacency count differs from edge type count");
  } else {
    for (std::size_t e = 0; e < g.edge_types.size(); ++e) check_adjacency(g, e, out);
  }

  if (g.features.size() != g.node_types.size()) {
    err("shape_mismatch", "graph", "feature slot count differs from node type count");
  } else {
    for (std::size_t t = 0; t < g.features.size(); ++t) {
      if (!g.features[t]) continue;
      const auto& f = *g.features[t];
      const std::string where = "features of '" + g.node_types[t].name + "'";
      if (f.rows() != g.node_types[t].count) {
        err("feature_rows", where,
            "rows " + std::to_string(f.rows()) + " != node count " + std::to_string(g.node_types[t].count));
      }
      for (std::size_t r = 0; r < f.rows(); ++r) {
        for (std::size_t c = 0; c < f.cols(); ++c) {
          if (!std::isfinite(f(r, c))) {
            err("non_finite_value", where + " (" + std::to_string(r) + ", " + std::to_string(c) + ")",
                "feature value is not finite");
          }
        }
      }
    }
  }

  if (g.node_types.empty()) return rep;  // the empty graph is valid
  if (g.target >= g.node_types.size()) {
    err("target_out_of_range", "graph", "target type id is not declared");
    return rep;
  }
  if (g.target >= g.features.size() || !g.features[g.target]) {
    err("missing_target_features", "graph", "target type has no features");
  }
  const auto& lab = g.labels;
  if (lab.num_classes() <= 0 && g.node_types[g.target].count > 0) {
    err("missing_labels", "labels", "num_classes must be positive");
  }
  if (lab.size() != g.node_types[g.target].count) {
    err("label_size", "labels",
        "label vector has " + std::to_string(lab.size()) + " entries for " +
            std::to_string(g.node_types[g.target].count) + " target nodes");
  }
  for (std::size_t v = 0; v < lab.size(); ++v) {
    const ClassId c = lab.class_of(static_cast<NodeId>(v));
    if (c != kUnlabeled && (c < 0 || c >= lab.num_classes())) {
      err("class_out_of_range", "node " + std::to_string(v),
          "class " + std::to_string(c) + " not in [0, " + std::to_string(lab.num_classes()) + ")");
    }
    if (c == kUnlabeled && lab.split_of(static_cast<NodeId>(v)) != Split::none) {
      err("split_unlabeled", "node " + std::to_string(v), "unlabeled node assigned to a split");
    }
  }
  return rep;
}

std::optional<NodeId> IdMap::to_new(NodeTypeId t, NodeId original) const {
  const auto& ids = original_ids[t];
  auto it = std::lower_bound(ids.begin(), ids.end(), original);
  if (it == ids.end() || *it != original) return std::nullopt;
  return static_cast<NodeId>(it - ids.begin());
}

NeighborPolicy NeighborPolicy::parse(std::string_view text) {
  NeighborPolicy p;
  if (text == "1hop") return p;
  auto fail = [&]() {
    return UsageError("bad neighbor policy '" + std::string(text) +
                      "' (expected 1hop, khop:K or khop:K:type=cap,...)");
  };
  if (!text.starts_with("khop:")) throw fail();
  std::string_view rest = text.substr(5);
  const auto colon = rest.find(':');
  const std::string_view hops = rest.substr(0, colon);
  auto [ptr, ec] = std::from_chars(hops.data(), hops.data() + hops.size(), p.hops);
  if (ec != std::errc{} || ptr != hops.data() + hops.size() || p.hops < 1) throw fail();
  if (colon == std::string_view::npos) return p;
  std::string_view caps = rest.substr(colon + 1);
  while (!caps.empty()) {
    const auto comma = caps.find(',');
    const std::string_view item = caps.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) throw fail();
    std::size_t cap = 0;
    const std::string_view num = item.substr(eq + 1);
    auto [p2, ec2] = std::from_chars(num.data(), num.data() + num.size(), cap);
    if (ec2 != std::errc{} || p2 != num.data() + num.size()) throw fail();
    p.caps[std::string(item.substr(0, eq))] = cap;
    if (comma == std::string_view::npos) break;
    caps = caps.substr(comma + 1);
  }
  return p;
}

std::string NeighborPolicy::to_string() const {
  if (hops == 1 && caps.empty()) return "1hop";
  std::string s = "khop:" + std::to_string(hops);
  if (!caps.empty()) {
    s += ':';
    bool first = true;
    for (const auto& [name, cap] : caps) {
      if (!first) s += ',';
      first = false;
      s += name + "=" + std::to_string(cap);
    }
  }
  return s;
}

Subgraph induced_subgraph(const HeteroGraph& g, std::span<const NodeId> selected,
                          const NeighborPolicy& policy) {
  if (selected.empty()) throw UsageError("induced_subgraph: empty selection");
  const std::size_t n_types = g.node_types.size();
  const NodeTypeId target = g.target;

  std::vector<std::vector<std::uint8_t>> keep(n_types);
  for (std::size_t t = 0; t < n_types; ++t) keep[t].assign(g.node_types[t].count, 0);

  for (NodeId v : selected) {
    if (v >= g.node_types[target].count) {
      throw UsageError("induced_subgraph: node id " + std::to_string(v) + " out of range");
    }
    if (keep[target][v]) throw UsageError("induced_subgraph: duplicate node id " + std::to_string(v));
    keep[target][v] = 1;
  }

  std::vector<std::size_t> cap(n_types, SIZE_MAX);
  for (const auto& [name, c] : policy.caps) cap[g.node_type_id(name)] = c;
  std::vector<std::size_t> retained(n_types, 0);

  // frontier[t][v]: node admitted in the previous hop.
  std::vector<std::vector<std::uint8_t>> frontier = keep;
  for (int hop = 0; hop < policy.hops; ++hop) {
    std::vector<std::vector<std::uint8_t>> cand(n_types);
    for (std::size_t t = 0; t < n_types; ++t) cand[t].assign(g.node_types[t].count, 0);
    for (std::size_t e = 0; e < g.edge_types.size(); ++e) {
      const auto& et = g.edge_types[e];
      const auto& a = g.adjacency[e];
      for (std::size_t r = 0; r < a.rows(); ++r) {
        for (NodeId c : a.row_indices(r)) {
          if (frontier[et.src][r] && et.dst != target && !keep[et.dst][c]) cand[et.dst][c] = 1;
          if (frontier[et.dst][c] && et.src != target && !keep[et.src][r]) cand[et.src][r] = 1;
        }
      }
    }
    bool any = false;
    for (std::size_t t = 0; t < n_types; ++t) {
      frontier[t].assign(g.node_types[t].count, 0);
      for (std::size_t v = 0; v < cand[t].size(); ++v) {
        if (!cand[t][v] || retained[t] >= cap[t]) continue;
        keep[t][v] = 1;
        frontier[t][v] = 1;
        ++retained[t];
        any = true;
      }
    }
    if (!any) break;
  }

  Subgraph out;
  out.ids.original_ids.resize(n_types);
  std::vector<std::vector<NodeId>> new_id(n_types);
  for (std::size_t t = 0; t < n_types; ++t) {
    new_id[t].assign(g.node_types[t].count, 0);
    for (std::size_t v = 0; v < keep[t].size(); ++v) {
      if (!keep[t][v]) continue;
      new_id[t][v] = static_cast<NodeId>(out.ids.original_ids[t].size());
      out.ids.original_ids[t].push_back(static_cast<NodeId>(v));
    }
  }

  HeteroGraph& h = out.graph;
  h.target = target;
  h.edge_types = g.edge_types;
  for (std::size_t t = 0; t < n_types; ++t) {
    h.node_types.push_back({g.node_types[t].name, out.ids.original_ids[t].size()});
  }
  for (std::size_t e = 0; e < g.edge_types.size(); ++e) {
    const auto& et = g.edge_types[e];
    const auto& a = g.adjacency[e];
    std::vector<EdgeRecord> edges;
    for (NodeId r : out.ids.original_ids[et.src]) {
      const auto idx = a.row_indices(r);
      const auto val = a.row_values(r);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (keep[et.dst][idx[k]]) edges.push_back({new_id[et.src][r], new_id[et.dst][idx[k]], val[k]});
      }
    }
    h.adjacency.push_back(SparseAdjacency::from_edges(h.node_types[et.src].count,
                                                      h.node_types[et.dst].count, std::move(edges)));
  }
  for (std::size_t t = 0; t < n_types; ++t) {
    if (!g.features[t]) {
      h.features.emplace_back(std::nullopt);
      continue;
    }
    const auto& f = *g.features[t];
    FeatureMatrix sub(out.ids.original_ids[t].size(), f.cols());
    for (std::size_t i = 0; i < out.ids.original_ids[t].size(); ++i) {
      const auto src = f.row(out.ids.original_ids[t][i]);
      std::copy(src.begin(), src.end(), sub.row(i).begin());
    }
    h.features.emplace_back(std::move(sub));
  }
  const auto& tids = out.ids.original_ids[target];
  h.labels = Labels(tids.size(), g.labels.num_classes());
  for (std::size_t i = 0; i < tids.size(); ++i) {
    h.labels.set_class(static_cast<NodeId>(i), g.labels.class_of(tids[i]));
    h.labels.set_split(static_cast<NodeId>(i), g.labels.split_of(tids[i]));
  }
  return out;
}

}  // namespace hgc
