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

#include "hgc/condense.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>

#include "hgc/common.hpp"

namespace hgc {

using nlohmann::json;

PrototypeSet class_prototypes(const FeatureMatrix& h, const Labels& labels, const NodeMask& pool) {
  if (h.rows() != labels.size()) {
    throw UsageError("class_prototypes: " + std::to_string(h.rows()) + " feature rows for " +
                     std::to_string(labels.size()) + " labeled slots");
  }
  const auto members = labels.class_members(&pool);
  PrototypeSet protos;
  protos.means = DenseMatrix<double>(members.size(), h.cols());
  protos.support.resize(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) {
      throw UsageError("class " + std::to_string(c) + " has no nodes to build a prototype from");
    }
    auto mu = protos.means.row(c);
    for (NodeId v : members[c]) {
      const auto x = h.row(v);
      for (std::size_t k = 0; k < x.size(); ++k) mu[k] += static_cast<double>(x[k]);
    }
    const auto n = static_cast<double>(members[c].size());
    for (double& m : mu) m /= n;
    protos.support[c] = members[c].size();
  }
  return protos;
}

std::string_view to_string(PoolKind p) { return p == PoolKind::train ? "train" : "labeled"; }

PoolKind parse_pool(std::string_view s) {
  if (s == "train") return PoolKind::train;
  if (s == "labeled") return PoolKind::labeled;
  throw UsageError("unknown pool '" + std::string(s) + "' (expected train or labeled)");
}

NodeMask pool_mask(const Labels& labels, PoolKind kind) {
  return kind == PoolKind::train ? labels.split_mask(Split::train) : labels.labeled_mask();
}

std::size_t BudgetPlan::total() const { return std::accumulate(budgets.begin(), budgets.end(), std::size_t{0}); }

namespace {

std::vector<std::size_t> pooled_sizes(const Labels& labels, const NodeMask& pool) {
  if (pool.size() != labels.size()) throw UsageError("pool mask size does not match the label vector");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(labels.num_classes()), 0);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const ClassId c = labels.class_of(static_cast<NodeId>(v));
    if (pool[v] && c != kUnlabeled) ++sizes[static_cast<std::size_t>(c)];
  }
  return sizes;
}

}  // namespace

BudgetPlan allocate_budgets(const Labels& labels, double ratio, const NodeMask& pool) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw UsageError("ratio must lie in (0, 1], got " + std::to_string(ratio));
  }
  BudgetPlan plan;
  plan.ratio = ratio;
  plan.pool = pool;
  plan.pool_sizes = pooled_sizes(labels, pool);
  const auto& n = plan.pool_sizes;
  const std::size_t K = n.size();
  const std::size_t total_pool = std::accumulate(n.begin(), n.end(), std::size_t{0});
  if (total_pool == 0) {
    throw UsageError("the selection pool holds no labeled node; choose a larger pool");
  }
  const std::size_t nonempty =
      static_cast<std::size_t>(std::count_if(n.begin(), n.end(), [](std::size_t s) { return s > 0; }));
  const auto total = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(total_pool)));

  // Integer largest-remainder: quota_c = total * n_c / N.
  plan.budgets.assign(K, 0);
  std::vector<std::size_t> remainder(K, 0);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < K; ++c) {
    plan.budgets[c] = total * n[c] / total_pool;
    remainder[c] = total * n[c] % total_pool;
    assigned += plan.budgets[c];
  }
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    if (n[a] != n[b]) return n[a] > n[b];
    return a < b;
  });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++plan.budgets[order[i % K]];

  for (std::size_t c = 0; c < K; ++c) {
    if (n[c] > 0 && plan.budgets[c] == 0) plan.budgets[c] = 1;
  }
  const std::size_t goal = std::max(nonempty, total);
  std::size_t sum = plan.total();
  while (sum > goal) {
    std::size_t pick = K;
    for (std::size_t c = 0; c < K; ++c) {
      if (plan.budgets[c] > 1 && (pick == K || plan.budgets[c] > plan.budgets[pick])) pick = c;
    }
    if (pick == K) break;  // every class already at its floor
    --plan.budgets[pick];
    --sum;
  }
  return plan;
}

BudgetPlan allocate_budgets_per_class(const Labels& labels, std::span<const double> ratios,
                                      const NodeMask& pool) {
  if (ratios.size() != static_cast<std::size_t>(labels.num_classes())) {
    throw UsageError("expected " + std::to_string(labels.num_classes()) + " per-class ratios, got " +
                     std::to_string(ratios.size()));
  }
  BudgetPlan plan;
  plan.pool = pool;
  plan.pool_sizes = pooled_sizes(labels, pool);
  plan.budgets.assign(ratios.size(), 0);
  std::size_t total_pool = 0;
  for (std::size_t c = 0; c < ratios.size(); ++c) {
    if (!(ratios[c] > 0.0 && ratios[c] <= 1.0)) {
      throw UsageError("class " + std::to_string(c) + " ratio must lie in (0, 1]");
    }
    const std::size_t n = plan.pool_sizes[c];
    total_pool += n;
    if (n == 0) continue;
    const auto b = std::llround(ratios[c] * static_cast<double>(n));
    plan.budgets[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::max<long long>(b, 1)), 1, n);
  }
  if (total_pool == 0) throw UsageError("the selection pool holds no labeled node; choose a larger pool");
  plan.ratio = static_cast<double>(plan.total()) / static_cast<double>(total_pool);
  return plan;
}

std::size_t SelectionState::total() const {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.order.size();
  return n;
}

std::vector<NodeId> SelectionState::sorted_ids() const {
  std::vector<NodeId> out;
  out.reserve(total());
  for (const auto& c : classes) out.insert(out.end(), c.order.begin(), c.order.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double sq_dist_to(std::span<const double> mu, std::span<const float> x) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double diff = mu[k] - static_cast<double>(x[k]);
    d2 += diff * diff;
  }
  return d2;
}

double sq_dist(std::span<const float> a, std::span<const float> b) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    d2 += diff * diff;
  }
  return d2;
}

// (key, id) lexicographic: smaller key wins, ties to the smaller id.
bool better_min(double key, NodeId id, double best_key, NodeId best_id) {
  return key < best_key || (key == best_key && id < best_id);
}

void check_budget(std::span<const NodeId> candidates, std::size_t budget) {
  if (budget > candidates.size()) {
    throw UsageError("budget " + std::to_string(budget) + " exceeds " + std::to_string(candidates.size()) +
                     " candidates");
  }
}

void finish_class(const FeatureMatrix& h, std::span<const double> mu, ClassSelection& sel) {
  sel.running_sum.assign(h.cols(), 0.0);
  for (NodeId v : sel.order) {
    const auto x = h.row(v);
    for (std::size_t k = 0; k < x.size(); ++k) sel.running_sum[k] += static_cast<double>(x[k]);
  }
  if (sel.order.empty()) {
    sel.mean_distance = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const auto n = static_cast<double>(sel.order.size());
  double d2 = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double diff = mu[k] - sel.running_sum[k] / n;
    d2 += diff * diff;
  }
  sel.mean_distance = std::sqrt(d2);
}

template <typename PerClass>
SelectionState select_per_class(const Labels& labels, const BudgetPlan& plan, PerClass&& per_class) {
  const auto members = labels.class_members(&plan.pool);
  if (plan.budgets.size() != members.size()) throw UsageError("budget plan does not match the class count");
  SelectionState state;
  state.classes.resize(members.size());
  const auto K = static_cast<std::int64_t>(members.size());
  std::vector<std::exception_ptr> errors(members.size());
  // Classes are independent; each writes only its own slot.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < K; ++c) {
    const auto cls = static_cast<std::size_t>(c);
    try {
      state.classes[cls] = per_class(cls, std::span<const NodeId>(members[cls]), plan.budgets[cls]);
    } catch (...) {
      errors[cls] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return state;
}

}  // namespace

ClassSelection herd_class(const FeatureMatrix& h, std::span<const NodeId> candidates,
                          std::span<const double> mu, std::size_t budget) {
  check_budget(candidates, budget);
  const std::size_t dim = h.cols();
  ClassSelection sel;
  sel.running_sum.assign(dim, 0.0);
  if (budget == 0) sel.mean_distance = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::uint8_t> taken(candidates.size(), 0);
  for (std::size_t t = 0; t < budget; ++t) {
    const auto denom = static_cast<double>(t + 1);
    std::size_t best = candidates.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      const auto x = h.row(candidates[i]);
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = mu[k] - (sel.running_sum[k] + static_cast<double>(x[k])) / denom;
        d2 += diff * diff;
      }
      if (best == candidates.size() || better_min(d2, candidates[i], best_d2, candidates[best])) {
        best = i;
        best_d2 = d2;
      }
    }
    taken[best] = 1;
    sel.order.push_back(candidates[best]);
    const auto x = h.row(candidates[best]);
    for (std::size_t k = 0; k < dim; ++k) sel.running_sum[k] += static_cast<double>(x[k]);
    sel.mean_distance = std::sqrt(best_d2);
  }
  return sel;
}

ClassSelection kcenter_class(const FeatureMatrix& h, std::span<const NodeId> candidates,
                             std::span<const double> mu, std::size_t budget) {
  check_budget(candidates, budget);
  ClassSelection sel;
  if (budget == 0) return sel;
  std::size_t seed = 0;
  double seed_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double d2 = sq_dist_to(mu, h.row(candidates[i]));
    if (i == 0 || better_min(d2, candidates[i], seed_d2, candidates[seed])) {
      seed = i;
      seed_d2 = d2;
    }
  }
  std::vector<double> nearest(candidates.size(), std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> taken(candidates.size(), 0);
  std::size_t pick = seed;
  for (std::size_t t = 0; t < budget; ++t) {
    taken[pick] = 1;
    sel.order.push_back(candidates[pick]);
    const auto chosen = h.row(candidates[pick]);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!taken[i]) nearest[i] = std::min(nearest[i], sq_dist(h.row(candidates[i]), chosen));
    }
    if (t + 1 == budget) break;
    std::size_t next = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      // Farthest wins; ties to the smaller id.
      if (next == candidates.size() || nearest[i] > nearest[next] ||
          (nearest[i] == nearest[next] && candidates[i] < candidates[next])) {
        next = i;
      }
    }
    pick = next;
  }
  finish_class(h, mu, sel);
  return sel;
}

ClassSelection topk_class(const FeatureMatrix& h, std::span<const NodeId> candidates,
                          std::span<const double> mu, std::size_t budget) {
  check_budget(candidates, budget);
  std::vector<std::pair<double, NodeId>> ranked;
  ranked.reserve(candidates.size());
  for (NodeId v : candidates) ranked.emplace_back(sq_dist_to(mu, h.row(v)), v);
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(budget), ranked.end());
  ClassSelection sel;
  for (std::size_t i = 0; i < budget; ++i) sel.order.push_back(ranked[i].second);
  finish_class(h, mu, sel);
  return sel;
}

SelectionState herd_select(const FeatureMatrix& h, const Labels& labels, const PrototypeSet& protos,
                           const BudgetPlan& plan) {
  return select_per_class(labels, plan, [&](std::size_t c, std::span<const NodeId> cand, std::size_t b) {
    return herd_class(h, cand, protos.mean(c), b);
  });
}

SelectionState kcenter_select(const FeatureMatrix& h, const Labels& labels, const PrototypeSet& protos,
                              const BudgetPlan& plan) {
  return select_per_class(labels, plan, [&](std::size_t c, std::span<const NodeId> cand, std::size_t b) {
    return kcenter_class(h, cand, protos.mean(c), b);
  });
}

SelectionState topk_prototype_select(const FeatureMatrix& h, const Labels& labels,
                                     const PrototypeSet& protos, const BudgetPlan& plan) {
  return select_per_class(labels, plan, [&](std::size_t c, std::span<const NodeId> cand, std::size_t b) {
    return topk_class(h, cand, protos.mean(c), b);
  });
}

namespace {

// Unbiased draw from [0, n) by rejection; mt19937_64 output is fully
// specified, so selections reproduce across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

}  // namespace

SelectionState random_select(const Labels& labels, const BudgetPlan& plan, std::uint64_t seed) {
  return select_per_class(labels, plan, [&](std::size_t c, std::span<const NodeId> cand, std::size_t b) {
    check_budget(cand, b);
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (c + 1)));
    std::vector<NodeId> pool(cand.begin(), cand.end());
    ClassSelection sel;
    for (std::size_t i = 0; i < b; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
      std::swap(pool[i], pool[j]);
      sel.order.push_back(pool[i]);
    }
    return sel;
  });
}

void summarize_selection(const FeatureMatrix& h, const PrototypeSet& protos, SelectionState& state) {
  for (std::size_t c = 0; c < state.classes.size(); ++c) finish_class(h, protos.mean(c), state.classes[c]);
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::herding: return "herding";
    case Method::random: return "random";
    case Method::kcenter: return "kcenter";
    case Method::topk_prototype: return "topk";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "herding") return Method::herding;
  if (s == "random") return Method::random;
  if (s == "kcenter") return Method::kcenter;
  if (s == "topk" || s == "topk_prototype") return Method::topk_prototype;
  throw UsageError("unknown method '" + std::string(s) + "' (expected herding, random, kcenter or topk)");
}

void CondensationConfig::check() const {
  if (class_ratios.empty() && !(ratio > 0.0 && ratio <= 1.0)) {
    throw UsageError("ratio must lie in (0, 1], got " + std::to_string(ratio));
  }
  if (method == Method::random && !seed) throw UsageError("method random requires a seed");
  if (!use_raw_features && metapaths.empty()) {
    throw UsageError("at least one metapath is required unless raw features are used");
  }
}

json CondensationConfig::to_json() const {
  json j;
  j["method"] = to_string(method);
  j["ratio"] = ratio;
  if (!class_ratios.empty()) j["class_ratios"] = class_ratios;
  j["metapaths"] = metapaths;
  j["fusion"] = to_string(fusion);
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["pool"] = to_string(pool);
  j["neighbor_policy"] = neighbor_policy.to_string();
  j["use_raw_features"] = use_raw_features;
  return j;
}

namespace {

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    std::string_view item = s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("expected a boolean, got '" + std::string(v) + "'");
}

double parse_double(std::string_view key, std::string_view v) {
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw UsageError("config key '" + std::string(key) + "': cannot parse '" + std::string(v) + "'");
  }
  return d;
}

}  // namespace

CondensationConfig CondensationConfig::from_json(const json& j) {
  CondensationConfig cfg;
  try {
    if (j.contains("method")) cfg.method = parse_method(j["method"].get<std::string>());
    if (j.contains("ratio")) cfg.ratio = j["ratio"].get<double>();
    if (j.contains("class_ratios")) cfg.class_ratios = j["class_ratios"].get<std::vector<double>>();
    if (j.contains("metapaths")) {
      cfg.metapaths = j["metapaths"].is_string() ? split_list(j["metapaths"].get<std::string>())
                                                 : j["metapaths"].get<std::vector<std::string>>();
    }
    if (j.contains("fusion")) cfg.fusion = parse_fusion(j["fusion"].get<std::string>());
    if (j.contains("seed") && !j["seed"].is_null()) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("pool")) cfg.pool = parse_pool(j["pool"].get<std::string>());
    if (j.contains("neighbor_policy")) {
      cfg.neighbor_policy = NeighborPolicy::parse(j["neighbor_policy"].get<std::string>());
    }
    if (j.contains("use_raw_features")) cfg.use_raw_features = j["use_raw_features"].get<bool>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

CondensationConfig CondensationConfig::from_key_values(std::string_view text) {
  json j = json::object();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "ratio") {
      j[key] = parse_double(key, value);
    } else if (key == "seed") {
      j[key] = static_cast<std::uint64_t>(parse_double(key, value));
    } else if (key == "use_raw_features") {
      j[key] = parse_bool(value);
    } else if (key == "class_ratios") {
      std::vector<double> r;
      for (const auto& item : split_list(value)) r.push_back(parse_double(key, item));
      j[key] = r;
    } else if (key == "method" || key == "metapaths" || key == "fusion" || key == "pool" ||
               key == "neighbor_policy") {
      j[key] = value;
    } else {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return from_json(j);
}

FeatureMatrix selection_features(const HeteroGraph& g, const CondensationConfig& cfg, PropagationCache* cache) {
  if (cfg.use_raw_features) return g.target_features();
  std::vector<Metapath> paths;
  for (const auto& text : cfg.metapaths) paths.push_back(compile_metapath(g, text));
  return propagate_and_fuse(g, paths, cfg.fusion, cache);
}

CondensedResult condense(const HeteroGraph& g, const CondensationConfig& cfg) {
  cfg.check();
  const FeatureMatrix h = selection_features(g, cfg);
  const Labels& labels = g.labels;

  CondensedResult res;
  res.prototypes = class_prototypes(h, labels, labels.labeled_mask());
  const NodeMask pool = pool_mask(labels, cfg.pool);
  res.plan = cfg.class_ratios.empty() ? allocate_budgets(labels, cfg.ratio, pool)
                                      : allocate_budgets_per_class(labels, cfg.class_ratios, pool);

  switch (cfg.method) {
    case Method::herding: res.selection = herd_select(h, labels, res.prototypes, res.plan); break;
    case Method::random: res.selection = random_select(labels, res.plan, *cfg.seed); break;
    case Method::kcenter: res.selection = kcenter_select(h, labels, res.prototypes, res.plan); break;
    case Method::topk_prototype:
      res.selection = topk_prototype_select(h, labels, res.prototypes, res.plan);
      break;
  }
  if (cfg.method != Method::herding) summarize_selection(h, res.prototypes, res.selection);

  res.selected = res.selection.sorted_ids();
  res.subgraph = induced_subgraph(g, res.selected, cfg.neighbor_policy);

  json distances = json::array();
  for (const auto& c : res.selection.classes) distances.push_back(c.mean_distance);
  json prov = cfg.to_json();
  prov["tool_version"] = kToolVersion;
  prov["source_dataset"] = content_digest(g);
  prov["source_target_count"] = g.node_count(g.target);
  prov["feature_dim"] = h.cols();
  prov["budgets"] = res.plan.budgets;
  prov["pool_sizes"] = res.plan.pool_sizes;
  prov["selected_count"] = res.selected.size();
  prov["mean_distance"] = std::move(distances);
  prov["selection_scope"] = "per_class";
  prov["prototype_support"] = "all_labeled";
  prov["non_target_content"] = "neighbor policy " + cfg.neighbor_policy.to_string() +
                               " (retained neighbors of selected targets, all edges among retained nodes)";
  res.provenance = std::move(prov);
  return res;
}

}  // namespace hgc
