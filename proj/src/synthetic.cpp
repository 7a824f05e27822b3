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

#include "hgc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace hgc {

namespace {

std::vector<double> random_direction(std::mt19937_64& rng, std::size_t dim, double norm) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> v(dim);
  double sq = 0.0;
  for (double& x : v) {
    x = n01(rng);
    sq += x * x;
  }
  const double s = norm / std::sqrt(sq);
  for (double& x : v) x *= s;
  return v;
}

ClassId draw_class(std::mt19937_64& rng, const std::vector<double>& weights) {
  std::discrete_distribution<int> d(weights.begin(), weights.end());
  return d(rng);
}

FeatureMatrix gaussian_rows(std::mt19937_64& rng, const std::vector<ClassId>& cls,
                            const std::vector<std::vector<double>>& centers, const std::vector<double>& spread) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const std::size_t dim = centers.front().size();
  FeatureMatrix m(cls.size(), dim);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const auto c = static_cast<std::size_t>(cls[i]);
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = static_cast<float>(centers[c][k] + spread[c] * n01(rng));
  }
  return m;
}

SparseAdjacency reversed(const SparseAdjacency& a) {
  auto edges = a.to_edges();
  for (auto& e : edges) std::swap(e.src, e.dst);
  return SparseAdjacency::from_edges(a.cols(), a.rows(), std::move(edges));
}

void assign_splits(std::mt19937_64& rng, Labels& labels, double train, double val) {
  std::vector<NodeId> ids(labels.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train * static_cast<double>(ids.size())));
  const auto n_val = static_cast<std::size_t>(std::llround(val * static_cast<double>(ids.size())));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    labels.set_split(ids[i], i < n_train ? Split::train : i < n_train + n_val ? Split::val : Split::test);
  }
}

}  // namespace

HeteroGraph make_synthetic_graph(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  const auto K = static_cast<std::size_t>(spec.classes);
  const std::size_t M = spec.mode_weights.size();
  const std::size_t communities = K * M;

  // Community k = c * M + m: class c, mode m.
  std::vector<std::vector<double>> aux_centers, raw_centers;
  for (std::size_t c = 0; c < K; ++c) {
    const auto base = random_direction(rng, spec.aux_dim, spec.separation);
    for (std::size_t m = 0; m < M; ++m) {
      auto center = random_direction(rng, spec.aux_dim, spec.mode_offset);
      for (std::size_t k = 0; k < spec.aux_dim; ++k) center[k] += base[k];
      aux_centers.push_back(std::move(center));
    }
    raw_centers.push_back(random_direction(rng, spec.paper_dim, spec.raw_separation));
  }
  std::vector<double> spread(communities);
  for (std::size_t k = 0; k < communities; ++k) spread[k] = spec.class_spread[k / M];

  std::vector<ClassId> paper_cls(spec.papers);
  std::vector<std::size_t> paper_comm(spec.papers);
  std::vector<ClassId> author_comm(spec.authors), subject_comm(spec.subjects);
  for (std::size_t p = 0; p < spec.papers; ++p) {
    paper_cls[p] = draw_class(rng, spec.class_weights);
    paper_comm[p] = static_cast<std::size_t>(paper_cls[p]) * M + static_cast<std::size_t>(draw_class(rng, spec.mode_weights));
  }
  // Equal share per community.
  for (std::size_t i = 0; i < spec.authors; ++i) author_comm[i] = static_cast<ClassId>(i % communities);
  for (std::size_t i = 0; i < spec.subjects; ++i) subject_comm[i] = static_cast<ClassId>(i % communities);

  std::vector<std::vector<NodeId>> authors_of(communities), subjects_of(communities);
  for (std::size_t i = 0; i < spec.authors; ++i) authors_of[author_comm[i]].push_back(static_cast<NodeId>(i));
  for (std::size_t i = 0; i < spec.subjects; ++i) subjects_of[subject_comm[i]].push_back(static_cast<NodeId>(i));

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> n_authors(1, 5);
  std::uniform_int_distribution<int> n_subjects(1, 2);
  std::uniform_int_distribution<std::size_t> any_mode(0, M - 1);
  auto foreign = [&](std::size_t comm) {
    std::uniform_int_distribution<std::size_t> d(1, K - 1);
    return ((comm / M + d(rng)) % K) * M + any_mode(rng);
  };
  auto pick = [&](const std::vector<NodeId>& pool) {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  };

  std::vector<EdgeRecord> pa, ps;
  for (std::size_t p = 0; p < spec.papers; ++p) {
    const std::size_t k = paper_comm[p];
    const bool confused = u01(rng) < spec.confused_fraction;
    const double homophily = confused ? 0.2 : 0.75 + 0.25 * u01(rng);
    const int na = n_authors(rng);
    for (int i = 0; i < na; ++i) pa.push_back({static_cast<NodeId>(p), pick(authors_of[u01(rng) < homophily ? k : foreign(k)])});
    const int ns = n_subjects(rng);
    for (int i = 0; i < ns; ++i) ps.push_back({static_cast<NodeId>(p), pick(subjects_of[u01(rng) < homophily ? k : foreign(k)])});
  }
  // Repeated draws of the same pair count once.
  for (auto* list : {&pa, &ps}) {
    std::sort(list->begin(), list->end(), [](const EdgeRecord& a, const EdgeRecord& b) {
      return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    list->erase(std::unique(list->begin(), list->end()), list->end());
  }

  HeteroGraph g;
  g.node_types = {{"paper", spec.papers}, {"author", spec.authors}, {"subject", spec.subjects}};
  g.edge_types = {{"pa", 0, 1}, {"ap", 1, 0}, {"ps", 0, 2}, {"sp", 2, 0}};
  auto a_pa = SparseAdjacency::from_edges(spec.papers, spec.authors, std::move(pa));
  auto a_ps = SparseAdjacency::from_edges(spec.papers, spec.subjects, std::move(ps));
  g.adjacency = {a_pa, reversed(a_pa), a_ps, reversed(a_ps)};

  g.features.emplace_back(gaussian_rows(rng, paper_cls, raw_centers, std::vector<double>(K, 1.0)));
  g.features.emplace_back(gaussian_rows(rng, author_comm, aux_centers, spread));
  g.features.emplace_back(gaussian_rows(rng, subject_comm, aux_centers, spread));

  g.target = 0;
  g.labels = Labels(spec.papers, spec.classes);
  for (std::size_t p = 0; p < spec.papers; ++p) g.labels.set_class(static_cast<NodeId>(p), paper_cls[p]);
  assign_splits(rng, g.labels, spec.train_fraction, spec.val_fraction);
  return g;
}

HeteroGraph make_dblp_layout_graph(std::uint64_t seed, std::size_t author_dim) {
  constexpr std::size_t kAuthors = 4057, kPapers = 14328, kTerms = 7723, kVenues = 20;
  constexpr std::size_t kAuthorPaper = 19645, kPaperTerm = 85810;
  std::mt19937_64 rng(seed);

  auto unique_edges = [&](std::size_t rows, std::size_t cols, std::size_t count, bool cover_rows) {
    std::set<std::pair<NodeId, NodeId>> seen;
    std::uniform_int_distribution<NodeId> r(0, static_cast<NodeId>(rows - 1));
    std::uniform_int_distribution<NodeId> c(0, static_cast<NodeId>(cols - 1));
    if (cover_rows) {
      for (std::size_t i = 0; i < rows && seen.size() < count; ++i) seen.emplace(static_cast<NodeId>(i), c(rng));
    }
    while (seen.size() < count) seen.emplace(r(rng), c(rng));
    std::vector<EdgeRecord> out;
    out.reserve(count);
    for (const auto& [s, d] : seen) out.push_back({s, d});
    return out;
  };

  HeteroGraph g;
  g.node_types = {{"author", kAuthors}, {"paper", kPapers}, {"term", kTerms}, {"venue", kVenues}};
  g.edge_types = {{"author-paper", 0, 1}, {"paper-author", 1, 0}, {"paper-term", 1, 2},
                  {"term-paper", 2, 1},   {"paper-venue", 1, 3},  {"venue-paper", 3, 1}};
  auto ap = SparseAdjacency::from_edges(kAuthors, kPapers, unique_edges(kAuthors, kPapers, kAuthorPaper, true));
  auto pt = SparseAdjacency::from_edges(kPapers, kTerms, unique_edges(kPapers, kTerms, kPaperTerm, false));
  std::vector<EdgeRecord> pv;
  std::uniform_int_distribution<NodeId> venue(0, kVenues - 1);
  for (std::size_t p = 0; p < kPapers; ++p) pv.push_back({static_cast<NodeId>(p), venue(rng)});
  auto a_pv = SparseAdjacency::from_edges(kPapers, kVenues, std::move(pv));
  g.adjacency = {ap, reversed(ap), pt, reversed(pt), a_pv, reversed(a_pv)};

  std::normal_distribution<double> n01(0.0, 1.0);
  FeatureMatrix af(kAuthors, author_dim);
  for (float& x : af.data()) x = static_cast<float>(n01(rng));
  FeatureMatrix pf(kPapers, 8);
  for (float& x : pf.data()) x = static_cast<float>(n01(rng));
  g.features = {std::move(af), std::move(pf), std::nullopt, std::nullopt};

  g.target = 0;
  g.labels = Labels(kAuthors, 4);
  std::uniform_int_distribution<ClassId> cls(0, 3);
  for (std::size_t a = 0; a < kAuthors; ++a) g.labels.set_class(static_cast<NodeId>(a), cls(rng));
  assign_splits(rng, g.labels, 0.24, 0.06);
  return g;
}

}  // namespace hgc
