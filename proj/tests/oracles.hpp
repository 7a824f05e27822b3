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

// Independent reference implementations and fixtures shared by the unit
// tests and the acceptance suite. Everything here is deliberately naive:
// dense matrices, exhaustive scans, no reuse of library internals.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hgc/graph.hpp"

namespace hgc::oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

inline Dense to_dense(const SparseAdjacency& a) {
  Dense d = zeros(a.rows(), a.cols());
  for (const auto& e : a.to_edges()) d[e.src][e.dst] += e.value;
  return d;
}

inline Dense to_dense(const FeatureMatrix& m) {
  Dense d = zeros(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) d[r][c] = m(r, c);
  return d;
}

inline Dense row_normalized(Dense a) {
  for (auto& row : a) {
    double s = 0.0;
    for (double v : row) s += v;
    if (s != 0.0)
      for (double& v : row) v /= s;
  }
  return a;
}

inline Dense matmul(const Dense& a, const Dense& b, std::size_t b_cols) {
  Dense out = zeros(a.size(), b_cols);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      if (a[i][k] == 0.0) continue;
      for (std::size_t j = 0; j < b_cols; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

inline double frobenius(const Dense& a) {
  double s = 0.0;
  for (const auto& row : a)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

// ||a - b||_F / max(||b||_F, tiny)
inline double relative_error(const FeatureMatrix& a, const Dense& b) {
  double diff = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double d = static_cast<double>(a(r, c)) - b[r][c];
      diff += d * d;
    }
  return std::sqrt(diff) / std::max(frobenius(b), 1e-300);
}

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

inline std::vector<double> row_of(const FeatureMatrix& h, NodeId v) {
  return {h.row(v).begin(), h.row(v).end()};
}

// Greedy herding by brute force: at every step recompute the mean of
// S + {v} from scratch for every remaining candidate and take the argmin of
// the squared distance to mu; ties to the smallest id.
inline std::vector<NodeId> herding(const FeatureMatrix& h, std::vector<NodeId> candidates,
                                   const std::vector<double>& mu, std::size_t budget) {
  std::sort(candidates.begin(), candidates.end());
  std::vector<NodeId> chosen;
  std::vector<bool> used(candidates.size(), false);
  for (std::size_t step = 0; step < budget; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      std::vector<double> mean(mu.size(), 0.0);
      for (NodeId s : chosen)
        for (std::size_t k = 0; k < mu.size(); ++k) mean[k] += h(s, k);
      for (std::size_t k = 0; k < mu.size(); ++k) {
        mean[k] += h(candidates[i], k);
        mean[k] /= static_cast<double>(chosen.size() + 1);
      }
      const double d = sq_dist(mean, mu);
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    used[best_i] = true;
    chosen.push_back(candidates[best_i]);
  }
  return chosen;
}

// Farthest-point traversal: start at the node nearest mu, then repeatedly
// take the node maximizing its distance to the chosen set; ties to the
// smallest id.
inline std::vector<NodeId> kcenter(const FeatureMatrix& h, std::vector<NodeId> candidates,
                                   const std::vector<double>& mu, std::size_t budget) {
  std::sort(candidates.begin(), candidates.end());
  std::vector<NodeId> chosen;
  if (budget == 0) return chosen;
  double best = std::numeric_limits<double>::infinity();
  NodeId seed = candidates.front();
  for (NodeId v : candidates) {
    const double d = sq_dist(row_of(h, v), mu);
    if (d < best) {
      best = d;
      seed = v;
    }
  }
  chosen.push_back(seed);
  while (chosen.size() < budget) {
    double far = -1.0;
    NodeId pick = 0;
    for (NodeId v : candidates) {
      if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (NodeId s : chosen) nearest = std::min(nearest, sq_dist(row_of(h, v), row_of(h, s)));
      if (nearest > far) {
        far = nearest;
        pick = v;
      }
    }
    chosen.push_back(pick);
  }
  return chosen;
}

// Largest-remainder apportionment written out longhand with exact integer
// arithmetic on ratio numerators: returns budgets for pooled class sizes.
inline std::vector<std::size_t> apportion(const std::vector<std::size_t>& sizes, double ratio) {
  std::size_t n = 0, nonempty = 0;
  for (auto s : sizes) {
    n += s;
    nonempty += s > 0;
  }
  const auto total = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  std::vector<std::size_t> b(sizes.size(), 0);
  if (n == 0) return b;
  struct Rem {
    std::size_t rem, size, id;
  };
  std::vector<Rem> rems;
  std::size_t given = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    b[c] = total * sizes[c] / n;
    given += b[c];
    rems.push_back({total * sizes[c] % n, sizes[c], c});
  }
  std::sort(rems.begin(), rems.end(), [](const Rem& x, const Rem& y) {
    if (x.rem != y.rem) return x.rem > y.rem;
    if (x.size != y.size) return x.size > y.size;
    return x.id < y.id;
  });
  for (std::size_t i = 0; given < total; ++i, ++given) b[rems[i].id] += 1;
  for (std::size_t c = 0; c < sizes.size(); ++c)
    if (sizes[c] > 0 && b[c] == 0) b[c] = 1;
  std::size_t sum = 0;
  for (auto x : b) sum += x;
  const std::size_t want = std::max(nonempty, total);
  while (sum > want) {
    std::size_t big = sizes.size();
    for (std::size_t c = 0; c < sizes.size(); ++c)
      if (b[c] > 1 && (big == sizes.size() || b[c] > b[big])) big = c;
    b[big] -= 1;
    sum -= 1;
  }
  return b;
}

struct Confusion {
  std::vector<std::vector<std::size_t>> m;  // m[true][pred]
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

inline Confusion confusion(const std::vector<ClassId>& truth, const std::vector<ClassId>& pred, int k) {
  Confusion out;
  out.m.assign(k, std::vector<std::size_t>(k, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out.m[truth[i]][pred[i]] += 1;
    correct += truth[i] == pred[i];
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  double f1_sum = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    std::size_t row = 0, col = 0;
    for (int j = 0; j < k; ++j) {
      row += out.m[c][j];
      col += out.m[j][c];
    }
    if (row == 0 && col == 0) continue;
    ++present;
    const double tp = static_cast<double>(out.m[c][c]);
    const double p = col ? tp / static_cast<double>(col) : 0.0;
    const double r = row ? tp / static_cast<double>(row) : 0.0;
    f1_sum += (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
  }
  out.macro_f1 = present ? f1_sum / present : 0.0;
  return out;
}

inline FeatureMatrix random_features(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> n01(0.0, 1.0);
  FeatureMatrix m(rows, cols);
  for (float& x : m.data()) x = static_cast<float>(n01(rng));
  return m;
}

inline SparseAdjacency random_adjacency(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double density,
                                        bool weighted = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EdgeRecord> edges;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (u(rng) < density)
        edges.push_back({static_cast<NodeId>(r), static_cast<NodeId>(c), weighted ? 0.1 + 4.0 * u(rng) : 1.0});
  return SparseAdjacency::from_edges(rows, cols, std::move(edges));
}

// Two-type graph: target "paper" (labeled, with splits) and "author", with
// relations pa and ap (reverse of pa).
inline HeteroGraph toy_graph(std::uint64_t seed, std::size_t papers = 12, std::size_t authors = 6, int classes = 3,
                             std::size_t dim = 4) {
  std::mt19937_64 rng(seed);
  HeteroGraph g;
  g.node_types = {{"paper", papers}, {"author", authors}};
  g.edge_types = {{"pa", 0, 1}, {"ap", 1, 0}};
  std::vector<EdgeRecord> pa;
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(authors - 1));
  for (std::size_t p = 0; p < papers; ++p) {
    pa.push_back({static_cast<NodeId>(p), pick(rng)});
    pa.push_back({static_cast<NodeId>(p), pick(rng)});
  }
  for (std::size_t a = 0; a < authors; ++a) pa.push_back({static_cast<NodeId>(a % papers), static_cast<NodeId>(a)});
  auto fwd = SparseAdjacency::from_edges(papers, authors, pa);
  for (auto& e : pa) std::swap(e.src, e.dst);
  auto rev = SparseAdjacency::from_edges(authors, papers, pa);
  g.adjacency = {fwd, rev};
  g.features = {random_features(rng, papers, dim), random_features(rng, authors, dim)};
  g.target = 0;
  g.labels = Labels(papers, classes);
  for (std::size_t p = 0; p < papers; ++p) {
    const auto v = static_cast<NodeId>(p);
    g.labels.set_class(v, static_cast<ClassId>(p % static_cast<std::size_t>(classes)));
    g.labels.set_split(v, p % 4 == 3 ? Split::test : p % 4 == 2 ? Split::val : Split::train);
  }
  return g;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Byte-level comparison of two directory trees (relative paths + contents).
inline bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b) {
  namespace fs = std::filesystem;
  auto listing = [](const fs::path& root) {
    std::vector<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
      if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).string());
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto la = listing(a), lb = listing(b);
  if (la != lb) return false;
  for (const auto& f : la)
    if (slurp(a / f) != slurp(b / f)) return false;
  return true;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hgc-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace hgc::oracle
