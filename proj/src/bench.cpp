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

#include "hgc/bench.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace hgc {

namespace {

long peak_rss_kb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& opts, const HeteroGraph* graph) {
  if (opts.repeats < 1) throw UsageError("bench: repeats must be at least 1");
  std::vector<BenchRow> rows;

  auto bench_graph = [&](const HeteroGraph& g, const std::vector<std::string>& metapaths) {
    const NodeMask pool = pool_mask(g.labels, PoolKind::train);
    const auto pool_size = static_cast<std::size_t>(std::count(pool.begin(), pool.end(), 1));
    std::vector<double> ratios = opts.ratios;
    if (opts.fixed_budget) {
      ratios = {std::min(1.0, static_cast<double>(*opts.fixed_budget) / static_cast<double>(pool_size))};
    }
    for (Method m : opts.methods) {
      for (double r : ratios) {
        CondensationConfig cfg;
        cfg.method = m;
        cfg.ratio = r;
        cfg.metapaths = metapaths;
        std::vector<double> times;
        cfg.seed = opts.seed;
        (void)condense(g, cfg);  // warm-up, not timed
        for (int i = 0; i < opts.repeats; ++i) {
          cfg.seed = opts.seed + static_cast<std::uint64_t>(i);
          const auto t0 = std::chrono::steady_clock::now();
          const auto res = condense(g, cfg);
          const auto t1 = std::chrono::steady_clock::now();
          times.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        rows.push_back({std::string(to_string(m)), r, pool_size, opts.repeats, median(times), peak_rss_kb()});
      }
    }
  };

  if (!opts.pool_sizes.empty()) {
    for (std::size_t size : opts.pool_sizes) {
      SyntheticSpec spec = opts.synthetic;
      spec.papers = static_cast<std::size_t>(std::llround(static_cast<double>(size) / spec.train_fraction));
      spec.authors = std::max<std::size_t>(spec.papers / 2, 3);
      const HeteroGraph g = make_synthetic_graph(spec);
      bench_graph(g, opts.metapaths.empty() ? std::vector<std::string>{"paper-author", "paper-subject"}
                                            : opts.metapaths);
    }
  } else {
    if (!graph) throw UsageError("bench: no dataset and no synthetic pool sizes given");
    if (opts.metapaths.empty()) throw UsageError("bench: metapaths are required for a dataset");
    bench_graph(*graph, opts.metapaths);
  }
  return rows;
}

std::string bench_csv(std::span<const BenchRow> rows) {
  std::ostringstream os;
  os << "method,ratio,pool_size,repeats,median_seconds,peak_rss_kb\n";
  for (const auto& r : rows) {
    os << r.method << ',' << r.ratio << ',' << r.pool_size << ',' << r.repeats << ',' << r.median_seconds << ','
       << r.peak_rss_kb << '\n';
  }
  return os.str();
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("loglog_slope needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace hgc
