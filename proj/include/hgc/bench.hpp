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
#include <span>
#include <string>
#include <vector>

#include "hgc/condense.hpp"
#include "hgc/synthetic.hpp"

namespace hgc {

struct BenchOptions {
  std::vector<Method> methods = {Method::herding, Method::random};
  std::vector<double> ratios = {0.012};
  int repeats = 3;
  // Synthetic pools: one generated graph per size (training-pool size).
  std::vector<std::size_t> pool_sizes;
  // Use ratio = fixed_budget / pool size instead of `ratios`.
  std::optional<std::size_t> fixed_budget;
  std::vector<std::string> metapaths;
  std::uint64_t seed = 1;
  SyntheticSpec synthetic;  // template for generated pools
};

struct BenchRow {
  std::string method;
  double ratio = 0.0;
  std::size_t pool_size = 0;
  int repeats = 0;
  double median_seconds = 0.0;
  long peak_rss_kb = 0;
};

// Times condense() per (graph, method, ratio) and reports the median over
// `repeats` runs. `graph` is used when no synthetic pool sizes are given.
std::vector<BenchRow> run_bench(const BenchOptions& opts, const HeteroGraph* graph = nullptr);

std::string bench_csv(std::span<const BenchRow> rows);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hgc
