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

#include <gtest/gtest.h>

#include <fstream>

#include "hgc/evaluate.hpp"
#include "hgc/synthetic.hpp"
#include "oracles.hpp"

namespace hgc {
namespace {

struct Problem {
  FeatureMatrix h;
  Labels labels;
  NodeMask mask;
};

Problem separable_2d() {
  Problem p;
  const std::size_t n = 40;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  p.h = FeatureMatrix(n, 2);
  p.labels = Labels(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    p.h(i, 0) = static_cast<float>(pos ? u(rng) : -u(rng));
    p.h(i, 1) = static_cast<float>(u(rng) - 1.75);
    p.labels.set_class(static_cast<NodeId>(i), pos ? 1 : 0);
  }
  p.mask.assign(n, 1);
  return p;
}

Problem random_problem(std::mt19937_64& rng, std::size_t n, std::size_t dim, int k) {
  Problem p;
  p.h = oracle::random_features(rng, n, dim);
  p.labels = Labels(n, k);
  std::uniform_int_distribution<int> cls(0, k - 1);
  for (std::size_t i = 0; i < n; ++i) p.labels.set_class(static_cast<NodeId>(i), cls(rng));
  p.mask.assign(n, 1);
  return p;
}

TEST(TrainLinear, SeparableReachesPerfectTrainingAccuracy) {
  const auto p = separable_2d();
  const auto m = train_linear(p.h, p.labels, p.mask, {.l2 = 1e-4, .lr = 0.5, .iters = 500});
  const auto rep = evaluate_model(m, p.h, p.labels, p.mask);
  EXPECT_EQ(rep.accuracy, 1.0);
}

TEST(TrainLinear, LossHistoryNeverIncreases) {
  std::mt19937_64 rng(42);
  const auto p = random_problem(rng, 60, 5, 3);
  const auto m = train_linear(p.h, p.labels, p.mask, {.l2 = 1e-3, .lr = 50.0, .iters = 100});
  for (std::size_t i = 1; i < m.loss_history.size(); ++i) EXPECT_LE(m.loss_history[i], m.loss_history[i - 1]);
  EXPECT_LT(m.final_lr, 50.0);
}

TEST(TrainLinear, HeavyL2PredictsMajorityClass) {
  Problem p;
  std::mt19937_64 rng(43);
  p.h = oracle::random_features(rng, 30, 3);
  p.labels = Labels(30, 3);
  for (NodeId v = 0; v < 30; ++v) p.labels.set_class(v, v < 18 ? 2 : static_cast<ClassId>(v % 2));
  p.mask.assign(30, 1);
  const auto m = train_linear(p.h, p.labels, p.mask, {.l2 = 1e6, .lr = 0.5, .iters = 300});
  double wmax = 0.0;
  for (double w : m.weights.data()) wmax = std::max(wmax, std::abs(w));
  EXPECT_LT(wmax, 1e-5);
  for (ClassId c : predict(m, p.h)) EXPECT_EQ(c, 2);
}

TEST(TrainLinear, MissingClassesRecorded) {
  const auto p = separable_2d();
  Labels three(p.labels.size(), 3);
  for (NodeId v = 0; v < three.size(); ++v) three.set_class(v, p.labels.class_of(v));
  const auto m = train_linear(p.h, three, p.mask);
  EXPECT_EQ(m.missing_classes, (std::vector<ClassId>{2}));
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(44);
  const auto p = random_problem(rng, 5, 3, 3);
  LinearModel m;
  m.weights = DenseMatrix<double>(3, 3);
  m.bias.assign(3, 0.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (double& w : m.weights.data()) w = n01(rng);
  for (double& b : m.bias) b = n01(rng);
  const double l2 = 0.1;
  const auto g = linear_loss_gradient(m, p.h, p.labels, p.mask, l2);
  EXPECT_NEAR(g.loss, linear_loss(m, p.h, p.labels, p.mask, l2), 1e-12);
  const double eps = 1e-6;
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double keep = param;
    param = keep + eps;
    const double up = linear_loss(m, p.h, p.labels, p.mask, l2);
    param = keep - eps;
    const double down = linear_loss(m, p.h, p.labels, p.mask, l2);
    param = keep;
    const double fd = (up - down) / (2 * eps);
    worst = std::max(worst, std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-8}));
  };
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) check(m.weights(i, j), g.grad_weights(i, j));
  for (std::size_t j = 0; j < 3; ++j) check(m.bias[j], g.grad_bias[j]);
  EXPECT_LT(worst, 1e-4);
}

LinearModel fixed_predictor(std::size_t dim, int k, ClassId winner) {
  LinearModel m;
  m.weights = DenseMatrix<double>(dim, static_cast<std::size_t>(k));
  m.bias.assign(static_cast<std::size_t>(k), 0.0);
  m.bias[static_cast<std::size_t>(winner)] = 1.0;
  return m;
}

TEST(Metrics, PerfectModel) {
  const auto p = separable_2d();
  LinearModel m;
  m.weights = DenseMatrix<double>(2, 2, std::vector<double>{-10, 10, 0, 0});
  m.bias = {0, 0};
  const auto rep = evaluate_model(m, p.h, p.labels, p.mask);
  EXPECT_EQ(rep.accuracy, 1.0);
  EXPECT_EQ(rep.macro_f1, 1.0);
  EXPECT_EQ(rep.test_size, 40u);
}

TEST(Metrics, ConstantPredictorOnBalancedFourClasses) {
  Labels l(8, 4);
  for (NodeId v = 0; v < 8; ++v) l.set_class(v, static_cast<ClassId>(v % 4));
  const FeatureMatrix h(8, 2);
  const auto rep = evaluate_model(fixed_predictor(2, 4, 1), h, l, NodeMask(8, 1));
  EXPECT_EQ(rep.accuracy, 0.25);
  EXPECT_NEAR(rep.macro_f1, (2 * 0.25 / 1.25) / 4, 1e-15);
}

TEST(Metrics, MatchConfusionMatrixOracle) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_problem(rng, 80, 4, 4);
    NodeMask test(80, 0);
    for (std::size_t i = 0; i < 80; i += 2) test[i] = 1;
    const auto m = train_linear(p.h, p.labels, p.mask, {.l2 = 1e-2, .lr = 0.5, .iters = 20});
    const auto rep = evaluate_model(m, p.h, p.labels, test);
    const auto pred = predict(m, p.h);
    std::vector<ClassId> t, q;
    for (std::size_t i = 0; i < 80; ++i)
      if (test[i]) {
        t.push_back(p.labels.class_of(static_cast<NodeId>(i)));
        q.push_back(pred[i]);
      }
    const auto cm = oracle::confusion(t, q, 4);
    EXPECT_NEAR(rep.accuracy, cm.accuracy, 1e-15);
    EXPECT_NEAR(rep.macro_f1, cm.macro_f1, 1e-12);
  }
}

TEST(Metrics, EmptyTestSetIsUsageError) {
  const auto p = separable_2d();
  EXPECT_THROW(evaluate_model(fixed_predictor(2, 2, 0), p.h, p.labels, NodeMask(40, 0)), UsageError);
}

EvalReport report(const std::string& method, double ratio, double acc, std::string hash = "h") {
  EvalReport r;
  r.method = method;
  r.ratio = ratio;
  r.accuracy = acc;
  r.macro_f1 = acc;
  r.dataset_hash = std::move(hash);
  return r;
}

TEST(CompareRuns, IdenticalReportsHaveZeroStd) {
  std::vector<EvalReport> rs(5, report("herding", 0.012, 0.83));
  const auto t = compare_runs(rs);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].runs, 5u);
  EXPECT_EQ(t.rows[0].accuracy_std, 0.0);
  EXPECT_EQ(t.rows[0].accuracy_mean, 0.83);
}

TEST(CompareRuns, HandArithmetic) {
  std::vector<EvalReport> rs{report("random", 0.012, 0.9), report("random", 0.012, 0.92)};
  const auto t = compare_runs(rs);
  EXPECT_NEAR(t.rows[0].accuracy_mean, 0.91, 1e-15);
  EXPECT_NEAR(t.rows[0].accuracy_std, std::sqrt(2.0) / 100.0, 1e-12);
}

TEST(CompareRuns, MixedHashesRejected) {
  std::vector<EvalReport> rs{report("random", 0.012, 0.9, "a"), report("random", 0.012, 0.92, "b")};
  EXPECT_THROW(compare_runs(rs), UsageError);
  EXPECT_THROW(compare_runs(std::span<const EvalReport>(rs.data(), 1)), UsageError);
}

TEST(CompareRuns, GroupsByMethodAndRatio) {
  std::vector<EvalReport> rs{report("herding", 0.012, 0.8), report("herding", 0.048, 0.9),
                             report("herding", 0.012, 0.7)};
  const auto t = compare_runs(rs);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NE(t.to_text().find("herding"), std::string::npos);
  EXPECT_NE(t.to_csv().find("0.048"), std::string::npos);
}

TEST(ResultsCsv, RoundTrip) {
  oracle::TempDir tmp("csv");
  auto a = report("topk", 0.024, 0.8123456789012345);
  a.seed = 7;
  a.macro_f1 = 0.75;
  a.condense_seconds = 0.125;
  const auto path = tmp / "r.csv";
  std::ofstream(path) << results_csv_header() << results_csv_row(a);
  const auto back = read_results_csv(path);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].method, "topk");
  EXPECT_EQ(back[0].ratio, 0.024);
  EXPECT_EQ(back[0].seed, 7u);
  EXPECT_EQ(back[0].accuracy, a.accuracy);
  EXPECT_EQ(back[0].condense_seconds, 0.125);
  EXPECT_EQ(results_csv_header(), "method,ratio,seed,accuracy,macro_f1,condense_seconds,train_seconds\n");
}

CondensationConfig synthetic_recipe() {
  CondensationConfig c;
  c.metapaths = {"paper-author", "paper-subject"};
  return c;
}

TEST(ProxyEvaluator, IdentityCondensationMatchesFullData) {
  SyntheticSpec spec;
  spec.papers = 600;
  spec.authors = 300;
  const auto g = make_synthetic_graph(spec);
  auto cfg = synthetic_recipe();
  cfg.ratio = 1.0;
  cfg.pool = PoolKind::labeled;
  const ProxyEvaluator ev(g, synthetic_recipe());
  const auto cond = condense(g, cfg);
  const auto full = ev.on_full_graph();
  const auto sub = ev.on_condensed(cond.subgraph.graph);
  EXPECT_EQ(sub.accuracy, full.accuracy);
  EXPECT_EQ(sub.macro_f1, full.macro_f1);
  EXPECT_GT(full.accuracy, 0.6);
}

TEST(ProxyEvaluator, DimensionMismatchExplainsContract) {
  const auto g = make_synthetic_graph({.papers = 300, .authors = 150});
  const ProxyEvaluator ev(g, synthetic_recipe());
  auto other = g;
  other.features[1] = FeatureMatrix(150, 5);
  try {
    (void)ev.on_condensed(other);
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("evaluation contract"), std::string::npos);
  }
}

}  // namespace
}  // namespace hgc
