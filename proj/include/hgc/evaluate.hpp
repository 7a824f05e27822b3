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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgc/condense.hpp"
#include "hgc/graph.hpp"

namespace hgc {

struct TrainParams {
  double l2 = 1e-4;
  double lr = 0.5;
  int iters = 300;
};

// Softmax regression: scores = x W + b.
struct LinearModel {
  DenseMatrix<double> weights;  // dim x K
  std::vector<double> bias;     // K
  std::string dataset_hash;
  std::string feature_recipe;
  std::vector<ClassId> missing_classes;  // classes absent from the training mask
  std::vector<double> loss_history;      // accepted losses, non-increasing
  double final_lr = 0.0;

  std::size_t dim() const { return weights.rows(); }
  std::size_t num_classes() const { return bias.size(); }
};

struct LossGradient {
  double loss = 0.0;
  DenseMatrix<double> grad_weights;
  std::vector<double> grad_bias;
};

// Mean cross-entropy over `mask` plus (l2 / 2) * ||W||^2; the bias is not
// regularized.
double linear_loss(const LinearModel& m, const FeatureMatrix& h, const Labels& labels, const NodeMask& mask,
                   double l2);
LossGradient linear_loss_gradient(const LinearModel& m, const FeatureMatrix& h, const Labels& labels,
                                  const NodeMask& mask, double l2);

// Full-batch gradient descent from zero. A step that would raise the loss
// is rejected and the step size halved, so the loss history never
// increases. Throws ComputeError on a non-finite loss.
LinearModel train_linear(const FeatureMatrix& h, const Labels& labels, const NodeMask& train_mask,
                         const TrainParams& params = {});

DenseMatrix<double> predict_proba(const LinearModel& m, const FeatureMatrix& h);
// Argmax per row, ties to the smallest class id.
std::vector<ClassId> predict(const LinearModel& m, const FeatureMatrix& h);

struct ClassMetrics {
  std::size_t support = 0;    // true members in the test mask
  std::size_t predicted = 0;  // test nodes predicted as this class
  std::size_t true_positive = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::string method = "full";
  double ratio = 1.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::size_t test_size = 0;
  std::vector<ClassMetrics> per_class;
  double condense_seconds = 0.0;
  double train_seconds = 0.0;
  std::string dataset_hash;
  nlohmann::json provenance;
};

// Metrics of `m` on the labeled nodes of `test_mask`. Macro-F1 averages the
// classes that occur in the test labels or the predictions.
EvalReport evaluate_model(const LinearModel& m, const FeatureMatrix& h, const Labels& labels,
                          const NodeMask& test_mask);

struct ComparisonRow {
  std::string method;
  double ratio = 0.0;
  std::size_t runs = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // sample standard deviation, 0 for one run
  double macro_f1_mean = 0.0;
  double macro_f1_std = 0.0;
  double condense_seconds_mean = 0.0;
  double train_seconds_mean = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  std::string to_text() const;
  std::string to_csv() const;
};

// Groups by (method, ratio). Throws UsageError for fewer than two reports or
// for reports from different datasets (empty hashes are not compared).
ComparisonTable compare_runs(std::span<const EvalReport> reports);

// Proxy evaluation contract: train on features propagated inside the
// training graph (its train-split target nodes), test on features
// propagated over the full graph (its test split). Feature recipe
// (metapaths, fusion, raw mode) comes from `recipe`.
class ProxyEvaluator {
 public:
  ProxyEvaluator(const HeteroGraph& full, CondensationConfig recipe, TrainParams params = {});

  EvalReport on_full_graph() const;
  EvalReport on_condensed(const HeteroGraph& condensed) const;

  const FeatureMatrix& test_features() const { return test_features_; }

 private:
  EvalReport train_and_test(const HeteroGraph& train_graph) const;

  const HeteroGraph& full_;
  CondensationConfig recipe_;
  TrainParams params_;
  FeatureMatrix test_features_;
  NodeMask test_mask_;
  std::string dataset_hash_;
};

// results.csv: method,ratio,seed,accuracy,macro_f1,condense_seconds,train_seconds
std::string results_csv_header();
std::string results_csv_row(const EvalReport& r);
std::vector<EvalReport> read_results_csv(const std::filesystem::path& path);

}  // namespace hgc
