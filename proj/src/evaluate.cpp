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

#include "hgc/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace hgc {

namespace {

void check_shapes(const LinearModel& m, const FeatureMatrix& h) {
  if (h.cols() != m.dim()) {
    throw UsageError("feature dim " + std::to_string(h.cols()) + " does not match model dim " +
                     std::to_string(m.dim()));
  }
}

// Scores for one row into `out` (size K).
void scores_of(const LinearModel& m, std::span<const float> x, std::vector<double>& out) {
  const std::size_t K = m.num_classes();
  std::copy(m.bias.begin(), m.bias.end(), out.begin());
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double xd = static_cast<double>(x[d]);
    if (xd == 0.0) continue;
    const auto w = m.weights.row(d);
    for (std::size_t k = 0; k < K; ++k) out[k] += xd * w[k];
  }
}

// In-place softmax; returns log-sum-exp of the input scores.
double softmax(std::vector<double>& s) {
  const double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double& v : s) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : s) v /= z;
  return mx + std::log(z);
}

double weight_penalty(const LinearModel& m, double l2) {
  double sq = 0.0;
  for (double w : m.weights.data()) sq += w * w;
  return 0.5 * l2 * sq;
}

std::size_t masked_count(const Labels& labels, const NodeMask& mask) {
  std::size_t n = 0;
  for (std::size_t v = 0; v < labels.size(); ++v) n += mask[v] && labels.labeled(static_cast<NodeId>(v));
  return n;
}

}  // namespace

double linear_loss(const LinearModel& m, const FeatureMatrix& h, const Labels& labels, const NodeMask& mask,
                   double l2) {
  check_shapes(m, h);
  std::vector<double> s(m.num_classes());
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const auto id = static_cast<NodeId>(v);
    if (!mask[v] || !labels.labeled(id)) continue;
    scores_of(m, h.row(v), s);
    const double y_score = s[static_cast<std::size_t>(labels.class_of(id))];
    total += softmax(s) - y_score;
    ++n;
  }
  return (n ? total / static_cast<double>(n) : 0.0) + weight_penalty(m, l2);
}

LossGradient linear_loss_gradient(const LinearModel& m, const FeatureMatrix& h, const Labels& labels,
                                  const NodeMask& mask, double l2) {
  check_shapes(m, h);
  const std::size_t K = m.num_classes();
  LossGradient out;
  out.grad_weights = DenseMatrix<double>(m.dim(), K);
  out.grad_bias.assign(K, 0.0);
  std::vector<double> s(K);
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const auto id = static_cast<NodeId>(v);
    if (!mask[v] || !labels.labeled(id)) continue;
    const auto x = h.row(v);
    scores_of(m, x, s);
    const auto y = static_cast<std::size_t>(labels.class_of(id));
    const double y_score = s[y];
    total += softmax(s) - y_score;
    s[y] -= 1.0;  // s now holds p - onehot(y)
    for (std::size_t k = 0; k < K; ++k) out.grad_bias[k] += s[k];
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double xd = static_cast<double>(x[d]);
      if (xd == 0.0) continue;
      auto g = out.grad_weights.row(d);
      for (std::size_t k = 0; k < K; ++k) g[k] += xd * s[k];
    }
    ++n;
  }
  const double inv = n ? 1.0 / static_cast<double>(n) : 0.0;
  for (double& g : out.grad_bias) g *= inv;
  auto gw = out.grad_weights.data();
  const auto w = m.weights.data();
  for (std::size_t i = 0; i < gw.size(); ++i) gw[i] = gw[i] * inv + l2 * w[i];
  out.loss = total * inv + weight_penalty(m, l2);
  return out;
}

LinearModel train_linear(const FeatureMatrix& h, const Labels& labels, const NodeMask& train_mask,
                         const TrainParams& params) {
  if (h.rows() != labels.size() || train_mask.size() != labels.size()) {
    throw UsageError("train_linear: features, labels and mask disagree in size");
  }
  if (masked_count(labels, train_mask) == 0) throw UsageError("train_linear: empty training mask");
  if (labels.num_classes() <= 0) throw UsageError("train_linear: no classes");

  const auto K = static_cast<std::size_t>(labels.num_classes());
  LinearModel m;
  m.weights = DenseMatrix<double>(h.cols(), K);
  m.bias.assign(K, 0.0);
  {
    std::vector<std::uint8_t> present(K, 0);
    for (std::size_t v = 0; v < labels.size(); ++v) {
      const auto id = static_cast<NodeId>(v);
      if (train_mask[v] && labels.labeled(id)) present[static_cast<std::size_t>(labels.class_of(id))] = 1;
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (!present[k]) m.missing_classes.push_back(static_cast<ClassId>(k));
    }
  }

  double lr = params.lr;
  LossGradient cur = linear_loss_gradient(m, h, labels, train_mask, params.l2);
  if (!std::isfinite(cur.loss)) {
    throw ComputeError("train_linear: non-finite loss at iteration 0; check the features or use a smaller lr");
  }
  m.loss_history.push_back(cur.loss);
  LinearModel trial = m;
  for (int it = 0; it < params.iters; ++it) {
    bool accepted = false;
    while (lr > 1e-12) {
      auto tw = trial.weights.data();
      const auto w = m.weights.data();
      const auto gw = cur.grad_weights.data();
      for (std::size_t i = 0; i < tw.size(); ++i) tw[i] = w[i] - lr * gw[i];
      for (std::size_t k = 0; k < K; ++k) trial.bias[k] = m.bias[k] - lr * cur.grad_bias[k];
      const double loss = linear_loss(trial, h, labels, train_mask, params.l2);
      if (std::isfinite(loss) && loss <= cur.loss) {
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) break;  // no descent step left at any representable size
    std::swap(m.weights, trial.weights);
    std::swap(m.bias, trial.bias);
    cur = linear_loss_gradient(m, h, labels, train_mask, params.l2);
    if (!std::isfinite(cur.loss)) {
      throw ComputeError("train_linear: non-finite loss at iteration " + std::to_string(it + 1) +
                         "; try a smaller lr");
    }
    m.loss_history.push_back(cur.loss);
    trial.weights = m.weights;
    trial.bias = m.bias;
  }
  m.final_lr = lr;
  return m;
}

DenseMatrix<double> predict_proba(const LinearModel& m, const FeatureMatrix& h) {
  check_shapes(m, h);
  DenseMatrix<double> out(h.rows(), m.num_classes());
  std::vector<double> s(m.num_classes());
  for (std::size_t v = 0; v < h.rows(); ++v) {
    scores_of(m, h.row(v), s);
    softmax(s);
    std::copy(s.begin(), s.end(), out.row(v).begin());
  }
  return out;
}

std::vector<ClassId> predict(const LinearModel& m, const FeatureMatrix& h) {
  check_shapes(m, h);
  std::vector<ClassId> out(h.rows());
  std::vector<double> s(m.num_classes());
  for (std::size_t v = 0; v < h.rows(); ++v) {
    scores_of(m, h.row(v), s);
    // max_element returns the first maximum, i.e. the smallest class id.
    out[v] = static_cast<ClassId>(std::max_element(s.begin(), s.end()) - s.begin());
  }
  return out;
}

EvalReport evaluate_model(const LinearModel& m, const FeatureMatrix& h, const Labels& labels,
                          const NodeMask& test_mask) {
  if (test_mask.size() != labels.size() || h.rows() != labels.size()) {
    throw UsageError("evaluate_model: features, labels and mask disagree in size");
  }
  const std::size_t K = m.num_classes();
  const auto pred = predict(m, h);
  EvalReport rep;
  rep.per_class.resize(K);
  std::size_t correct = 0;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const auto id = static_cast<NodeId>(v);
    if (!test_mask[v] || !labels.labeled(id)) continue;
    const auto y = static_cast<std::size_t>(labels.class_of(id));
    const auto p = static_cast<std::size_t>(pred[v]);
    ++rep.per_class[y].support;
    ++rep.per_class[p].predicted;
    if (y == p) {
      ++rep.per_class[y].true_positive;
      ++correct;
    }
    ++rep.test_size;
  }
  if (rep.test_size == 0) throw UsageError("evaluate_model: empty test mask");
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(rep.test_size);
  double f1_sum = 0.0;
  std::size_t f1_classes = 0;
  for (auto& c : rep.per_class) {
    c.precision = c.predicted ? static_cast<double>(c.true_positive) / static_cast<double>(c.predicted) : 0.0;
    c.recall = c.support ? static_cast<double>(c.true_positive) / static_cast<double>(c.support) : 0.0;
    c.f1 = (c.precision + c.recall) > 0.0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
    if (c.support > 0 || c.predicted > 0) {
      f1_sum += c.f1;
      ++f1_classes;
    }
  }
  rep.macro_f1 = f1_classes ? f1_sum / static_cast<double>(f1_classes) : 0.0;
  rep.dataset_hash = m.dataset_hash;
  return rep;
}

ProxyEvaluator::ProxyEvaluator(const HeteroGraph& full, CondensationConfig recipe, TrainParams params)
    : full_(full),
      recipe_(std::move(recipe)),
      params_(params),
      test_features_(selection_features(full, recipe_)),
      test_mask_(full.labels.split_mask(Split::test)),
      dataset_hash_(content_digest(full)) {}

EvalReport ProxyEvaluator::train_and_test(const HeteroGraph& train_graph) const {
  const FeatureMatrix train_features = selection_features(train_graph, recipe_);
  if (train_features.cols() != test_features_.cols()) {
    throw UsageError("evaluation contract violated: training graph yields " +
                     std::to_string(train_features.cols()) + "-dim features but the full graph yields " +
                     std::to_string(test_features_.cols()) +
                     "; both sides must be propagated with the same metapaths and fusion");
  }
  const auto t0 = std::chrono::steady_clock::now();
  LinearModel m = train_linear(train_features, train_graph.labels, train_graph.labels.split_mask(Split::train),
                               params_);
  const auto t1 = std::chrono::steady_clock::now();
  m.dataset_hash = dataset_hash_;
  m.feature_recipe = recipe_.use_raw_features ? "raw" : recipe_.to_json().at("metapaths").dump();
  EvalReport rep = evaluate_model(m, test_features_, full_.labels, test_mask_);
  rep.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  return rep;
}

EvalReport ProxyEvaluator::on_full_graph() const {
  EvalReport rep = train_and_test(full_);
  rep.method = "full";
  rep.ratio = 1.0;
  return rep;
}

EvalReport ProxyEvaluator::on_condensed(const HeteroGraph& condensed) const { return train_and_test(condensed); }

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void mean_std(const std::vector<long double>& xs, double& mean, double& sd) {
  long double s = 0.0L;
  for (auto x : xs) s += x;
  const long double mu = s / static_cast<long double>(xs.size());
  long double ss = 0.0L;
  for (auto x : xs) ss += (x - mu) * (x - mu);
  mean = static_cast<double>(mu);
  sd = xs.size() > 1 ? static_cast<double>(std::sqrt(ss / static_cast<long double>(xs.size() - 1))) : 0.0;
}

}  // namespace

ComparisonTable compare_runs(std::span<const EvalReport> reports) {
  if (reports.size() < 2) throw UsageError("compare_runs needs at least two reports");
  std::string hash;
  for (const auto& r : reports) {
    if (r.dataset_hash.empty()) continue;
    if (hash.empty()) hash = r.dataset_hash;
    if (r.dataset_hash != hash) {
      throw UsageError("compare_runs: reports come from different datasets (" + hash.substr(0, 12) + " vs " +
                       r.dataset_hash.substr(0, 12) + ")");
    }
  }
  std::map<std::pair<std::string, double>, std::vector<const EvalReport*>> groups;
  for (const auto& r : reports) groups[{r.method, r.ratio}].push_back(&r);

  ComparisonTable table;
  for (const auto& [key, runs] : groups) {
    ComparisonRow row;
    row.method = key.first;
    row.ratio = key.second;
    row.runs = runs.size();
    std::vector<long double> acc, f1;
    long double cs = 0.0L, ts = 0.0L;
    for (const auto* r : runs) {
      acc.push_back(r->accuracy);
      f1.push_back(r->macro_f1);
      cs += r->condense_seconds;
      ts += r->train_seconds;
    }
    mean_std(acc, row.accuracy_mean, row.accuracy_std);
    mean_std(f1, row.macro_f1_mean, row.macro_f1_std);
    row.condense_seconds_mean = static_cast<double>(cs / static_cast<long double>(runs.size()));
    row.train_seconds_mean = static_cast<double>(ts / static_cast<long double>(runs.size()));
    table.rows.push_back(row);
  }
  return table;
}

std::string ComparisonTable::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(10) << "method" << std::right << std::setw(9) << "ratio" << std::setw(6) << "runs"
     << std::setw(20) << "accuracy (%)" << std::setw(20) << "macro-F1 (%)" << std::setw(14) << "condense (s)"
     << std::setw(12) << "train (s)" << '\n';
  for (const auto& r : rows) {
    std::ostringstream acc, f1;
    acc << std::fixed << std::setprecision(2) << 100.0 * r.accuracy_mean << " +- " << 100.0 * r.accuracy_std;
    f1 << std::fixed << std::setprecision(2) << 100.0 * r.macro_f1_mean << " +- " << 100.0 * r.macro_f1_std;
    os << std::left << std::setw(10) << r.method << std::right << std::setw(8) << std::fixed
       << std::setprecision(1) << 100.0 * r.ratio << "%" << std::setw(6) << r.runs << std::setw(20) << acc.str()
       << std::setw(20) << f1.str() << std::setw(14) << std::setprecision(4) << r.condense_seconds_mean
       << std::setw(12) << r.train_seconds_mean << '\n';
  }
  return os.str();
}

std::string ComparisonTable::to_csv() const {
  std::string out =
      "method,ratio,runs,accuracy_mean,accuracy_std,macro_f1_mean,macro_f1_std,condense_seconds_mean,"
      "train_seconds_mean\n";
  for (const auto& r : rows) {
    out += r.method + ',' + fmt_double(r.ratio) + ',' + std::to_string(r.runs) + ',' + fmt_double(r.accuracy_mean) +
           ',' + fmt_double(r.accuracy_std) + ',' + fmt_double(r.macro_f1_mean) + ',' +
           fmt_double(r.macro_f1_std) + ',' + fmt_double(r.condense_seconds_mean) + ',' +
           fmt_double(r.train_seconds_mean) + '\n';
  }
  return out;
}

std::string results_csv_header() {
  return "method,ratio,seed,accuracy,macro_f1,condense_seconds,train_seconds\n";
}

std::string results_csv_row(const EvalReport& r) {
  return r.method + ',' + fmt_double(r.ratio) + ',' + std::to_string(r.seed) + ',' + fmt_double(r.accuracy) + ',' +
         fmt_double(r.macro_f1) + ',' + fmt_double(r.condense_seconds) + ',' + fmt_double(r.train_seconds) + '\n';
}

std::vector<EvalReport> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  std::string line;
  std::getline(in, line);
  if (line + "\n" != results_csv_header()) {
    throw DataError(path.filename().string() + ":1: unexpected header '" + line + "'");
  }
  std::vector<EvalReport> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw DataError(path.filename().string() + ":" + std::to_string(line_no) + ": expected 7 fields");
    EvalReport r;
    try {
      r.method = f[0];
      r.ratio = std::stod(f[1]);
      r.seed = std::stoull(f[2]);
      r.accuracy = std::stod(f[3]);
      r.macro_f1 = std::stod(f[4]);
      r.condense_seconds = std::stod(f[5]);
      r.train_seconds = std::stod(f[6]);
    } catch (const std::exception&) {
      throw DataError(path.filename().string() + ":" + std::to_string(line_no) + ": cannot parse row");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hgc
