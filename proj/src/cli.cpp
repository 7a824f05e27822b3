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

#include "hgc/cli.hpp"

#include <omp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hgc/bench.hpp"
#include "hgc/condense.hpp"
#include "hgc/dataset_io.hpp"
#include "hgc/evaluate.hpp"
#include "hgc/synthetic.hpp"

namespace hgc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw UsageError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CondensationConfig load_config_file(const fs::path& p) {
  const std::string text = read_file(p);
  if (p.extension() == ".json") {
    try {
      return CondensationConfig::from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw UsageError(p.string() + ": " + e.what());
    }
  }
  return CondensationConfig::from_key_values(text);
}

// Flags shared by condense, eval and bench that describe a condensation.
struct RecipeFlags {
  std::string config;
  std::string method;
  double ratio = 0.0;
  std::string class_ratios;
  std::string metapaths;
  std::string fusion;
  std::uint64_t seed = 0;
  bool raw = false;
  std::string pool;
  std::string policy;

  CLI::Option* method_opt = nullptr;
  CLI::Option* ratio_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* raw_opt = nullptr;

  void add_to(CLI::App* app, bool with_method) {
    app->add_option("--config", config, "config file (JSON or key = value); flags override it");
    if (with_method) {
      method_opt = app->add_option("--method", method, "herding | random | kcenter | topk");
      ratio_opt = app->add_option("--ratio", ratio, "condensation ratio in (0, 1]");
      app->add_option("--class-ratios", class_ratios, "per-class ratios, comma separated");
      app->add_option("--pool", pool, "selection pool: train | labeled");
      app->add_option("--neighbor-policy", policy, "1hop | khop:K[:type=cap,...]");
    }
    app->add_option("--metapaths", metapaths, "comma-separated metapaths, e.g. paper-author-paper");
    app->add_option("--fusion", fusion, "concat | mean");
    raw_opt = app->add_flag("--raw-features", raw, "use raw target features (no propagation)");
  }

  CondensationConfig resolve(CLI::App* app) const {
    CondensationConfig cfg = config.empty() ? CondensationConfig{} : load_config_file(config);
    if (method_opt && method_opt->count()) cfg.method = parse_method(method);
    if (ratio_opt && ratio_opt->count()) cfg.ratio = ratio;
    if (!class_ratios.empty()) {
      cfg.class_ratios.clear();
      for (const auto& r : split_csv_list(class_ratios)) cfg.class_ratios.push_back(std::stod(r));
    }
    if (!metapaths.empty()) cfg.metapaths = split_csv_list(metapaths);
    if (!fusion.empty()) cfg.fusion = parse_fusion(fusion);
    if (seed_opt && seed_opt->count()) cfg.seed = seed;
    if (raw_opt && raw_opt->count()) cfg.use_raw_features = true;
    if (!pool.empty()) cfg.pool = parse_pool(pool);
    if (!policy.empty()) cfg.neighbor_policy = NeighborPolicy::parse(policy);
    (void)app;
    return cfg;
  }
};

void write_run_manifest(const fs::path& path, const std::string& command, const std::vector<std::string>& argv,
                        const json& config, const std::string& dataset_checksum, const std::string& started,
                        const json& outputs) {
  json rm;
  rm["command"] = command;
  rm["argv"] = argv;
  rm["cwd"] = fs::current_path().string();
  rm["config"] = config;
  rm["tool_version"] = kToolVersion;
  rm["dataset_checksum"] = dataset_checksum;
  rm["started_at"] = started;
  rm["finished_at"] = utc_now();
  rm["outputs"] = outputs;
  write_file_atomic(path, rm.dump(2) + "\n");
}

fs::path default_run_manifest(const fs::path& output) {
  fs::path p = output;
  if (p.has_filename() == false) p = p.parent_path();
  return p.string() + ".run.json";
}

int cmd_stats(const std::string& data, std::ostream& out, std::ostream& err) {
  ValidationReport warnings;
  const HeteroGraph g = load_dataset(data, &warnings);
  for (const auto& f : warnings.findings) err << "warning [" << f.code << "] " << f.where << ": " << f.message << '\n';
  const ValidationReport rep = validate(g);
  if (!rep.ok()) {
    err << rep.to_string();
    return 2;
  }
  std::string name = fs::path(data).filename().string();
  if (name.empty()) name = fs::path(data).parent_path().filename().string();
  const std::string target = g.node_types.empty() ? "-" : g.node_types[g.target].name;
  out << std::left << std::setw(16) << "dataset" << std::right << std::setw(10) << "#nodes" << std::setw(13)
      << "#node types" << std::setw(12) << "#edges" << std::setw(13) << "#edge types" << std::setw(10) << "target"
      << std::setw(10) << "#classes" << '\n';
  out << std::left << std::setw(16) << name << std::right << std::setw(10) << g.num_nodes() << std::setw(13)
      << g.node_types.size() << std::setw(12) << g.num_edges() << std::setw(13) << g.edge_types.size()
      << std::setw(10) << target << std::setw(10) << g.labels.num_classes() << '\n';
  out << '\n';
  for (std::size_t t = 0; t < g.node_types.size(); ++t) {
    out << "  node type " << std::left << std::setw(12) << g.node_types[t].name << std::right << std::setw(10)
        << g.node_types[t].count << "  feature dim "
        << (g.features[t] ? std::to_string(g.features[t]->cols()) : std::string("-")) << '\n';
  }
  for (std::size_t e = 0; e < g.edge_types.size(); ++e) {
    const auto& et = g.edge_types[e];
    out << "  edge type " << std::left << std::setw(14) << et.name << std::right << std::setw(10)
        << g.adjacency[e].nnz() << "  " << g.node_types[et.src].name << " -> " << g.node_types[et.dst].name << '\n';
  }
  return 0;
}

int cmd_condense(const std::vector<std::string>& argv, const std::string& data, const std::string& out_dir,
                 const CondensationConfig& cfg, bool overwrite, const std::string& run_manifest, std::ostream& out) {
  const std::string started = utc_now();
  cfg.check();
  if (fs::exists(out_dir) && !(fs::is_directory(out_dir) && fs::is_empty(out_dir)) && !overwrite) {
    throw UsageError("refusing to overwrite existing non-empty " + out_dir + " (pass --overwrite)");
  }
  const HeteroGraph g = load_dataset(data);
  const CondensedResult res = condense(g, cfg);
  save_dataset(res.subgraph.graph, out_dir, res.provenance, overwrite);

  out << "condensed " << res.selected.size() << " of " << g.node_count(g.target) << " target nodes ("
      << to_string(cfg.method) << ", ratio " << cfg.ratio << ")\n";
  out << std::left << std::setw(8) << "class" << std::right << std::setw(10) << "pool" << std::setw(10) << "budget"
      << std::setw(16) << "mean dist" << '\n';
  for (std::size_t c = 0; c < res.plan.budgets.size(); ++c) {
    out << std::left << std::setw(8) << c << std::right << std::setw(10) << res.plan.pool_sizes[c] << std::setw(10)
        << res.plan.budgets[c] << std::setw(16) << std::setprecision(6)
        << res.selection.classes[c].mean_distance << '\n';
  }
  write_run_manifest(run_manifest.empty() ? default_run_manifest(out_dir) : fs::path(run_manifest), "condense",
                     argv, cfg.to_json(), content_digest(g), started, json::array({out_dir}));
  return 0;
}

struct EvalFlags {
  std::string data;
  std::string condensed;
  int repeat = 1;
  std::uint64_t seed = 0;
  TrainParams params;
  std::string out;
  bool timing = false;
  std::string run_manifest;
};

int cmd_eval(const std::vector<std::string>& argv, const EvalFlags& f, CondensationConfig cfg, bool condense_mode,
             bool recipe_given, std::ostream& out) {
  const std::string started = utc_now();
  if (f.repeat < 1) throw UsageError("--repeat must be at least 1");
  const HeteroGraph full = load_dataset(f.data);

  std::optional<HeteroGraph> cond;
  json prov;
  if (!f.condensed.empty()) {
    cond = load_dataset(f.condensed);
    prov = read_manifest(f.condensed).value("provenance", json::object());
    if (!recipe_given) {
      if (prov.empty()) throw UsageError(f.condensed + ": no provenance; pass --metapaths or --raw-features");
      cfg = CondensationConfig::from_json(prov);
    }
  }
  if (cfg.metapaths.empty() && !cfg.use_raw_features) {
    throw UsageError("eval needs a feature recipe: --metapaths or --raw-features");
  }

  // With --method, --raw-features is a selection ablation: the proxy keeps
  // the propagated features whenever metapaths are given.
  CondensationConfig recipe = cfg;
  if (condense_mode && !cfg.metapaths.empty()) recipe.use_raw_features = false;
  const ProxyEvaluator evaluator(full, recipe, f.params);
  std::vector<EvalReport> reports;
  for (int i = 0; i < f.repeat; ++i) {
    const std::uint64_t seed = f.seed + static_cast<std::uint64_t>(i);
    EvalReport rep;
    if (cond) {
      rep = evaluator.on_condensed(*cond);
      rep.method = prov.value("method", std::string("condensed"));
      rep.ratio = prov.value("ratio", 0.0);
    } else if (condense_mode) {
      cfg.seed = seed;
      cfg.check();
      const auto t0 = std::chrono::steady_clock::now();
      const CondensedResult res = condense(full, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      rep = evaluator.on_condensed(res.subgraph.graph);
      rep.method = std::string(to_string(cfg.method));
      rep.ratio = cfg.ratio;
      rep.condense_seconds = std::chrono::duration<double>(t1 - t0).count();
    } else {
      rep = evaluator.on_full_graph();
    }
    rep.seed = seed;
    if (!f.timing) rep.condense_seconds = rep.train_seconds = 0.0;
    reports.push_back(std::move(rep));
  }

  std::string csv = results_csv_header();
  for (const auto& r : reports) csv += results_csv_row(r);
  const fs::path out_path(f.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_file_atomic(out_path, csv);

  std::string table;
  if (reports.size() >= 2) {
    table = compare_runs(reports).to_text();
  } else {
    const auto& r = reports.front();
    std::ostringstream os;
    os << r.method << " ratio " << r.ratio << " seed " << r.seed << ": accuracy " << std::fixed
       << std::setprecision(2) << 100.0 * r.accuracy << "%, macro-F1 " << 100.0 * r.macro_f1 << "%\n";
    table = os.str();
  }
  fs::path table_path = out_path;
  table_path.replace_extension(".table.txt");
  write_file_atomic(table_path, table);
  out << table;

  write_run_manifest(f.run_manifest.empty() ? default_run_manifest(out_path) : fs::path(f.run_manifest), "eval",
                     argv, cfg.to_json(), content_digest(full), started,
                     json::array({out_path.string(), table_path.string()}));
  return 0;
}

int cmd_bench(const std::string& data, const std::string& methods, const std::string& ratios,
              const std::string& pools, int repeats, std::optional<std::size_t> fixed_budget,
              const std::string& metapaths, std::uint64_t seed, const std::string& out_csv, std::ostream& out) {
  BenchOptions opts;
  opts.methods.clear();
  for (const auto& m : split_csv_list(methods)) opts.methods.push_back(parse_method(m));
  opts.ratios.clear();
  for (const auto& r : split_csv_list(ratios)) opts.ratios.push_back(std::stod(r));
  for (const auto& p : split_csv_list(pools)) opts.pool_sizes.push_back(std::stoul(p));
  opts.repeats = repeats;
  opts.fixed_budget = fixed_budget;
  opts.metapaths = split_csv_list(metapaths);
  opts.seed = seed;

  std::optional<HeteroGraph> g;
  if (opts.pool_sizes.empty()) {
    if (data.empty()) throw UsageError("bench needs --data or --synthetic-pools");
    g = load_dataset(data);
  }
  const auto rows = run_bench(opts, g ? &*g : nullptr);
  const std::string csv = bench_csv(rows);
  if (!out_csv.empty()) write_file_atomic(out_csv, csv);
  out << csv;

  if (opts.pool_sizes.size() >= 2) {
    for (Method m : opts.methods) {
      std::vector<double> x, y;
      for (const auto& r : rows) {
        if (r.method == to_string(m)) {
          x.push_back(static_cast<double>(r.pool_size));
          y.push_back(r.median_seconds);
        }
      }
      if (x.size() >= 2) out << "log-log slope " << to_string(m) << ": " << loglog_slope(x, y) << '\n';
    }
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& files, const std::string& out_csv, std::ostream& out) {
  std::vector<EvalReport> reports;
  for (const auto& f : files) {
    auto rows = read_results_csv(f);
    // The run manifest next to a results file names the dataset it came from.
    const fs::path manifest = f + ".run.json";
    if (fs::exists(manifest)) {
      const std::string hash = json::parse(read_file(manifest)).value("dataset_checksum", std::string());
      for (auto& r : rows) r.dataset_hash = hash;
    }
    reports.insert(reports.end(), rows.begin(), rows.end());
  }
  const ComparisonTable table = compare_runs(reports);
  out << table.to_text();
  if (!out_csv.empty()) write_file_atomic(out_csv, table.to_csv());
  return 0;
}

int cmd_synth(const std::string& kind, const std::string& out_dir, std::size_t papers, std::uint64_t seed,
              bool overwrite, std::ostream& out) {
  HeteroGraph g;
  json prov = {{"generator", kind}, {"seed", seed}, {"tool_version", kToolVersion}};
  if (kind == "acm-like") {
    SyntheticSpec spec;
    spec.papers = papers;
    spec.authors = std::max<std::size_t>(papers / 2, 3);
    spec.seed = seed;
    g = make_synthetic_graph(spec);
    prov["metapaths"] = kSyntheticMetapaths;
  } else if (kind == "dblp-layout") {
    g = make_dblp_layout_graph(seed);
  } else {
    throw UsageError("unknown synthetic kind '" + kind + "' (expected acm-like or dblp-layout)");
  }
  save_dataset(g, out_dir, prov, overwrite);
  out << "wrote " << kind << " dataset to " << out_dir << " (" << g.num_nodes() << " nodes, " << g.num_edges()
      << " edges)\n";
  return 0;
}

int cmd_replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const json rm = json::parse(read_file(manifest_path));
  std::vector<std::string> argv = rm.at("argv").get<std::vector<std::string>>();
  const std::string command = rm.at("command").get<std::string>();
  if (command == "condense" && std::find(argv.begin(), argv.end(), "--overwrite") == argv.end()) {
    argv.push_back("--overwrite");
  }
  const fs::path previous = fs::current_path();
  fs::current_path(rm.at("cwd").get<std::string>());
  int rc = 0;
  try {
    rc = run_cli(argv, out, err);
  } catch (...) {
    fs::current_path(previous);
    throw;
  }
  fs::current_path(previous);
  return rc;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hgc - training-free heterogeneous graph condensation"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap on worker threads (default: all cores)");
  app.fallthrough();

  std::string data;

  auto* stats = app.add_subcommand("stats", "print dataset statistics and validate");
  stats->add_option("--data", data, "dataset directory")->required();

  auto* cond = app.add_subcommand("condense", "select representative target nodes and write the condensed graph");
  RecipeFlags cond_recipe;
  std::string cond_out, cond_manifest;
  bool overwrite = false;
  cond->add_option("--data", data, "dataset directory")->required();
  cond->add_option("--out", cond_out, "output dataset directory")->required();
  cond_recipe.add_to(cond, true);
  cond_recipe.seed_opt = cond->add_option("--seed", cond_recipe.seed, "random seed (required for random)");
  cond->add_flag("--overwrite", overwrite, "replace an existing output directory");
  cond->add_option("--run-manifest", cond_manifest, "run manifest path (default: <out>.run.json)");

  auto* ev = app.add_subcommand("eval", "train and test the linear proxy");
  EvalFlags ef;
  RecipeFlags ev_recipe;
  ev->add_option("--data", ef.data, "full dataset directory")->required();
  ev->add_option("--condensed", ef.condensed, "condensed dataset directory");
  ev_recipe.add_to(ev, true);
  ev->add_option("--repeat", ef.repeat, "number of runs, seeds seed..seed+N-1");
  ev->add_option("--seed", ef.seed, "first seed");
  ev->add_option("--lr", ef.params.lr, "initial step size");
  ev->add_option("--l2", ef.params.l2, "L2 weight penalty");
  ev->add_option("--iters", ef.params.iters, "gradient steps");
  ev->add_option("--out", ef.out, "results csv")->required();
  ev->add_flag("--timing", ef.timing, "record wall-clock seconds in the csv");
  ev->add_option("--run-manifest", ef.run_manifest, "run manifest path (default: <out>.run.json)");

  auto* bench = app.add_subcommand("bench", "time condensation per method and ratio");
  std::string b_methods = "herding,random", b_ratios = "0.012", b_pools, b_metapaths, b_out;
  int b_repeats = 3;
  std::size_t b_budget = 0;
  std::uint64_t b_seed = 1;
  bench->add_option("--data", data, "dataset directory");
  bench->add_option("--synthetic-pools", b_pools, "generate synthetic graphs with these pool sizes");
  bench->add_option("--methods", b_methods, "comma-separated methods");
  bench->add_option("--ratios", b_ratios, "comma-separated ratios");
  bench->add_option("--repeats", b_repeats, "repetitions per cell (median reported)");
  auto* budget_opt = bench->add_option("--fixed-budget", b_budget, "total budget instead of a ratio");
  bench->add_option("--metapaths", b_metapaths, "comma-separated metapaths");
  bench->add_option("--seed", b_seed, "first seed");
  bench->add_option("--out", b_out, "timing csv");

  auto* cmp = app.add_subcommand("compare", "aggregate results.csv files into mean +- std per method and ratio");
  std::vector<std::string> cmp_files;
  std::string cmp_out;
  cmp->add_option("--results", cmp_files, "results.csv files")->required();
  cmp->add_option("--out", cmp_out, "comparison csv");

  auto* syn = app.add_subcommand("synth", "write a synthetic dataset");
  std::string syn_kind = "acm-like", syn_out;
  std::size_t syn_papers = 3000;
  std::uint64_t syn_seed = 7;
  bool syn_overwrite = false;
  syn->add_option("--kind", syn_kind, "acm-like | dblp-layout");
  syn->add_option("--out", syn_out, "output directory")->required();
  syn->add_option("--papers", syn_papers, "target nodes (acm-like)");
  syn->add_option("--seed", syn_seed, "generator seed");
  syn->add_flag("--overwrite", syn_overwrite, "replace an existing directory");

  auto* rep = app.add_subcommand("replay", "re-run a command from its run manifest");
  std::string rep_manifest;
  rep->add_option("--manifest", rep_manifest, "run manifest json")->required();

  std::vector<const char*> argv{"hgc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (stats->parsed()) return cmd_stats(data, out, err);
    if (cond->parsed()) {
      return cmd_condense(args, data, cond_out, cond_recipe.resolve(cond), overwrite, cond_manifest, out);
    }
    if (ev->parsed()) {
      const bool condense_mode = ev_recipe.method_opt->count() > 0;
      const bool recipe_given = !ev_recipe.metapaths.empty() || ev_recipe.raw || !ev_recipe.config.empty();
      if (condense_mode && !ef.condensed.empty()) throw UsageError("--method and --condensed are exclusive");
      return cmd_eval(args, ef, ev_recipe.resolve(ev), condense_mode, recipe_given, out);
    }
    if (bench->parsed()) {
      std::optional<std::size_t> fixed;
      if (budget_opt->count()) fixed = b_budget;
      return cmd_bench(data, b_methods, b_ratios, b_pools, b_repeats, fixed, b_metapaths, b_seed, b_out, out);
    }
    if (cmp->parsed()) return cmd_compare(cmp_files, cmp_out, out);
    if (syn->parsed()) return cmd_synth(syn_kind, syn_out, syn_papers, syn_seed, syn_overwrite, out);
    if (rep->parsed()) return cmd_replay(rep_manifest, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace hgc
