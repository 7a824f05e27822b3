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

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hgc/cli.hpp"
#include "hgc/dataset_io.hpp"
#include "hgc/evaluate.hpp"
#include "hgc/synthetic.hpp"
#include "oracles.hpp"

namespace hgc {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Runs the installed binary through the shell; stdout and stderr merged.
Run binary(const std::string& args) {
  Run r;
  FILE* pipe = ::popen((std::string(HGC_CLI_PATH) + " " + args + " 2>&1").c_str(), "r");
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    tmp_ = new oracle::TempDir("cli");
    save_dataset(make_synthetic_graph({}), *tmp_ / "acm");
  }
  static void TearDownTestSuite() {
    delete tmp_;
    tmp_ = nullptr;
  }
  static std::string path(const std::string& name) { return (*tmp_ / name).string(); }
  static std::string data() { return path("acm"); }
  static inline oracle::TempDir* tmp_ = nullptr;
};

TEST_F(Cli, StatsPrintsTable) {
  const auto r = cli({"stats", "--data", data()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("#nodes"), std::string::npos);
  EXPECT_NE(r.out.find("4590"), std::string::npos);
  EXPECT_NE(r.out.find("paper"), std::string::npos);
}

TEST_F(Cli, StatsDblpLayoutMatchesPublishedCounts) {
  ASSERT_EQ(cli({"synth", "--kind", "dblp-layout", "--out", path("dblp")}).code, 0);
  const auto r = cli({"stats", "--data", path("dblp")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream rows(r.out);
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  std::istringstream cells(row);
  std::string name, target;
  std::size_t nodes = 0, node_types = 0, edges = 0, edge_types = 0, classes = 0;
  cells >> name >> nodes >> node_types >> edges >> edge_types >> target >> classes;
  EXPECT_EQ(nodes, 26128u);
  EXPECT_EQ(node_types, 4u);
  EXPECT_EQ(edges, 239566u);
  EXPECT_EQ(edge_types, 6u);
  EXPECT_EQ(target, "author");
  EXPECT_EQ(classes, 4u);
}

TEST_F(Cli, StatsEmptyGraph) {
  fs::create_directories(path("empty"));
  std::ofstream(path("empty") + "/manifest.json")
      << R"({"format":"hgc-dataset","version":1,"node_types":[],"edge_types":[],"target":null,"num_classes":0})";
  const auto r = cli({"stats", "--data", path("empty")});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream rows(r.out);
  std::string header, row, name;
  std::getline(rows, header);
  std::getline(rows, row);
  std::istringstream cells(row);
  std::size_t a = 1, b = 1, c = 1, d = 1;
  cells >> name >> a >> b >> c >> d;
  EXPECT_EQ(a + b + c + d, 0u) << row;
}

TEST_F(Cli, StatsCorruptedEdgeFileExitsTwoNamingFile) {
  fs::copy(data(), path("broken"), fs::copy_options::recursive);
  std::ofstream(path("broken") + "/edges_ps.tsv", std::ios::app) << "0\tnotanumber\n";
  const auto r = binary("stats --data " + path("broken"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("edges_ps.tsv"), std::string::npos) << r.out;
}

TEST_F(Cli, CondenseTargetCountArithmetic) {
  const auto r = cli({"condense", "--data", data(), "--out", path("c36"), "--ratio", "0.012", "--method", "herding",
                      "--metapaths", kSyntheticMetapaths, "--pool", "labeled"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_dataset(path("c36")).node_types[0].count, 36u);
  EXPECT_NE(r.out.find("mean dist"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("c36") + ".run.json"));
}

TEST_F(Cli, CondenseFullRatioKeepsPool) {
  const auto r = cli({"condense", "--data", data(), "--out", path("c100"), "--ratio", "1.0", "--method", "topk",
                      "--metapaths", kSyntheticMetapaths});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto full = load_dataset(data());
  const auto mask = full.labels.split_mask(Split::train);
  EXPECT_EQ(load_dataset(path("c100")).node_types[0].count,
            static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)));
}

TEST_F(Cli, RandomWithoutSeedIsUsageError) {
  const auto r = binary("condense --data " + data() + " --out " + path("nope") + " --ratio 0.1 --method random" +
                        " --metapaths paper-author");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_FALSE(fs::exists(path("nope")));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"condense", "--data", data()}).code, 1);
  EXPECT_EQ(cli({"condense", "--data", data(), "--out", path("x"), "--method", "nope", "--metapaths", "paper-author"})
                .code,
            1);
  EXPECT_EQ(cli({"condense", "--data", data(), "--out", path("x"), "--metapaths", "author-paper"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(Cli, MissingDatasetIsDataError) {
  EXPECT_EQ(cli({"stats", "--data", path("does-not-exist")}).code, 2);
}

TEST_F(Cli, FailedCondenseLeavesNoPartialOutput) {
  const auto r = cli({"condense", "--data", data(), "--out", path("partial"), "--metapaths", "paper-nothing"});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(fs::exists(path("partial")));
  for (const auto& e : fs::directory_iterator(tmp_->path()))
    EXPECT_EQ(e.path().filename().string().find(".partial"), std::string::npos);
}

TEST_F(Cli, RefusesOverwriteWithoutFlag) {
  const std::vector<std::string> base{"condense", "--data", data(), "--out", path("ow"), "--metapaths", "paper-author"};
  ASSERT_EQ(cli(base).code, 0);
  EXPECT_EQ(cli(base).code, 1);
  auto with = base;
  with.push_back("--overwrite");
  EXPECT_EQ(cli(with).code, 0);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  std::ofstream(path("cfg.txt")) << "method = topk\nratio = 0.024\nmetapaths = paper-author,paper-subject\n";
  ASSERT_EQ(cli({"condense", "--data", data(), "--out", path("cfgout"), "--config", path("cfg.txt"), "--ratio",
                 "0.048"})
                .code,
            0);
  const auto prov = read_manifest(path("cfgout")).at("provenance");
  EXPECT_EQ(prov.at("method"), "topk");
  EXPECT_EQ(prov.at("ratio").get<double>(), 0.048);
}

TEST_F(Cli, EvalRepeatFiveWritesFiveRows) {
  ASSERT_EQ(cli({"condense", "--data", data(), "--out", path("e1"), "--metapaths", kSyntheticMetapaths}).code, 0);
  const auto r = cli({"eval", "--data", data(), "--condensed", path("e1"), "--repeat", "5", "--seed", "3", "--out",
                      path("e1.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(oracle::slurp(path("e1.csv"))), 6u);
  EXPECT_NE(r.out.find("+-"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("e1.table.txt")));
  const auto rows = read_results_csv(path("e1.csv"));
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].seed, 3 + i);
}

TEST_F(Cli, EvalRepeatOneTwiceIdentical) {
  const std::vector<std::string> args{"eval", "--data", data(), "--method", "random", "--ratio", "0.024",
                                      "--metapaths", kSyntheticMetapaths, "--seed", "11"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", path("rep_a.csv")});
  b.insert(b.end(), {"--out", path("rep_b.csv")});
  ASSERT_EQ(cli(a).code, 0);
  ASSERT_EQ(cli(b).code, 0);
  EXPECT_EQ(oracle::slurp(path("rep_a.csv")), oracle::slurp(path("rep_b.csv")));
}

TEST_F(Cli, EvalIdentityCondensateEqualsFullData) {
  ASSERT_EQ(cli({"condense", "--data", data(), "--out", path("id"), "--ratio", "1.0", "--pool", "labeled",
                 "--metapaths", kSyntheticMetapaths})
                .code,
            0);
  ASSERT_EQ(cli({"eval", "--data", data(), "--condensed", path("id"), "--out", path("id.csv")}).code, 0);
  ASSERT_EQ(cli({"eval", "--data", data(), "--metapaths", kSyntheticMetapaths, "--out", path("full.csv")}).code, 0);
  EXPECT_EQ(read_results_csv(path("id.csv"))[0].accuracy, read_results_csv(path("full.csv"))[0].accuracy);
}

TEST_F(Cli, CompareAggregatesResults) {
  ASSERT_EQ(cli({"eval", "--data", data(), "--method", "herding", "--ratio", "0.012", "--metapaths",
                 kSyntheticMetapaths, "--repeat", "2", "--out", path("h.csv")})
                .code,
            0);
  ASSERT_EQ(cli({"eval", "--data", data(), "--method", "random", "--ratio", "0.012", "--metapaths",
                 kSyntheticMetapaths, "--repeat", "3", "--out", path("r.csv")})
                .code,
            0);
  const auto r = cli({"compare", "--results", path("h.csv"), path("r.csv"), "--out", path("cmp.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("herding"), std::string::npos);
  EXPECT_NE(r.out.find("random"), std::string::npos);
  EXPECT_EQ(line_count(oracle::slurp(path("cmp.csv"))), 3u);
}

TEST_F(Cli, BenchTwoMethods) {
  SyntheticSpec toy;
  toy.papers = 300;
  toy.authors = 150;
  save_dataset(make_synthetic_graph(toy), path("toy"));
  const auto r = cli({"bench", "--data", path("toy"), "--methods", "herding,random", "--repeats", "3", "--metapaths",
                      kSyntheticMetapaths, "--out", path("bench.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = oracle::slurp(path("bench.csv"));
  EXPECT_EQ(line_count(csv), 3u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,ratio,pool_size,repeats,median_seconds,peak_rss_kb");
  EXPECT_NE(csv.find("\nherding,"), std::string::npos);
  EXPECT_NE(csv.find("\nrandom,"), std::string::npos);
  EXPECT_NE(csv.find(",3,"), std::string::npos);
}

TEST_F(Cli, ReplayReproducesBytes) {
  ASSERT_EQ(cli({"condense", "--data", data(), "--out", path("rp"), "--method", "random", "--seed", "5",
                 "--ratio", "0.024", "--metapaths", kSyntheticMetapaths})
                .code,
            0);
  fs::rename(path("rp"), path("rp_first"));
  const auto r = binary("replay --manifest " + path("rp") + ".run.json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(oracle::same_tree(path("rp"), path("rp_first")));
}

TEST_F(Cli, ThreadsFlagDoesNotChangeOutput) {
  for (const char* t : {"1", "2"}) {
    ASSERT_EQ(binary(std::string("--threads ") + t + " condense --data " + data() + " --out " + path("th") + t +
                     " --ratio 0.048 --metapaths " + kSyntheticMetapaths)
                  .code,
              0);
  }
  EXPECT_TRUE(oracle::same_tree(path("th1"), path("th2")));
}

}  // namespace
}  // namespace hgc
