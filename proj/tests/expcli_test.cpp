// Copyright 2026 The PrivGraph Authors.
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


#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "privgraph/errors.hpp"
#include "privgraph/eval.hpp"
#include "privgraph/expcli.hpp"
#include "test_util.hpp"

namespace privgraph {
namespace {

using testing::TempDir;

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "privgraph");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small SBM experiment; `extra` lines are appended.
std::string sbm_config(const std::filesystem::path& out, const std::string& extra) {
  return "name = sbm\noutput = " + out.string() +
         "\nsbm.blocks = 2\nsbm.nodes_per_block = 50\nsbm.seed = 3\n"
         "per_class = 20\nn_val = 20\nn_test = 40\n" +
         extra;
}

TEST_CASE("parse_config") {
  std::istringstream in(
      "# experiment\n"
      "name = cora\n"
      "dataset = data/cora   # relative to the config\n"
      "output = out\n"
      "task = baseline_node\n"
      "lambda = 0.25\n"
      "lr1 = 0.02\nlr2 = 0.03\nlr3 = 0.04\n"
      "inner_steps = 2\nrounds = 7\nhidden = 32\nembed = 8\n"
      "seeds = 0, 1, 5\n"
      "per_class = 10\nn_val = 30\nn_test = 40\n"
      "train_frac = 0.8\nval_frac = 0.1\ncheckpoints = false\n");
  const ExperimentConfig cfg = parse_config(in, "/base");
  CHECK(cfg.name == "cora");
  CHECK(*cfg.dataset == std::filesystem::path("/base/data/cora"));
  CHECK(cfg.output == std::filesystem::path("/base/out"));
  CHECK(cfg.train.task == Task::kBaselineNode);
  CHECK(cfg.train.lambda == 0.25);
  CHECK(cfg.train.lr1 == 0.02);
  CHECK(cfg.train.lr3 == 0.04);
  CHECK(cfg.train.inner_steps == 2);
  CHECK(cfg.train.rounds == 7);
  CHECK(cfg.train.dims.hidden == 32);
  CHECK(cfg.train.dims.embed == 8);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 5});
  CHECK(cfg.per_class == 10);
  CHECK(cfg.train_frac == 0.8);
  CHECK(!cfg.checkpoints);
  CHECK(!cfg.sbm.has_value());

  std::istringstream sbm("seeds = 1\nsbm.blocks = 3\nsbm.p_in = 0.4\nsbm.p_out = 0.1\n"
                         "sbm.noise = 0.2\nsbm.nodes_per_block = 9\nsbm.seed = 12\n");
  const ExperimentConfig s = parse_config(sbm, ".");
  REQUIRE(s.sbm.has_value());
  CHECK(s.sbm->blocks == 3);
  CHECK(s.sbm->nodes_per_block == 9);
  CHECK(s.sbm->p_in == 0.4);
  CHECK(s.sbm_seed == 12);
  CHECK(s.name == "sbm");
}

TEST_CASE("parse_config rejects bad input") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, ".");
  };
  CHECK_THROWS_AS(parse("seeds = 1\nsbm.blocks = 2\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\nsbm.blocks = 2\nrounds = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\nsbm.blocks = 2\njust a line\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds =\nsbm.blocks = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\nsbm.blocks = 2\ndataset = x\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\nsbm.blocks = 2\nlambda = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\nsbm.p_in = 0.1\nsbm.p_out = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\nsbm.blocks = 2\ntask = problem9\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\nsbm.blocks = 2\ncheckpoints = yes\n"), ConfigError);
}

TEST_CASE("CSV rows and curves") {
  ExperimentResult r;
  r.dataset = "cora";
  r.method = "protected";
  r.problem = 2;
  r.lambda = 0.3;
  r.seed = 9;
  r.primary_metric = 0.1 + 0.2;
  r.privacy_metric = 2.0 / 3.0;
  r.rand_node = 1.0 / 7.0;
  r.rand_link = 0.5;
  r.seconds = 1.25;
  TempDir dir;
  const auto csv = dir.path() / "r.csv";
  append_results(csv, {r});
  append_results(csv, {r});
  const std::string text = read_file(csv);
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(text.find(kCsvHeader, 1) == std::string::npos);
  const auto rows = read_results(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].primary_metric == r.primary_metric);
  CHECK(rows[0].privacy_metric == r.privacy_metric);
  CHECK(rows[0].rand_node == r.rand_node);
  CHECK(rows[0].lambda == 0.3);
  CHECK(format_csv_row(rows[1]) == format_csv_row(r));

  std::vector<ExperimentResult> grid;
  Rng rng(1);
  for (double lambda : {0.0, 0.5, 1.0}) {
    for (int s = 0; s < 4; ++s) {
      ExperimentResult row = r;
      row.lambda = lambda;
      row.primary_metric = rng.uniform_double();
      row.privacy_metric = rng.uniform_double();
      grid.push_back(row);
    }
  }
  const auto curve = lambda_curve(grid);
  REQUIRE(curve.size() == 3);
  for (Index i = 0; i < 3; ++i) {
    double p = 0.0, q = 0.0;
    for (int s = 0; s < 4; ++s) {
      p += grid[i * 4 + s].primary_metric;
      q += grid[i * 4 + s].privacy_metric;
    }
    CHECK(std::abs(curve[i].mean_primary - p / 4.0) <= 1e-12);
    CHECK(std::abs(curve[i].mean_privacy - q / 4.0) <= 1e-12);
  }
  write_curve(dir.path() / "curve.csv", curve);
  CHECK(read_file(dir.path() / "curve.csv").rfind("lambda,mean_primary,mean_privacy\n", 0) ==
        0);
}

TEST_CASE("checkpoint round trip and errors") {
  Rng rng(2);
  const ModelParams p = init_params({5, 4, 3, 2}, rng);
  TempDir dir;
  const auto path = dir.path() / "m.ckpt";
  save_checkpoint(path, p);
  const ModelParams back = load_checkpoint(path);
  CHECK(back == p);
  CHECK(read_file(path).rfind("PRIVGRAPH-CKPT v1 5 4 3 2\n", 0) == 0);

  const std::string text = read_file(path);
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(read_checkpoint(truncated), FormatError);
  std::string wrong_dims = text;
  wrong_dims.replace(0, 25, "PRIVGRAPH-CKPT v1 5 4 3 3");
  std::istringstream mismatch(wrong_dims);
  CHECK_THROWS_AS(read_checkpoint(mismatch), FormatError);
  std::string wrong_version = text;
  wrong_version.replace(0, 17, "PRIVGRAPH-CKPT v2");
  std::istringstream version(wrong_version);
  CHECK_THROWS_AS(read_checkpoint(version), FormatError);
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "missing.ckpt"), NotFoundError);

  // The command line reports a damaged checkpoint with a nonzero exit.
  write_file(dir.path() / "cut.ckpt", text.substr(0, text.size() / 2));
  const auto data = dir.path() / "data";
  REQUIRE(cli({"gen-synth", "--nodes-per-block", "5", data.string()}) == 0);
  CHECK(cli({"eval", (dir.path() / "cut.ckpt").string(), data.string()}) == exit_code::kIo);
}

TEST_CASE("gen-synth") {
  TempDir dir;
  const auto out = dir.path() / "sbm";
  REQUIRE(cli({"gen-synth", "--blocks", "2", "--nodes-per-block", "50", "--p-in", "1",
               "--p-out", "0", "--seed", "4", out.string()}) == 0);
  const Graph g = load_graph(out);
  CHECK(g.edges.size() == 2450);
  CHECK(g.num_classes == 2);
  CHECK(read_file(out / "labels.csv").rfind("100,2\n", 0) == 0);

  SbmSpec spec;
  spec.p_in = 1.0;
  spec.p_out = 0.0;
  Rng rng(derive_seed(4, SeedStream::kSbm));
  const Graph expected = gen_sbm(spec, rng);
  CHECK(g.edges == expected.edges);
  CHECK(g.features == expected.features);
  CHECK(g.labels == expected.labels);

  CHECK(cli({"gen-synth", "--p-in", "0.1", "--p-out", "0.2", out.string()}) ==
        exit_code::kConfig);
  write_file(dir.path() / "file", "x");
  CHECK(cli({"gen-synth", (dir.path() / "file" / "sub").string()}) == exit_code::kIo);
}

TEST_CASE("command line validation exits") {
  TempDir dir;
  const auto cfg = dir.path() / "exp.cfg";
  write_file(cfg, sbm_config(dir.path() / "out", "seeds =\n"));
  CHECK(cli({"run", cfg.string()}) == exit_code::kConfig);
  write_file(cfg, sbm_config(dir.path() / "out", "seeds = 0\nrounds = 2\n"));
  CHECK(cli({"sweep", cfg.string(), "--lambdas", "0,0.5,0.5"}) == exit_code::kConfig);
  CHECK(cli({"sweep", cfg.string(), "--lambdas", "0.5,0"}) == exit_code::kConfig);
  CHECK(cli({"sweep", cfg.string(), "--lambdas", "0,1.5"}) == exit_code::kConfig);
  CHECK(cli({"run", (dir.path() / "nope.cfg").string()}) == exit_code::kConfig);
  CHECK(cli({"frobnicate"}) == exit_code::kConfig);
  write_file(cfg, sbm_config(dir.path() / "out", "seeds = 0\nrounds = 5\nlr3 = 1e300\n"));
  CHECK(cli({"run", cfg.string()}) == exit_code::kDivergence);
  try {
    run_experiment(load_config(cfg), {0.5}, 1);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("seed=0") != std::string::npos);
  }
}

TEST_CASE("runs are reproducible") {
  TempDir dir;
  const auto cfg_path = dir.path() / "exp.cfg";
  write_file(cfg_path, sbm_config(dir.path() / "out", "seeds = 0, 1\nrounds = 20\n"
                                                      "task = problem2\n"));
  const ExperimentConfig cfg = load_config(cfg_path);
  const auto first = run_experiment(cfg, {0.0, 0.5}, 1);
  const std::string ckpt = read_file(checkpoint_path(cfg, 0.5, 1));
  const auto second = run_experiment(cfg, {0.0, 0.5}, 3);
  REQUIRE(first.size() == 4);
  REQUIRE(second.size() == 4);
  for (Index i = 0; i < 4; ++i) {
    ExperimentResult a = first[i], b = second[i];
    a.seconds = b.seconds = 0.0;
    CHECK(format_csv_row(a) == format_csv_row(b));
    CHECK(a.rand_node == random_baselines(2).node);
    CHECK(a.rand_link == 0.5);
    CHECK(a.method == "protected");
    CHECK(a.problem == 2);
  }
  CHECK(read_file(checkpoint_path(cfg, 0.5, 1)) == ckpt);
  CHECK(read_results(cfg.output / "results.csv").size() == 8);

  // The checkpoint re-evaluates to the same test metrics.
  const auto data = dir.path() / "data";
  save_graph(load_dataset(cfg), data);
  CHECK(cli({"eval", checkpoint_path(cfg, 0.5, 1).string(), data.string(), "--task",
             "problem2", "--seed", "1", "--per-class", "20", "--n-val", "20", "--n-test",
             "40"}) == 0);
  const Graph g = load_graph(data);
  const Splits splits = make_splits(g, cfg, 1);
  const TrainingProblem problem(g, splits.nodes, splits.links);
  const auto [primary, privacy] =
      test_metrics(load_checkpoint(checkpoint_path(cfg, 0.5, 1)), problem, Task::kProblem2);
  CHECK(primary == first[3].primary_metric);
  CHECK(privacy == first[3].privacy_metric);
}

// Full-length runs on the default two-block SBM.
std::vector<ExperimentResult> sbm_sweep(const TempDir& dir, const std::string& task,
                                        const std::vector<double>& grid) {
  const auto cfg_path = dir.path() / (task + ".cfg");
  write_file(cfg_path, sbm_config(dir.path() / task, "seeds = 0, 1, 2\ncheckpoints = false\n"
                                                     "task = " + task + "\n"));
  return run_experiment(load_config(cfg_path), grid, 3);
}

double mean_of(const std::vector<ExperimentResult>& rows, double lambda, bool primary) {
  double s = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.lambda != lambda) continue;
    s += primary ? r.primary_metric : r.privacy_metric;
    ++n;
  }
  return s / n;
}

TEST_CASE("protected problem 2 on SBM hides links") {
  TempDir dir;
  const auto rows = sbm_sweep(dir, "problem2", {0.5});
  for (const auto& r : rows) {
    MESSAGE("seed " << r.seed << " link attack AUC " << r.privacy_metric);
    CHECK(r.privacy_metric >= 0.40);
    CHECK(r.privacy_metric <= 0.60);
  }
}

TEST_CASE("lambda sweep end points on SBM") {
  TempDir dir;
  const auto rows = sbm_sweep(dir, "problem1", {0.0, 0.5, 1.0});
  const double p0 = mean_of(rows, 0.0, true), p1 = mean_of(rows, 1.0, true);
  const double q0 = mean_of(rows, 0.0, false);
  MESSAGE("primary at 0: " << p0 << ", at 1: " << p1 << "; privacy at 0: " << q0);
  CHECK(p0 <= p1);
  // Three seeds on 40 test nodes: about three standard errors of a fair coin.
  CHECK(std::abs(q0 - 0.5) <= 3.0 * std::sqrt(0.25 / (3.0 * 40.0)));
}

}  // namespace
}  // namespace privgraph
