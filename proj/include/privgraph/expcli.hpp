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

// Experiment harness behind the `privgraph` command line tool.
//
// Config files are flat `key = value` lines; `#` starts a comment. Relative
// paths are resolved against the directory holding the config file. See
// README.md for the full key list.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "privgraph/graphdata.hpp"
#include "privgraph/models.hpp"
#include "privgraph/trainer.hpp"

namespace privgraph {

struct ExperimentConfig {
  std::string name;  // dataset name written to the CSV
  std::optional<std::filesystem::path> dataset;
  std::optional<SbmSpec> sbm;
  std::uint64_t sbm_seed = 0;
  TrainConfig train;  // dims.features / dims.classes are filled from the data
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output = "results";
  Index per_class = 20;
  Index n_val = 500;
  Index n_test = 1000;
  double train_frac = 0.85;
  double val_frac = 0.05;
  bool checkpoints = true;

  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError naming the offending line.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentResult {
  std::string dataset;
  std::string method;  // "baseline" | "protected"
  int problem = 1;
  double lambda = 0.5;
  std::uint64_t seed = 0;
  double primary_metric = 0.0;
  double privacy_metric = 0.0;
  double rand_node = 0.0;
  double rand_link = 0.5;
  double seconds = 0.0;
};

inline constexpr const char* kCsvHeader =
    "dataset,method,problem,lambda,seed,primary_metric,privacy_metric,rand_node,"
    "rand_link,seconds";

std::string format_csv_row(const ExperimentResult& r);
// Appends rows, writing the header first when the file is new or empty.
void append_results(const std::filesystem::path& csv, const std::vector<ExperimentResult>& rows);
std::vector<ExperimentResult> read_results(const std::filesystem::path& csv);

struct CurvePoint {
  double lambda = 0.0;
  double mean_primary = 0.0;
  double mean_privacy = 0.0;
};

// One point per distinct lambda, in order of first appearance.
std::vector<CurvePoint> lambda_curve(const std::vector<ExperimentResult>& rows);
void write_curve(const std::filesystem::path& csv, const std::vector<CurvePoint>& curve);

// Sub-seed for an independent random stream of one run.
enum class SeedStream : std::uint64_t { kSbm = 11, kNodeSplit = 12, kLinkSplit = 13, kTrain = 14 };
std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream);

// The dataset named by the config: loaded from disk or generated.
Graph load_dataset(const ExperimentConfig& cfg);

struct Splits {
  NodeSplit nodes;
  LinkSplit links;
};
Splits make_splits(const Graph& g, const ExperimentConfig& cfg, std::uint64_t seed);

// Test-set (primary, privacy) metrics of `params` for `task`.
std::pair<double, double> test_metrics(const ModelParams& params,
                                       const TrainingProblem& problem, Task task);

struct RunOutput {
  ExperimentResult result;
  ModelParams selected;
};

// Splits, trains, selects by validation and evaluates on test for one seed.
RunOutput run_single(const Graph& g, const ExperimentConfig& cfg, double lambda,
                     std::uint64_t seed);

std::filesystem::path checkpoint_path(const ExperimentConfig& cfg, double lambda,
                                      std::uint64_t seed);

// Runs every (lambda, seed) pair, appends to <output>/results.csv and returns
// the rows in grid order. `threads` caps concurrent runs.
std::vector<ExperimentResult> run_experiment(const ExperimentConfig& cfg,
                                             const std::vector<double>& lambdas,
                                             unsigned threads = 1);

// Checkpoint text format:
//   PRIVGRAPH-CKPT v1 D H d C
//   <name> <rows> <cols>
//   <row-major values, one row per line, 17 significant digits>
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
void write_checkpoint(std::ostream& out, const ModelParams& params);
// Throws FormatError on any grammar or shape violation.
ModelParams load_checkpoint(const std::filesystem::path& path);
ModelParams read_checkpoint(std::istream& in);

// Threads allowed by PRIVGRAPH_THREADS (default 1).
unsigned threads_from_env();

// Entry point of the command line tool; returns the process exit code.
int run_cli(int argc, char** argv);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kDivergence = 3;
inline constexpr int kIo = 4;
}  // namespace exit_code

}  // namespace privgraph
