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

#include "privgraph/expcli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "privgraph/errors.hpp"
#include "privgraph/eval.hpp"

namespace privgraph {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
std::optional<T> parse_value(const std::string& text) {
  T out{};
  std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (s.front() == '+') s.erase(0, 1);
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string format_double(double x, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (dataset.has_value() == sbm.has_value()) {
    throw ConfigError("exactly one of 'dataset' or the sbm.* keys must be given");
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (!(train.lambda >= 0.0 && train.lambda <= 1.0)) {
    throw ConfigError("lambda must lie in [0, 1]");
  }
  if (!(train.lr1 > 0.0 && train.lr2 > 0.0 && train.lr3 > 0.0)) {
    throw ConfigError("learning rates must be > 0");
  }
  if (train.inner_steps < 1 || train.rounds < 1) {
    throw ConfigError("inner_steps and rounds must be >= 1");
  }
  if (train.dims.hidden < 1 || train.dims.embed < 1) {
    throw ConfigError("hidden and embed must be >= 1");
  }
  if (!(train_frac >= 0.0 && val_frac >= 0.0 && train_frac + val_frac < 1.0)) {
    throw ConfigError("need train_frac, val_frac >= 0 with sum < 1");
  }
  if (sbm && !(0.0 <= sbm->p_out && sbm->p_out <= sbm->p_in && sbm->p_in <= 1.0)) {
    throw ConfigError("need 0 <= sbm.p_out <= sbm.p_in <= 1");
  }
  if (sbm && (sbm->blocks < 2 || sbm->nodes_per_block < 1)) {
    throw ConfigError("sbm needs >= 2 blocks of >= 1 node");
  }
}

ExperimentConfig parse_config(std::istream& in, const fs::path& base_dir) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto fail = [&]() -> ConfigError {
      return ConfigError("line " + std::to_string(line_no) + ": bad value '" + value +
                         "' for " + key);
    };
    auto as_double = [&]() {
      auto v = parse_value<double>(value);
      if (!v) throw fail();
      return *v;
    };
    auto as_count = [&]() {
      auto v = parse_value<Index>(value);
      if (!v) throw fail();
      return *v;
    };
    auto sbm = [&]() -> SbmSpec& {
      if (!cfg.sbm) cfg.sbm = SbmSpec{};
      return *cfg.sbm;
    };

    if (key == "name") {
      cfg.name = value;
    } else if (key == "dataset") {
      cfg.dataset = resolve(value);
    } else if (key == "output") {
      cfg.output = resolve(value);
    } else if (key == "task") {
      auto t = parse_task(value);
      if (!t) throw fail();
      cfg.train.task = *t;
    } else if (key == "lambda") {
      cfg.train.lambda = as_double();
    } else if (key == "lr1") {
      cfg.train.lr1 = as_double();
    } else if (key == "lr2") {
      cfg.train.lr2 = as_double();
    } else if (key == "lr3") {
      cfg.train.lr3 = as_double();
    } else if (key == "inner_steps") {
      cfg.train.inner_steps = as_count();
    } else if (key == "rounds") {
      cfg.train.rounds = as_count();
    } else if (key == "hidden") {
      cfg.train.dims.hidden = as_count();
    } else if (key == "embed") {
      cfg.train.dims.embed = as_count();
    } else if (key == "seeds") {
      cfg.seeds.clear();
      if (!value.empty()) {
        for (const auto& item : split_list(value, ',')) {
          auto s = parse_value<std::uint64_t>(item);
          if (!s) throw fail();
          cfg.seeds.push_back(*s);
        }
      }
    } else if (key == "per_class") {
      cfg.per_class = as_count();
    } else if (key == "n_val") {
      cfg.n_val = as_count();
    } else if (key == "n_test") {
      cfg.n_test = as_count();
    } else if (key == "train_frac") {
      cfg.train_frac = as_double();
    } else if (key == "val_frac") {
      cfg.val_frac = as_double();
    } else if (key == "checkpoints") {
      if (value != "true" && value != "false") throw fail();
      cfg.checkpoints = value == "true";
    } else if (key == "sbm.blocks") {
      sbm().blocks = as_count();
    } else if (key == "sbm.nodes_per_block") {
      sbm().nodes_per_block = as_count();
    } else if (key == "sbm.p_in") {
      sbm().p_in = as_double();
    } else if (key == "sbm.p_out") {
      sbm().p_out = as_double();
    } else if (key == "sbm.noise") {
      sbm().noise = as_double();
    } else if (key == "sbm.seed") {
      auto s = parse_value<std::uint64_t>(value);
      if (!s) throw fail();
      cfg.sbm_seed = *s;
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.name.empty()) {
    cfg.name = cfg.dataset ? cfg.dataset->filename().string() : std::string("sbm");
    if (cfg.name.empty() && cfg.dataset) cfg.name = cfg.dataset->parent_path().filename();
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_config(in, path.parent_path());
}

// ---------------------------------------------------------------------------
// CSV

std::string format_csv_row(const ExperimentResult& r) {
  std::ostringstream out;
  out << r.dataset << ',' << r.method << ',' << r.problem << ','
      << format_double(r.lambda, 15) << ',' << r.seed << ','
      << format_double(r.primary_metric, 17) << ','
      << format_double(r.privacy_metric, 17) << ',' << format_double(r.rand_node, 17)
      << ',' << format_double(r.rand_link, 17) << ',' << format_double(r.seconds, 6);
  return out.str();
}

void append_results(const fs::path& csv, const std::vector<ExperimentResult>& rows) {
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  std::error_code ec;
  const bool fresh = !fs::exists(csv, ec) || fs::file_size(csv, ec) == 0;
  std::ofstream out(csv, std::ios::app);
  if (!out) throw Error("cannot write " + csv.string());
  if (fresh) out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_csv_row(r) << '\n';
  if (!out) throw Error("write failed: " + csv.string());
}

std::vector<ExperimentResult> read_results(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw NotFoundError("cannot open " + csv.string());
  std::string line;
  std::vector<ExperimentResult> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader) throw ParseError(csv.string(), 1, "unexpected header");
      continue;
    }
    if (trim(line).empty()) continue;
    const auto f = split_list(line, ',');
    if (f.size() != 10) throw ParseError(csv.string(), line_no, "expected 10 columns");
    ExperimentResult r;
    r.dataset = f[0];
    r.method = f[1];
    auto problem = parse_value<int>(f[2]);
    auto lambda = parse_value<double>(f[3]);
    auto seed = parse_value<std::uint64_t>(f[4]);
    auto primary = parse_value<double>(f[5]);
    auto privacy = parse_value<double>(f[6]);
    auto rn = parse_value<double>(f[7]);
    auto rl = parse_value<double>(f[8]);
    auto secs = parse_value<double>(f[9]);
    if (!problem || !lambda || !seed || !primary || !privacy || !rn || !rl || !secs) {
      throw ParseError(csv.string(), line_no, "bad numeric field");
    }
    r.problem = *problem;
    r.lambda = *lambda;
    r.seed = *seed;
    r.primary_metric = *primary;
    r.privacy_metric = *privacy;
    r.rand_node = *rn;
    r.rand_link = *rl;
    r.seconds = *secs;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<CurvePoint> lambda_curve(const std::vector<ExperimentResult>& rows) {
  std::vector<CurvePoint> curve;
  std::vector<Index> counts;
  for (const auto& r : rows) {
    auto it = std::find_if(curve.begin(), curve.end(),
                           [&](const CurvePoint& p) { return p.lambda == r.lambda; });
    if (it == curve.end()) {
      curve.push_back({r.lambda, 0.0, 0.0});
      counts.push_back(0);
      it = curve.end() - 1;
    }
    it->mean_primary += r.primary_metric;
    it->mean_privacy += r.privacy_metric;
    ++counts[static_cast<Index>(it - curve.begin())];
  }
  for (Index i = 0; i < curve.size(); ++i) {
    curve[i].mean_primary /= static_cast<double>(counts[i]);
    curve[i].mean_privacy /= static_cast<double>(counts[i]);
  }
  return curve;
}

void write_curve(const fs::path& csv, const std::vector<CurvePoint>& curve) {
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  std::ofstream out(csv);
  if (!out) throw Error("cannot write " + csv.string());
  out << "lambda,mean_primary,mean_privacy\n";
  for (const auto& p : curve) {
    out << format_double(p.lambda, 15) << ',' << format_double(p.mean_primary, 17) << ','
        << format_double(p.mean_privacy, 17) << '\n';
  }
  if (!out) throw Error("write failed: " + csv.string());
}

// ---------------------------------------------------------------------------
// Runs

std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
  return mix_seed(seed, static_cast<std::uint64_t>(stream));
}

Graph load_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset) return load_graph(*cfg.dataset);
  Rng rng(derive_seed(cfg.sbm_seed, SeedStream::kSbm));
  return gen_sbm(*cfg.sbm, rng);
}

Splits make_splits(const Graph& g, const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng node_rng(derive_seed(seed, SeedStream::kNodeSplit));
  Rng link_rng(derive_seed(seed, SeedStream::kLinkSplit));
  Splits s;
  s.nodes = split_nodes(g, cfg.per_class, cfg.n_val, cfg.n_test, node_rng);
  s.links = split_links(g, cfg.train_frac, cfg.val_frac, link_rng);
  return s;
}

std::pair<double, double> test_metrics(const ModelParams& params,
                                       const TrainingProblem& problem, Task task) {
  const auto ctx = problem.context();
  const DenseMatrix z = encode(params.encoder, ctx.a_hat, ctx.x);
  const LinkSplit& links = problem.link_split();
  const double link = auc(link_scores(params.predictor, z, links.test_pos),
                          link_scores(params.predictor, z, links.test_neg));
  const auto& test_nodes = problem.node_split().test;
  std::vector<Index> truth;
  truth.reserve(test_nodes.size());
  for (Index u : test_nodes) truth.push_back(problem.graph().labels[u]);
  const DenseMatrix logits = classify_logits(params.classifier, z);
  const double node = accuracy(predict_labels(logits, test_nodes), truth);
  return problem_of(task) == 1 ? std::pair{link, node} : std::pair{node, link};
}

RunOutput run_single(const Graph& g, const ExperimentConfig& cfg, double lambda,
                     std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Splits splits = make_splits(g, cfg, seed);
  const TrainingProblem problem(g, splits.nodes, splits.links);
  TrainConfig tc = cfg.train;
  tc.lambda = lambda;
  tc.seed = derive_seed(seed, SeedStream::kTrain);
  tc.dims.features = g.feature_dim();
  tc.dims.classes = g.num_classes;
  TrainResult trained = train(problem, tc);
  const auto [primary, privacy] = test_metrics(trained.selected, problem, tc.task);
  const auto rand = random_baselines(g.num_classes);

  RunOutput out;
  out.result.dataset = cfg.name;
  out.result.method = is_baseline(tc.task) ? "baseline" : "protected";
  out.result.problem = problem_of(tc.task);
  out.result.lambda = lambda;
  out.result.seed = seed;
  out.result.primary_metric = primary;
  out.result.privacy_metric = privacy;
  out.result.rand_node = rand.node;
  out.result.rand_link = rand.link;
  out.result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.selected = std::move(trained.selected);
  return out;
}

fs::path checkpoint_path(const ExperimentConfig& cfg, double lambda, std::uint64_t seed) {
  return cfg.output / "checkpoints" /
         (task_name(cfg.train.task) + "_lambda" + format_double(lambda, 6) + "_seed" +
          std::to_string(seed) + ".ckpt");
}

std::vector<ExperimentResult> run_experiment(const ExperimentConfig& cfg,
                                             const std::vector<double>& lambdas,
                                             unsigned threads) {
  cfg.validate();
  const Graph g = load_dataset(cfg);
  struct Job {
    double lambda;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double l : lambdas) {
    for (std::uint64_t s : cfg.seeds) jobs.push_back({l, s});
  }
  std::vector<std::optional<RunOutput>> outputs(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (Index j = next++; j < jobs.size(); j = next++) {
      try {
        outputs[j] = run_single(g, cfg, jobs[j].lambda, jobs[j].seed);
      } catch (const DivergenceError& e) {
        errors[j] = std::make_exception_ptr(DivergenceError(
            e.round(), "run " + cfg.name + " " + task_name(cfg.train.task) + " lambda=" +
                           format_double(jobs[j].lambda, 6) + " seed=" +
                           std::to_string(jobs[j].seed) + ": " + e.detail()));
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Single writer, grid order.
  std::vector<ExperimentResult> rows;
  rows.reserve(jobs.size());
  for (Index j = 0; j < jobs.size(); ++j) {
    rows.push_back(outputs[j]->result);
    if (cfg.checkpoints) {
      save_checkpoint(checkpoint_path(cfg, jobs[j].lambda, jobs[j].seed),
                      outputs[j]->selected);
    }
  }
  append_results(cfg.output / "results.csv", rows);
  return rows;
}

// ---------------------------------------------------------------------------
// Checkpoints

void write_checkpoint(std::ostream& out, const ModelParams& params) {
  params.validate();
  const ModelDims& d = params.dims;
  out << "PRIVGRAPH-CKPT v1 " << d.features << ' ' << d.hidden << ' ' << d.embed << ' '
      << d.classes << '\n';
  auto block = [&](const char* name, const DenseMatrix& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) {
        if (c > 0) out << ' ';
        out << format_double(m(r, c), 17);
      }
      out << '\n';
    }
  };
  block("W0", params.encoder.w0);
  block("W1", params.encoder.w1);
  block("Wb", params.predictor.wb);
  block("Wc", params.classifier.wc);
}

void save_checkpoint(const fs::path& path, const ModelParams& params) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_checkpoint(out, params);
  if (!out) throw Error("write failed: " + path.string());
}

ModelParams read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("checkpoint: empty file");
  std::istringstream header(line);
  std::string magic;
  std::string version;
  ModelParams p;
  if (!(header >> magic >> version) || magic != "PRIVGRAPH-CKPT") {
    throw FormatError("checkpoint: missing PRIVGRAPH-CKPT header");
  }
  if (version != "v1") throw FormatError("checkpoint: unsupported version " + version);
  if (!(header >> p.dims.features >> p.dims.hidden >> p.dims.embed >> p.dims.classes)) {
    throw FormatError("checkpoint: header needs D H d C");
  }
  auto block = [&](const char* name, Index rows, Index cols) {
    if (!std::getline(in, line)) {
      throw FormatError(std::string("checkpoint: truncated before ") + name);
    }
    std::istringstream head(line);
    std::string got;
    Index r = 0;
    Index c = 0;
    if (!(head >> got >> r >> c) || got != name) {
      throw FormatError(std::string("checkpoint: expected block ") + name);
    }
    if (r != rows || c != cols) {
      throw FormatError(std::string("checkpoint: ") + name + " is " + std::to_string(r) +
                        "x" + std::to_string(c) + " but header implies " +
                        std::to_string(rows) + "x" + std::to_string(cols));
    }
    DenseMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) {
        throw FormatError(std::string("checkpoint: truncated inside ") + name);
      }
      const auto fields = split_list(line, ' ');
      if (fields.size() != cols) {
        throw FormatError(std::string("checkpoint: row ") + std::to_string(i) + " of " +
                          name + " has " + std::to_string(fields.size()) + " values");
      }
      for (Index j = 0; j < cols; ++j) {
        auto v = parse_value<double>(fields[j]);
        if (!v) throw FormatError(std::string("checkpoint: bad number in ") + name);
        m(i, j) = *v;
      }
    }
    return m;
  };
  p.encoder.w0 = block("W0", p.dims.features, p.dims.hidden);
  p.encoder.w1 = block("W1", p.dims.hidden, p.dims.embed);
  p.predictor.wb = block("Wb", p.dims.embed, p.dims.embed);
  p.classifier.wc = block("Wc", p.dims.embed, p.dims.classes);
  return p;
}

ModelParams load_checkpoint(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

unsigned threads_from_env() {
  const char* env = std::getenv("PRIVGRAPH_THREADS");
  if (env == nullptr) return 1;
  auto v = parse_value<unsigned>(env);
  return v && *v > 0 ? *v : 1;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

std::vector<double> parse_lambda_grid(const std::string& text) {
  std::vector<double> grid;
  for (const auto& item : split_list(text, ',')) {
    auto v = parse_value<double>(item);
    if (!v || !(*v >= 0.0 && *v <= 1.0)) {
      throw ConfigError("lambda grid value '" + item + "' is not in [0, 1]");
    }
    grid.push_back(*v);
  }
  if (grid.empty()) throw ConfigError("empty lambda grid");
  for (Index i = 1; i < grid.size(); ++i) {
    if (grid[i] == grid[i - 1]) throw ConfigError("duplicate lambda in grid");
    if (grid[i] < grid[i - 1]) throw ConfigError("lambda grid must be sorted");
  }
  return grid;
}

void print_rows(const std::vector<ExperimentResult>& rows) {
  std::cout << kCsvHeader << '\n';
  for (const auto& r : rows) std::cout << format_csv_row(r) << '\n';
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Privacy-preserving graph representation learning experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Train and evaluate every seed of a config");
  run_cmd->add_option("config", config_path, "Config file")->required();

  std::string sweep_config;
  std::string lambda_text;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a config over a lambda grid");
  sweep_cmd->add_option("config", sweep_config, "Config file")->required();
  sweep_cmd->add_option("--lambdas", lambda_text, "Comma-separated, sorted, unique")
      ->required();

  SbmSpec spec;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* gen_cmd = app.add_subcommand("gen-synth", "Write a stochastic block model graph");
  gen_cmd->add_option("--blocks", spec.blocks, "Number of blocks (classes)");
  gen_cmd->add_option("--nodes-per-block", spec.nodes_per_block, "Nodes in each block");
  gen_cmd->add_option("--p-in", spec.p_in, "Intra-block edge probability");
  gen_cmd->add_option("--p-out", spec.p_out, "Inter-block edge probability");
  gen_cmd->add_option("--noise", spec.noise, "Uniform feature noise level");
  gen_cmd->add_option("--seed", synth_seed, "Generator seed");
  gen_cmd->add_option("out-dir", synth_out, "Output directory")->required();

  std::string ckpt_path;
  std::string eval_data;
  std::string eval_task = "problem1";
  std::uint64_t eval_seed = 0;
  ExperimentConfig eval_cfg;
  auto* eval_cmd = app.add_subcommand("eval", "Test metrics of a checkpoint on a dataset");
  eval_cmd->add_option("checkpoint", ckpt_path, "Checkpoint file")->required();
  eval_cmd->add_option("dataset-dir", eval_data, "Dataset directory")->required();
  eval_cmd->add_option("--task", eval_task, "Task that produced the checkpoint");
  eval_cmd->add_option("--seed", eval_seed, "Seed of the run (rebuilds its splits)");
  eval_cmd->add_option("--per-class", eval_cfg.per_class, "Training nodes per class");
  eval_cmd->add_option("--n-val", eval_cfg.n_val, "Validation nodes");
  eval_cmd->add_option("--n-test", eval_cfg.n_test, "Test nodes");
  eval_cmd->add_option("--train-frac", eval_cfg.train_frac, "Training positive fraction");
  eval_cmd->add_option("--val-frac", eval_cfg.val_frac, "Validation positive fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::kConfig;
  }

  try {
    if (*run_cmd) {
      const ExperimentConfig cfg = load_config(config_path);
      print_rows(run_experiment(cfg, {cfg.train.lambda}, threads_from_env()));
    } else if (*sweep_cmd) {
      const ExperimentConfig cfg = load_config(sweep_config);
      const std::vector<double> grid = parse_lambda_grid(lambda_text);
      const auto rows = run_experiment(cfg, grid, threads_from_env());
      write_curve(cfg.output / "curve.csv", lambda_curve(rows));
      print_rows(rows);
    } else if (*gen_cmd) {
      if (!(0.0 <= spec.p_out && spec.p_out <= spec.p_in && spec.p_in <= 1.0)) {
        throw ConfigError("need 0 <= p-out <= p-in <= 1");
      }
      Rng rng(derive_seed(synth_seed, SeedStream::kSbm));
      const Graph g = gen_sbm(spec, rng);
      save_graph(g, synth_out);
      std::cout << "wrote " << g.num_nodes << " nodes, " << g.edges.size()
                << " edges to " << synth_out << '\n';
    } else if (*eval_cmd) {
      const auto task = parse_task(eval_task);
      if (!task) throw ConfigError("unknown task '" + eval_task + "'");
      const ModelParams params = load_checkpoint(ckpt_path);
      const Graph g = load_graph(eval_data);
      if (params.dims.features != g.feature_dim() || params.dims.classes != g.num_classes) {
        throw FormatError("checkpoint dimensions do not match the dataset");
      }
      const Splits splits = make_splits(g, eval_cfg, eval_seed);
      const TrainingProblem problem(g, splits.nodes, splits.links);
      const auto [primary, privacy] = test_metrics(params, problem, *task);
      const auto rand = random_baselines(g.num_classes);
      std::cout << "task=" << task_name(*task) << " primary_metric="
                << format_double(primary, 10) << " privacy_metric="
                << format_double(privacy, 10) << " rand_node="
                << format_double(rand.node, 10) << " rand_link="
                << format_double(rand.link, 10) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const CapacityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const RangeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return exit_code::kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::kIo;
  }
  return exit_code::kOk;
}

}  // namespace privgraph
