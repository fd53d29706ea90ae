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

// Alternating training of encoder, link predictor and node classifier.
//
// Problem 1 (link prediction, node labels private), per inner step:
//   phi   descends L_link                                  (lr1)
//   psi   descends L_node, i.e. the attacker fits labels   (lr2)
//   theta descends lambda * L_link - (1 - lambda) * L_node (lr3)
// Problem 2 swaps the roles of the two heads.
//
// All three gradients of an inner step are taken at the same parameter point.
// Training is full batch and the encoder sees only training positive edges.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "privgraph/graphdata.hpp"
#include "privgraph/models.hpp"
#include "privgraph/numkit.hpp"
#include "privgraph/objectives.hpp"

namespace privgraph {

enum class Task { kProblem1, kProblem2, kBaselineLink, kBaselineNode };

std::string task_name(Task task);
// Accepts problem1 | problem2 | baseline_link | baseline_node.
std::optional<Task> parse_task(std::string_view name);

// 1 for link prediction as the primary task, 2 for node classification.
int problem_of(Task task);
bool is_baseline(Task task);

struct TrainConfig {
  double lambda = 0.5;
  double lr1 = 0.01;
  double lr2 = 0.01;
  double lr3 = 0.01;
  Index inner_steps = 1;
  Index rounds = 200;
  ModelDims dims;
  std::uint64_t seed = 0;
  Task task = Task::kProblem1;

  // Throws ConfigError on an invalid field.
  void validate() const;
};

struct RoundRecord {
  double l1 = 0.0;  // primary-task training loss
  double l2 = 0.0;  // privacy-task (attacker) training loss
  double val_primary = 0.0;
  double val_privacy = 0.0;
  double vclub = 0.0;
};

struct TrainTrace {
  std::vector<RoundRecord> rounds;
};

struct ModelState {
  ModelParams params;
  AdamState theta_opt;
  AdamState phi_opt;
  AdamState psi_opt;
};

// Fresh optimizer state for `params`.
ModelState make_state(ModelParams params, const TrainConfig& cfg);

struct TrainResult {
  ModelState final_state;
  ModelParams selected;  // parameters at the selected round
  Index selected_round = 0;
  TrainTrace trace;
};

// Immutable inputs of one training run.
class TrainingProblem {
 public:
  TrainingProblem(const Graph& g, const NodeSplit& nodes, const LinkSplit& links);

  const Graph& graph() const { return *graph_; }
  const NodeSplit& node_split() const { return *nodes_; }
  const LinkSplit& link_split() const { return *links_; }
  // Normalized adjacency over training positive edges only.
  const SparseMatrix& a_hat() const { return a_hat_; }
  GraphContext context() const { return {a_hat_, graph_->features}; }
  const LabeledPairs& train_pairs() const { return train_pairs_; }
  const LabeledPairs& val_pairs() const { return val_pairs_; }
  const LabeledPairs& test_pairs() const { return test_pairs_; }

 private:
  const Graph* graph_;
  const NodeSplit* nodes_;
  const LinkSplit* links_;
  SparseMatrix a_hat_;
  LabeledPairs train_pairs_;
  LabeledPairs val_pairs_;
  LabeledPairs test_pairs_;
};

// Losses and their gradients at one parameter point.
struct LossGradients {
  double link_loss = 0.0;
  double node_loss = 0.0;
  EncoderParams link_theta;  // dL_link / dtheta
  EncoderParams node_theta;  // dL_node / dtheta
  DenseMatrix link_wb;
  DenseMatrix node_wc;
};

LossGradients compute_gradients(const ModelParams& params, const TrainingProblem& problem,
                                bool need_link = true, bool need_node = true);

// lambda * primary - (1 - lambda) * privacy. A term whose weight is exactly
// zero is dropped, so lambda = 1 reproduces single-task gradients bit for bit.
EncoderParams combine_encoder_gradients(const EncoderParams& primary,
                                        const EncoderParams& privacy, double lambda);

// Validation metrics (primary, privacy) for `task` at `params`.
std::pair<double, double> validation_metrics(const ModelParams& params,
                                             const TrainingProblem& problem, Task task);

TrainResult train_problem1(const TrainingProblem& problem, const TrainConfig& cfg);
TrainResult train_problem1(const TrainingProblem& problem, const TrainConfig& cfg,
                           ModelParams init);
TrainResult train_problem2(const TrainingProblem& problem, const TrainConfig& cfg);
TrainResult train_problem2(const TrainingProblem& problem, const TrainConfig& cfg,
                           ModelParams init);
TrainResult train_baseline(const TrainingProblem& problem, const TrainConfig& cfg);
TrainResult train_baseline(const TrainingProblem& problem, const TrainConfig& cfg,
                           ModelParams init);
// Dispatches on cfg.task.
TrainResult train(const TrainingProblem& problem, const TrainConfig& cfg);

// Post-hoc attack: fits the privacy head of `task` for `rounds` steps on the
// representation of the frozen encoder. Returns the per-round attacker loss.
std::vector<double> fit_attacker(ModelParams& params, AdamState& opt,
                                 const TrainingProblem& problem, Task task,
                                 Index rounds);

// Round with the best validation primary metric; earliest on ties.
Index select_model(const TrainTrace& trace);

// Initial parameters derived from cfg.seed.
ModelParams initial_params(const TrainConfig& cfg);

}  // namespace privgraph
