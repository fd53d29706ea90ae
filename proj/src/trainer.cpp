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

#include "privgraph/trainer.hpp"

#include <array>
#include <cmath>
#include <functional>

#include "privgraph/errors.hpp"
#include "privgraph/eval.hpp"

namespace privgraph {

std::string task_name(Task task) {
  switch (task) {
    case Task::kProblem1: return "problem1";
    case Task::kProblem2: return "problem2";
    case Task::kBaselineLink: return "baseline_link";
    case Task::kBaselineNode: return "baseline_node";
  }
  return "unknown";
}

std::optional<Task> parse_task(std::string_view name) {
  for (Task t : {Task::kProblem1, Task::kProblem2, Task::kBaselineLink,
                 Task::kBaselineNode}) {
    if (task_name(t) == name) return t;
  }
  return std::nullopt;
}

int problem_of(Task task) {
  return task == Task::kProblem1 || task == Task::kBaselineLink ? 1 : 2;
}

bool is_baseline(Task task) {
  return task == Task::kBaselineLink || task == Task::kBaselineNode;
}

void TrainConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (inner_steps < 1) throw ConfigError("inner_steps must be >= 1");
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (!(lr1 > 0.0 && lr2 > 0.0 && lr3 > 0.0)) {
    throw ConfigError("learning rates must be > 0");
  }
  if (dims.features < 1 || dims.hidden < 1 || dims.embed < 1 || dims.classes < 2) {
    throw ConfigError("dims must be positive with at least 2 classes");
  }
}

namespace {

AdamState make_opt(double lr, std::initializer_list<const DenseMatrix*> params) {
  AdamConfig c;
  c.step_size = lr;
  const std::vector<const DenseMatrix*> list(params);
  return AdamState(c, list);
}

// Step sizes of the (link head, node head) for a task.
std::pair<double, double> head_rates(const TrainConfig& cfg) {
  return problem_of(cfg.task) == 1 ? std::pair{cfg.lr1, cfg.lr2}
                                   : std::pair{cfg.lr2, cfg.lr1};
}

void step_encoder(ModelState& s, const EncoderParams& grad) {
  std::array<DenseMatrix*, 2> params{&s.params.encoder.w0, &s.params.encoder.w1};
  std::array<DenseMatrix, 2> grads{grad.w0, grad.w1};
  adam_step(s.theta_opt, params, grads);
}

void step_link_head(ModelState& s, const DenseMatrix& grad) {
  std::array<DenseMatrix*, 1> params{&s.params.predictor.wb};
  adam_step(s.phi_opt, params, std::span<const DenseMatrix>(&grad, 1));
}

void step_node_head(ModelState& s, const DenseMatrix& grad) {
  std::array<DenseMatrix*, 1> params{&s.params.classifier.wc};
  adam_step(s.psi_opt, params, std::span<const DenseMatrix>(&grad, 1));
}

void check_finite(double value, Index round, const char* what) {
  if (!std::isfinite(value)) {
    throw DivergenceError(round, std::string(what) + " is " + std::to_string(value));
  }
}

double link_auc(const PredictorParams& phi, const DenseMatrix& z,
                std::span<const NodePair> pos, std::span<const NodePair> neg) {
  return auc(link_scores(phi, z, pos), link_scores(phi, z, neg));
}

double node_accuracy(const ClassifierParams& psi, const DenseMatrix& z,
                     std::span<const Index> nodes, std::span<const Index> labels) {
  const DenseMatrix logits = classify_logits(psi, z);
  std::vector<Index> truth;
  truth.reserve(nodes.size());
  for (Index u : nodes) truth.push_back(labels[u]);
  return accuracy(predict_labels(logits, nodes), truth);
}

double diagnostic(const ModelParams& params, const DenseMatrix& z,
                  const TrainingProblem& problem, Task task, Rng& rng) {
  if (problem_of(task) == 1) {
    return vclub_node_estimate(params.classifier, z, problem.node_split().train,
                               problem.graph().labels, rng);
  }
  return vclub_link_estimate(params.predictor, z, problem.train_pairs(), rng);
}

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kDiagnosticStream = 2;

}  // namespace

ModelState make_state(ModelParams params, const TrainConfig& cfg) {
  params.validate();
  const auto [link_lr, node_lr] = head_rates(cfg);
  ModelState s;
  s.theta_opt = make_opt(cfg.lr3, {&params.encoder.w0, &params.encoder.w1});
  s.phi_opt = make_opt(link_lr, {&params.predictor.wb});
  s.psi_opt = make_opt(node_lr, {&params.classifier.wc});
  s.params = std::move(params);
  return s;
}

ModelParams initial_params(const TrainConfig& cfg) {
  Rng rng(mix_seed(cfg.seed, kInitStream));
  return init_params(cfg.dims, rng);
}

TrainingProblem::TrainingProblem(const Graph& g, const NodeSplit& nodes,
                                 const LinkSplit& links)
    : graph_(&g),
      nodes_(&nodes),
      links_(&links),
      a_hat_(normalized_adjacency(g.num_nodes, links.train_pos)),
      train_pairs_(links.train()),
      val_pairs_(links.val()),
      test_pairs_(links.test()) {}

LossGradients compute_gradients(const ModelParams& params, const TrainingProblem& problem,
                                bool need_link, bool need_node) {
  Tape tape;
  const Var w0 = tape.parameter(params.encoder.w0);
  const Var w1 = tape.parameter(params.encoder.w1);
  const Var wb = tape.parameter(params.predictor.wb);
  const Var wc = tape.parameter(params.classifier.wc);
  const Var x = tape.constant(problem.graph().features);
  const Var z = encode(tape, w0, w1, problem.a_hat(), x);

  LossGradients out;
  if (need_link) {
    const Var loss = link_ce_loss(tape, wb, z, problem.train_pairs());
    const Gradients g = tape.backward(loss);
    out.link_loss = tape.scalar(loss);
    out.link_theta = {g.of(w0), g.of(w1)};
    out.link_wb = g.of(wb);
  }
  if (need_node) {
    const Var loss =
        node_ce_loss(tape, wc, z, problem.node_split().train, problem.graph().labels);
    const Gradients g = tape.backward(loss);
    out.node_loss = tape.scalar(loss);
    out.node_theta = {g.of(w0), g.of(w1)};
    out.node_wc = g.of(wc);
  }
  return out;
}

EncoderParams combine_encoder_gradients(const EncoderParams& primary,
                                        const EncoderParams& privacy, double lambda) {
  check_lambda(lambda);
  auto mix = [lambda](const DenseMatrix& a, const DenseMatrix& b) {
    if (lambda == 1.0) return a;
    DenseMatrix out(b.rows(), b.cols());
    auto dst = out.data();
    auto pb = b.data();
    if (lambda == 0.0) {
      for (Index i = 0; i < dst.size(); ++i) dst[i] = -pb[i];
      return out;
    }
    auto pa = a.data();
    for (Index i = 0; i < dst.size(); ++i) {
      dst[i] = lambda * pa[i] - (1.0 - lambda) * pb[i];
    }
    return out;
  };
  return {mix(primary.w0, privacy.w0), mix(primary.w1, privacy.w1)};
}

std::pair<double, double> validation_metrics(const ModelParams& params,
                                             const TrainingProblem& problem, Task task) {
  const auto ctx = problem.context();
  const DenseMatrix z = encode(params.encoder, ctx.a_hat, ctx.x);
  const LinkSplit& links = problem.link_split();
  const double link = link_auc(params.predictor, z, links.val_pos, links.val_neg);
  const double node = node_accuracy(params.classifier, z, problem.node_split().val,
                                    problem.graph().labels);
  return problem_of(task) == 1 ? std::pair{link, node} : std::pair{node, link};
}

namespace {

// The three-player alternating game shared by both problems.
TrainResult run_game(const TrainingProblem& problem, const TrainConfig& cfg,
                     ModelParams init) {
  cfg.validate();
  const bool link_primary = problem_of(cfg.task) == 1;
  ModelState state = make_state(std::move(init), cfg);
  Rng diag_rng(mix_seed(cfg.seed, kDiagnosticStream));

  TrainResult result;
  result.trace.rounds.reserve(cfg.rounds);
  double best = -1.0;
  for (Index t = 0; t < cfg.rounds; ++t) {
    RoundRecord rec;
    for (Index i = 0; i < cfg.inner_steps; ++i) {
      const LossGradients lg = compute_gradients(state.params, problem);
      check_finite(lg.link_loss, t, "link loss");
      check_finite(lg.node_loss, t, "node loss");
      if (i == 0) {
        rec.l1 = link_primary ? lg.link_loss : lg.node_loss;
        rec.l2 = link_primary ? lg.node_loss : lg.link_loss;
      }
      // Both heads descend their own cross-entropy; the privacy head is the
      // attacker fitting the protected target.
      step_link_head(state, lg.link_wb);
      step_node_head(state, lg.node_wc);
      const EncoderParams& primary = link_primary ? lg.link_theta : lg.node_theta;
      const EncoderParams& privacy = link_primary ? lg.node_theta : lg.link_theta;
      step_encoder(state, combine_encoder_gradients(primary, privacy, cfg.lambda));
    }
    const auto [val_primary, val_privacy] =
        validation_metrics(state.params, problem, cfg.task);
    rec.val_primary = val_primary;
    rec.val_privacy = val_privacy;
    const auto ctx = problem.context();
    const DenseMatrix z = encode(state.params.encoder, ctx.a_hat, ctx.x);
    rec.vclub = diagnostic(state.params, z, problem, cfg.task, diag_rng);
    result.trace.rounds.push_back(rec);
    if (val_primary > best) {
      best = val_primary;
      result.selected = state.params;
      result.selected_round = t;
    }
  }
  result.final_state = std::move(state);
  return result;
}

using AttackCallback = std::function<void(Index round, double loss, const ModelParams&,
                                          const DenseMatrix& z)>;

void fit_attacker_impl(ModelParams& params, AdamState& opt, const TrainingProblem& problem,
                       Task task, Index rounds, const AttackCallback& on_round) {
  const auto ctx = problem.context();
  const DenseMatrix z_frozen = encode(params.encoder, ctx.a_hat, ctx.x);
  const bool attack_nodes = problem_of(task) == 1;
  for (Index t = 0; t < rounds; ++t) {
    Tape tape;
    const Var z = tape.constant(z_frozen);
    double loss_value = 0.0;
    if (attack_nodes) {
      const Var wc = tape.parameter(params.classifier.wc);
      const Var loss =
          node_ce_loss(tape, wc, z, problem.node_split().train, problem.graph().labels);
      loss_value = tape.scalar(loss);
      check_finite(loss_value, t, "attacker node loss");
      const Gradients g = tape.backward(loss);
      std::array<DenseMatrix*, 1> p{&params.classifier.wc};
      adam_step(opt, p, std::span<const DenseMatrix>(&g.of(wc), 1));
    } else {
      const Var wb = tape.parameter(params.predictor.wb);
      const Var loss = link_ce_loss(tape, wb, z, problem.train_pairs());
      loss_value = tape.scalar(loss);
      check_finite(loss_value, t, "attacker link loss");
      const Gradients g = tape.backward(loss);
      std::array<DenseMatrix*, 1> p{&params.predictor.wb};
      adam_step(opt, p, std::span<const DenseMatrix>(&g.of(wb), 1));
    }
    if (on_round) on_round(t, loss_value, params, z_frozen);
  }
}

}  // namespace

std::vector<double> fit_attacker(ModelParams& params, AdamState& opt,
                                 const TrainingProblem& problem, Task task,
                                 Index rounds) {
  std::vector<double> losses;
  losses.reserve(rounds);
  fit_attacker_impl(params, opt, problem, task, rounds,
                    [&](Index, double loss, const ModelParams&, const DenseMatrix&) {
                      losses.push_back(loss);
                    });
  return losses;
}

TrainResult train_problem1(const TrainingProblem& problem, const TrainConfig& cfg,
                           ModelParams init) {
  if (cfg.task != Task::kProblem1) throw ConfigError("train_problem1: task is not problem1");
  return run_game(problem, cfg, std::move(init));
}

TrainResult train_problem1(const TrainingProblem& problem, const TrainConfig& cfg) {
  return train_problem1(problem, cfg, initial_params(cfg));
}

TrainResult train_problem2(const TrainingProblem& problem, const TrainConfig& cfg,
                           ModelParams init) {
  if (cfg.task != Task::kProblem2) throw ConfigError("train_problem2: task is not problem2");
  return run_game(problem, cfg, std::move(init));
}

TrainResult train_problem2(const TrainingProblem& problem, const TrainConfig& cfg) {
  return train_problem2(problem, cfg, initial_params(cfg));
}

TrainResult train_baseline(const TrainingProblem& problem, const TrainConfig& cfg,
                           ModelParams init) {
  if (!is_baseline(cfg.task)) throw ConfigError("train_baseline: task is not a baseline");
  cfg.validate();
  const bool link_primary = problem_of(cfg.task) == 1;
  ModelState state = make_state(std::move(init), cfg);

  TrainResult result;
  result.trace.rounds.resize(cfg.rounds);
  double best = -1.0;
  // Phase 1: encoder and primary head only.
  for (Index t = 0; t < cfg.rounds; ++t) {
    RoundRecord& rec = result.trace.rounds[t];
    for (Index i = 0; i < cfg.inner_steps; ++i) {
      const LossGradients lg =
          compute_gradients(state.params, problem, link_primary, !link_primary);
      const double loss = link_primary ? lg.link_loss : lg.node_loss;
      check_finite(loss, t, "primary loss");
      if (i == 0) rec.l1 = loss;
      if (link_primary) {
        step_link_head(state, lg.link_wb);
        step_encoder(state, lg.link_theta);
      } else {
        step_node_head(state, lg.node_wc);
        step_encoder(state, lg.node_theta);
      }
    }
    rec.val_primary = validation_metrics(state.params, problem, cfg.task).first;
    if (rec.val_primary > best) {
      best = rec.val_primary;
      result.selected = state.params;
      result.selected_round = t;
    }
  }

  // Phase 2: attacker on the frozen representation of the selected encoder.
  // The selected snapshot still carries the untouched initial attacker head.
  AdamState attack_opt = link_primary ? state.psi_opt : state.phi_opt;
  Rng diag_rng(mix_seed(cfg.seed, kDiagnosticStream));
  fit_attacker_impl(
      result.selected, attack_opt, problem, cfg.task, cfg.rounds,
      [&](Index t, double loss, const ModelParams& params, const DenseMatrix& z) {
        RoundRecord& rec = result.trace.rounds[t];
        rec.l2 = loss;
        const LinkSplit& links = problem.link_split();
        rec.val_privacy =
            link_primary ? node_accuracy(params.classifier, z, problem.node_split().val,
                                         problem.graph().labels)
                         : link_auc(params.predictor, z, links.val_pos, links.val_neg);
        rec.vclub = diagnostic(params, z, problem, cfg.task, diag_rng);
      });
  if (link_primary) {
    state.params.classifier = result.selected.classifier;
    state.psi_opt = attack_opt;
  } else {
    state.params.predictor = result.selected.predictor;
    state.phi_opt = attack_opt;
  }
  result.final_state = std::move(state);
  return result;
}

TrainResult train_baseline(const TrainingProblem& problem, const TrainConfig& cfg) {
  return train_baseline(problem, cfg, initial_params(cfg));
}

TrainResult train(const TrainingProblem& problem, const TrainConfig& cfg) {
  switch (cfg.task) {
    case Task::kProblem1: return train_problem1(problem, cfg);
    case Task::kProblem2: return train_problem2(problem, cfg);
    case Task::kBaselineLink:
    case Task::kBaselineNode: return train_baseline(problem, cfg);
  }
  throw ConfigError("unknown task");
}

Index select_model(const TrainTrace& trace) {
  if (trace.rounds.empty()) throw ContractError("select_model: empty trace");
  Index best = 0;
  for (Index t = 1; t < trace.rounds.size(); ++t) {
    // Minimal error 1 - metric, i.e. maximal metric; strict keeps the earliest.
    if (trace.rounds[t].val_primary > trace.rounds[best].val_primary) best = t;
  }
  return best;
}

}  // namespace privgraph
