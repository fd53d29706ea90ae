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

#include "privgraph/objectives.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "privgraph/errors.hpp"

namespace privgraph {

namespace {

LabeledPairs sorted_pairs(const LabeledPairs& in) {
  std::vector<Index> order(in.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (in.pairs[a] != in.pairs[b]) return in.pairs[a] < in.pairs[b];
    return in.targets[a] < in.targets[b];
  });
  LabeledPairs out;
  out.pairs.reserve(in.size());
  out.targets.reserve(in.size());
  for (Index k : order) {
    out.pairs.push_back(in.pairs[k]);
    out.targets.push_back(in.targets[k]);
  }
  return out;
}

void check_pairs(const LabeledPairs& pairs) {
  if (pairs.pairs.empty()) throw ContractError("link loss: empty pair set");
  if (pairs.pairs.size() != pairs.targets.size()) {
    throw ShapeError("link loss: pairs and targets differ in length");
  }
}

void check_nodes(std::span<const Index> nodes, std::span<const Index> labels) {
  if (nodes.empty()) throw ContractError("node loss: empty labeled node set");
  for (Index u : nodes) {
    if (u >= labels.size()) {
      throw IndexError("node loss: node " + std::to_string(u) + " has no label");
    }
  }
}

}  // namespace

Var link_ce_loss(Tape& tape, Var wb, Var z, const LabeledPairs& pairs) {
  check_pairs(pairs);
  const LabeledPairs sorted = sorted_pairs(pairs);
  const Var scores = link_scores(tape, wb, z, sorted.pairs);
  return tape.bce_with_logits(scores, sorted.targets);
}

Var node_ce_loss(Tape& tape, Var wc, Var z, std::span<const Index> nodes,
                 std::span<const Index> labels) {
  check_nodes(nodes, labels);
  std::vector<Index> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Index> y;
  y.reserve(sorted.size());
  for (Index u : sorted) y.push_back(labels[u]);
  const Var logits = tape.matmul(tape.gather_rows(z, sorted), wc);
  return tape.softmax_ce(logits, y);
}

double link_ce_loss(const PredictorParams& phi, const EncoderParams& theta,
                    const GraphContext& ctx, const LabeledPairs& pairs) {
  check_pairs(pairs);
  const LabeledPairs sorted = sorted_pairs(pairs);
  const DenseMatrix z = encode(theta, ctx.a_hat, ctx.x);
  const std::vector<double> scores = link_scores(phi, z, sorted.pairs);
  return bce_with_logits_loss(scores, sorted.targets);
}

double node_ce_loss(const ClassifierParams& psi, const EncoderParams& theta,
                    const GraphContext& ctx, std::span<const Index> nodes,
                    std::span<const Index> labels) {
  check_nodes(nodes, labels);
  std::vector<Index> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  const DenseMatrix z = encode(theta, ctx.a_hat, ctx.x);
  DenseMatrix rows(sorted.size(), z.cols());
  std::vector<Index> y;
  y.reserve(sorted.size());
  for (Index i = 0; i < sorted.size(); ++i) {
    std::copy_n(z.row(sorted[i]).begin(), z.cols(), rows.row(i).begin());
    y.push_back(labels[sorted[i]]);
  }
  return softmax_ce_loss(classify_logits(psi, rows), y);
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw RangeError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
}

double problem1_encoder_objective(double link_loss, double node_loss, double lambda) {
  check_lambda(lambda);
  return lambda * link_loss - (1.0 - lambda) * node_loss;
}

double problem2_encoder_objective(double node_loss, double link_loss, double lambda) {
  check_lambda(lambda);
  return lambda * node_loss - (1.0 - lambda) * link_loss;
}

LossReport make_report(double primary_loss, double privacy_loss, double lambda) {
  check_lambda(lambda);
  return LossReport{primary_loss, privacy_loss,
                    lambda * primary_loss - (1.0 - lambda) * privacy_loss, lambda};
}

namespace {

void check_permutation(std::span<const Index> permutation, Index n) {
  if (permutation.size() != n) {
    throw ShapeError("vclub: permutation of length " + std::to_string(permutation.size()) +
                     " for " + std::to_string(n) + " samples");
  }
  std::vector<bool> seen(n, false);
  for (Index p : permutation) {
    if (p >= n || seen[p]) throw ContractError("vclub: not a permutation");
    seen[p] = true;
  }
}

}  // namespace

double vclub_node_estimate(const ClassifierParams& psi, const DenseMatrix& z,
                           std::span<const Index> nodes, std::span<const Index> labels,
                           std::span<const Index> permutation) {
  check_nodes(nodes, labels);
  check_permutation(permutation, nodes.size());
  const DenseMatrix lsm = log_softmax_rows(classify_logits(psi, z));
  double joint = 0.0;
  double marginal = 0.0;
  for (Index i = 0; i < nodes.size(); ++i) {
    joint += lsm(nodes[i], labels[nodes[i]]);
    marginal += lsm(nodes[i], labels[nodes[permutation[i]]]);
  }
  const double n = static_cast<double>(nodes.size());
  return joint / n - marginal / n;
}

double vclub_node_estimate(const ClassifierParams& psi, const DenseMatrix& z,
                           std::span<const Index> nodes, std::span<const Index> labels,
                           Rng& rng) {
  const std::vector<Index> perm = rng.permutation(nodes.size());
  return vclub_node_estimate(psi, z, nodes, labels, perm);
}

double vclub_link_estimate(const PredictorParams& phi, const DenseMatrix& z,
                           const LabeledPairs& pairs, std::span<const Index> permutation) {
  check_pairs(pairs);
  check_permutation(permutation, pairs.size());
  const std::vector<double> scores = link_scores(phi, z, pairs.pairs);
  auto log_lik = [](double s, double t) { return t == 1.0 ? -log1pexp(-s) : -log1pexp(s); };
  double joint = 0.0;
  double marginal = 0.0;
  for (Index k = 0; k < scores.size(); ++k) {
    joint += log_lik(scores[k], pairs.targets[k]);
    marginal += log_lik(scores[k], pairs.targets[permutation[k]]);
  }
  const double n = static_cast<double>(scores.size());
  return joint / n - marginal / n;
}

double vclub_link_estimate(const PredictorParams& phi, const DenseMatrix& z,
                           const LabeledPairs& pairs, Rng& rng) {
  const std::vector<Index> perm = rng.permutation(pairs.size());
  return vclub_link_estimate(phi, z, pairs, perm);
}

}  // namespace privgraph
