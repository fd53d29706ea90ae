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

// Loss terms of the adversarial game.
//
// Both task losses are mean cross-entropies, i.e. negated empirical
// conditional log-likelihoods. The primary head minimizes its loss (tightening
// a variational lower bound on the mutual information it needs), the
// adversary head also minimizes its own loss (it is the variational posterior
// of a contrastive log-ratio upper bound), and the encoder minimizes
//
//   lambda * L_primary - (1 - lambda) * L_privacy.
//
// The vCLUB estimators are monitoring diagnostics and are never differentiated.

#pragma once

#include <span>
#include <vector>

#include "privgraph/graphdata.hpp"
#include "privgraph/models.hpp"
#include "privgraph/numkit.hpp"

namespace privgraph {

// What the encoder sees: normalized adjacency and node features.
struct GraphContext {
  const SparseMatrix& a_hat;
  const DenseMatrix& x;
};

struct LossReport {
  double primary_loss = 0.0;
  double privacy_loss = 0.0;
  double combined = 0.0;
  double lambda = 0.5;
};

// Tape forms. Inputs are summed in sorted order, so any reordering of the
// pair or node set gives a bitwise-identical loss.
Var link_ce_loss(Tape& tape, Var wb, Var z, const LabeledPairs& pairs);
Var node_ce_loss(Tape& tape, Var wc, Var z, std::span<const Index> nodes,
                 std::span<const Index> labels);

// Eager forms running the full encoder.
double link_ce_loss(const PredictorParams& phi, const EncoderParams& theta,
                    const GraphContext& ctx, const LabeledPairs& pairs);
double node_ce_loss(const ClassifierParams& psi, const EncoderParams& theta,
                    const GraphContext& ctx, std::span<const Index> nodes,
                    std::span<const Index> labels);

// lambda * L_link - (1 - lambda) * L_node.
double problem1_encoder_objective(double link_loss, double node_loss, double lambda);
// lambda * L_node - (1 - lambda) * L_link.
double problem2_encoder_objective(double node_loss, double link_loss, double lambda);

// Throws RangeError unless 0 <= lambda <= 1.
void check_lambda(double lambda);

LossReport make_report(double primary_loss, double privacy_loss, double lambda);

// Mean log q(y_i | z_i) minus mean log q(y_perm(i) | z_i). `labels` is indexed
// by node id; `nodes` selects the sample.
double vclub_node_estimate(const ClassifierParams& psi, const DenseMatrix& z,
                           std::span<const Index> nodes, std::span<const Index> labels,
                           std::span<const Index> permutation);
// Draws one uniform permutation of the sample from `rng`.
double vclub_node_estimate(const ClassifierParams& psi, const DenseMatrix& z,
                           std::span<const Index> nodes, std::span<const Index> labels,
                           Rng& rng);

// Same structure on link targets, log q(t | u, v) = -bce(score, t).
double vclub_link_estimate(const PredictorParams& phi, const DenseMatrix& z,
                           const LabeledPairs& pairs, std::span<const Index> permutation);
double vclub_link_estimate(const PredictorParams& phi, const DenseMatrix& z,
                           const LabeledPairs& pairs, Rng& rng);

}  // namespace privgraph
