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
#include <vector>

#include "privgraph/errors.hpp"
#include "privgraph/graphdata.hpp"
#include "privgraph/models.hpp"
#include "privgraph/objectives.hpp"
#include "test_util.hpp"

namespace privgraph {
namespace {

using testing::random_matrix;

struct Fixture {
  Graph g;
  SparseMatrix a_hat;
  EncoderParams theta;
  LabeledPairs pairs;
  std::vector<Index> nodes{0, 1, 2, 3, 4, 5};

  explicit Fixture(std::uint64_t seed) {
    Rng rng(seed);
    SbmSpec spec;
    spec.blocks = 3;
    spec.nodes_per_block = 4;
    spec.p_in = 0.8;
    spec.p_out = 0.1;
    g = gen_sbm(spec, rng);
    a_hat = normalized_adjacency(g);
    theta = {random_matrix(rng, 3, 5), random_matrix(rng, 5, 3)};
    for (int k = 0; k < 8; ++k) {
      pairs.pairs.push_back({rng.uniform_index(12), rng.uniform_index(12)});
      pairs.targets.push_back(k < 4 ? 1.0 : 0.0);
    }
  }
  GraphContext ctx() const { return {a_hat, g.features}; }
};

TEST_CASE("link_ce_loss") {
  const Fixture f(1);
  CHECK(link_ce_loss({DenseMatrix(3, 3)}, f.theta, f.ctx(), f.pairs) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));

  Rng rng(2);
  const PredictorParams phi{random_matrix(rng, 3, 3)};
  const DenseMatrix z = encode(f.theta, f.a_hat, f.g.features);
  double oracle = 0.0;
  for (Index k = 0; k < f.pairs.size(); ++k) {
    const double s = link_score(phi, z, f.pairs.pairs[k].u, f.pairs.pairs[k].v);
    const double t = f.pairs.targets[k];
    oracle += bce_with_logits_loss(std::vector<double>{s}, std::vector<double>{t});
  }
  CHECK(std::abs(link_ce_loss(phi, f.theta, f.ctx(), f.pairs) - oracle / 8.0) <= 1e-12);

  // Tape and eager forms agree, and reordering changes nothing.
  Tape tape;
  const Var loss = link_ce_loss(tape, tape.constant(phi.wb), tape.constant(z), f.pairs);
  CHECK(tape.scalar(loss) == link_ce_loss(phi, f.theta, f.ctx(), f.pairs));
  LabeledPairs reversed;
  for (Index k = f.pairs.size(); k-- > 0;) {
    reversed.pairs.push_back(f.pairs.pairs[k]);
    reversed.targets.push_back(f.pairs.targets[k]);
  }
  CHECK(link_ce_loss(phi, f.theta, f.ctx(), reversed) ==
        link_ce_loss(phi, f.theta, f.ctx(), f.pairs));

  // Perfectly separated scores: z one-hot and Wb = 50 (2I - 1), so a node
  // scores +50 with itself and -50 with any other node.
  const DenseMatrix onehot = DenseMatrix::identity(3);
  DenseMatrix big(3, 3, -50.0);
  for (Index i = 0; i < 3; ++i) big(i, i) = 50.0;
  LabeledPairs separated{{{0, 0}, {1, 1}, {0, 1}, {1, 2}}, {1.0, 1.0, 0.0, 0.0}};
  Tape t2;
  const Var sep = link_ce_loss(t2, t2.constant(big), t2.constant(onehot), separated);
  CHECK(t2.scalar(sep) <= 1e-20);
  CHECK(t2.scalar(sep) >= 0.0);

  CHECK_THROWS_AS(link_ce_loss(phi, f.theta, f.ctx(), LabeledPairs{}), ContractError);
}

TEST_CASE("node_ce_loss") {
  const Fixture f(3);
  CHECK(node_ce_loss({DenseMatrix(3, 7)}, f.theta, f.ctx(), f.nodes,
                     std::vector<Index>(12, 4)) ==
        doctest::Approx(std::log(7.0)).epsilon(1e-14));

  Rng rng(4);
  const ClassifierParams psi{random_matrix(rng, 3, 3)};
  const DenseMatrix logits = classify_logits(psi, encode(f.theta, f.a_hat, f.g.features));
  double oracle = 0.0;
  for (Index u : f.nodes) {
    double norm = 0.0;
    for (Index c = 0; c < 3; ++c) norm += std::exp(logits(u, c));
    oracle -= std::log(std::exp(logits(u, f.g.labels[u])) / norm);
  }
  CHECK(std::abs(node_ce_loss(psi, f.theta, f.ctx(), f.nodes, f.g.labels) - oracle / 6.0) <=
        1e-12);
  const std::vector<Index> shuffled{5, 2, 0, 4, 1, 3};
  CHECK(node_ce_loss(psi, f.theta, f.ctx(), shuffled, f.g.labels) ==
        node_ce_loss(psi, f.theta, f.ctx(), f.nodes, f.g.labels));

  const DenseMatrix z{{100.0, 0.0}};
  Tape tape;
  const Var loss =
      node_ce_loss(tape, tape.constant(DenseMatrix::identity(2)), tape.constant(z),
                   std::vector<Index>{0}, std::vector<Index>{0});
  CHECK(tape.scalar(loss) <= 1e-40);

  CHECK_THROWS_AS(node_ce_loss(psi, f.theta, f.ctx(), {}, f.g.labels), ContractError);
}

TEST_CASE("encoder objectives") {
  CHECK(problem1_encoder_objective(1.2, 0.8, 1.0) == 1.2);
  CHECK(problem1_encoder_objective(1.2, 0.8, 0.0) == -0.8);
  CHECK(std::abs(problem1_encoder_objective(1.2, 0.8, 0.5) - 0.2) <= 1e-15);
  CHECK(problem2_encoder_objective(2.0, 1.0, 1.0) == 2.0);
  CHECK(problem2_encoder_objective(2.0, 1.0, 0.0) == -1.0);
  CHECK(problem2_encoder_objective(2.0, 1.0, 0.25) == -0.25);
  CHECK_THROWS_AS(problem1_encoder_objective(1.0, 1.0, 1.5), RangeError);
  CHECK_THROWS_AS(problem2_encoder_objective(1.0, 1.0, -0.1), RangeError);

  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
    const double f0 = problem1_encoder_objective(a, b, 0.0);
    const double fh = problem1_encoder_objective(a, b, 0.5);
    const double f1 = problem1_encoder_objective(a, b, 1.0);
    CHECK(std::abs(fh - 0.5 * (f0 + f1)) <= 1e-12);
    const double g0 = problem2_encoder_objective(a, b, 0.0);
    const double gh = problem2_encoder_objective(a, b, 0.5);
    const double g1 = problem2_encoder_objective(a, b, 1.0);
    CHECK(std::abs(gh - 0.5 * (g0 + g1)) <= 1e-12);
    const double lambda = rng.uniform_double();
    const LossReport r = make_report(a, b, lambda);
    CHECK(std::abs(r.combined - (lambda * a - (1.0 - lambda) * b)) <= 1e-12);
  }
}

TEST_CASE("vclub_node_estimate") {
  Rng rng(6);
  const Index n = 2000, classes = 4;
  std::vector<Index> nodes(n), labels(n);
  for (Index u = 0; u < n; ++u) {
    nodes[u] = u;
    labels[u] = rng.uniform_index(classes);
  }
  const DenseMatrix z = random_matrix(rng, n, 8);
  const ClassifierParams psi = testing::fit_classifier(z, nodes, labels, classes, 200);
  std::vector<Index> identity(n);
  for (Index i = 0; i < n; ++i) identity[i] = i;
  CHECK(vclub_node_estimate(psi, z, nodes, labels, identity) == 0.0);

  double mean = 0.0;
  for (int s = 0; s < 10; ++s) mean += vclub_node_estimate(psi, z, nodes, labels, rng);
  CHECK(std::abs(mean / 10.0) <= 0.05);

  // Representation that is the label itself.
  DenseMatrix onehot(n, classes);
  for (Index u = 0; u < n; ++u) onehot(u, labels[u]) = 1.0;
  const ClassifierParams fitted = testing::fit_classifier(onehot, nodes, labels, classes, 200);
  CHECK(vclub_node_estimate(fitted, onehot, nodes, labels, rng) > 0.5);

  const std::vector<Index> bad{0, 0};
  CHECK_THROWS(vclub_node_estimate(psi, z, std::vector<Index>{0, 1}, labels, bad));
}

TEST_CASE("vclub_link_estimate") {
  // Two groups; pairs inside a group are links.
  Rng rng(7);
  const Index n = 40;
  DenseMatrix onehot(n, 2);
  for (Index u = 0; u < n; ++u) onehot(u, u % 2) = 1.0;
  LabeledPairs pairs;
  for (int k = 0; k < 400; ++k) {
    const Index u = rng.uniform_index(n), v = rng.uniform_index(n);
    pairs.pairs.push_back({u, v});
    pairs.targets.push_back(u % 2 == v % 2 ? 1.0 : 0.0);
  }
  const PredictorParams phi = testing::fit_predictor(onehot, pairs, 300);
  std::vector<Index> identity(pairs.size());
  for (Index i = 0; i < identity.size(); ++i) identity[i] = i;
  CHECK(vclub_link_estimate(phi, onehot, pairs, identity) == 0.0);
  CHECK(vclub_link_estimate(phi, onehot, pairs, rng) > 0.5);

  // Targets shuffled before fitting carry no information about Z.
  LabeledPairs shuffled = pairs;
  rng.shuffle(shuffled.targets);
  const DenseMatrix z = random_matrix(rng, n, 4);
  const PredictorParams noise = testing::fit_predictor(z, shuffled, 200);
  double mean = 0.0;
  for (int s = 0; s < 10; ++s) mean += vclub_link_estimate(noise, z, shuffled, rng);
  CHECK(std::abs(mean / 10.0) <= 0.05);
}

}  // namespace
}  // namespace privgraph
