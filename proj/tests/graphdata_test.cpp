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
#include <set>
#include <vector>

#include "privgraph/errors.hpp"
#include "privgraph/graphdata.hpp"
#include "test_util.hpp"

namespace privgraph {
namespace {

using testing::TempDir;

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

// Two-node dataset with the given edge lines.
void write_tiny(const std::filesystem::path& dir, const std::string& edges) {
  write_file(dir / "labels.csv", "2,2\n0\n1\n");
  write_file(dir / "features.csv", "2,3\n1,0,0.5\n0,1,0.25\n");
  write_file(dir / "edges.tsv", edges);
}

Graph path_graph(Index n) {
  std::vector<NodePair> edges;
  for (Index u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
  std::vector<Index> labels(n);
  for (Index u = 0; u < n; ++u) labels[u] = u % 2;
  return make_graph(n, edges, DenseMatrix(n, 1, 1.0), labels, 2);
}

TEST_CASE("load_graph reads and deduplicates") {
  TempDir dir;
  write_tiny(dir.path(), "0\t1\n");
  const Graph g = load_graph(dir.path());
  CHECK(g.num_nodes == 2);
  CHECK(g.num_classes == 2);
  CHECK(g.edges == std::vector<NodePair>{{0, 1}});
  CHECK(g.features(1, 2) == 0.25);

  write_tiny(dir.path(), "0\t1\n1\t0\n# comment\n\n1 1\n");
  const Graph dedup = load_graph(dir.path());
  CHECK(dedup.edges == std::vector<NodePair>{{0, 1}});
}

TEST_CASE("load_graph errors") {
  TempDir dir;
  CHECK_THROWS_AS(load_graph(dir.path()), NotFoundError);
  write_tiny(dir.path(), "0\t5\n");
  CHECK_THROWS_AS(load_graph(dir.path()), RangeError);
  write_tiny(dir.path(), "0\t1\nzero\tone\n");
  try {
    load_graph(dir.path());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  write_tiny(dir.path(), "0\t1\n");
  write_file(dir.path() / "labels.csv", "2,2\n0\n7\n");
  CHECK_THROWS_AS(load_graph(dir.path()), RangeError);
  write_file(dir.path() / "labels.csv", "2,2\n0\n1\n");
  write_file(dir.path() / "features.csv", "2,3\n1,0\n0,1,0\n");
  CHECK_THROWS_AS(load_graph(dir.path()), ParseError);
}

TEST_CASE("save_graph round trip") {
  Rng rng(1);
  const Graph g = gen_sbm(SbmSpec{}, rng);
  TempDir dir;
  save_graph(g, dir.path());
  const Graph back = load_graph(dir.path());
  CHECK(back.num_nodes == g.num_nodes);
  CHECK(back.edges == g.edges);
  CHECK(back.labels == g.labels);
  CHECK(back.num_classes == g.num_classes);
  CHECK(back.features == g.features);
}

TEST_CASE("normalized_adjacency") {
  CHECK(normalized_adjacency(1, {}).densify() == DenseMatrix{{1.0}});
  const DenseMatrix two = normalized_adjacency(2, std::vector<NodePair>{{0, 1}}).densify();
  CHECK(two == DenseMatrix(2, 2, 0.5));

  Rng rng(2);
  const Index n = 20;
  std::vector<NodePair> edges;
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      if (rng.bernoulli(0.2)) edges.push_back({u, v});
    }
  }
  const DenseMatrix a = normalized_adjacency(n, edges).densify();
  DenseMatrix tilde = DenseMatrix::identity(n);
  for (const auto& e : edges) tilde(e.u, e.v) = tilde(e.v, e.u) = 1.0;
  std::vector<double> deg(n, 0.0);
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) deg[u] += tilde(u, v);
  }
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      CHECK(std::abs(a(u, v) - a(v, u)) <= 1e-12);
      CHECK(std::abs(a(u, v) - tilde(u, v) / std::sqrt(deg[u] * deg[v])) <= 1e-12);
    }
  }
}

TEST_CASE("split_nodes") {
  // Seven classes, 400 nodes each.
  const Index n = 2800;
  std::vector<Index> labels(n);
  for (Index u = 0; u < n; ++u) labels[u] = u % 7;
  const Graph g = make_graph(n, {}, DenseMatrix(n, 1), labels, 7);
  Rng a(3), b(3);
  const NodeSplit s = split_nodes(g, 20, 500, 1000, a);
  CHECK(s.train.size() == 140);
  CHECK(s.val.size() == 500);
  CHECK(s.test.size() == 1000);
  std::vector<Index> per_class(7, 0);
  for (Index u : s.train) ++per_class[labels[u]];
  for (Index c : per_class) CHECK(c == 20);
  std::set<Index> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 1640);
  CHECK(*all.rbegin() < n);

  const NodeSplit again = split_nodes(g, 20, 500, 1000, b);
  CHECK(again.train == s.train);
  CHECK(again.val == s.val);
  CHECK(again.test == s.test);

  Rng c(4);
  CHECK(split_nodes(g, 0, 10, 10, c).train.empty());
  CHECK_THROWS_AS(split_nodes(g, 500, 0, 0, c), CapacityError);
  CHECK_THROWS_AS(split_nodes(g, 20, 2000, 1000, c), CapacityError);
}

TEST_CASE("split_links sizes and disjointness") {
  // 5429 edges on 2708 nodes, the size of the usual citation export.
  const Index n = 2708;
  Rng gen(5);
  std::set<NodePair> edge_set;
  while (edge_set.size() < 5429) {
    const Index u = gen.uniform_index(n), v = gen.uniform_index(n);
    if (u != v) edge_set.insert({std::min(u, v), std::max(u, v)});
  }
  const Graph g = make_graph(n, {edge_set.begin(), edge_set.end()}, DenseMatrix(n, 1),
                             std::vector<Index>(n, 0), 2);
  Rng a(6), b(6);
  const LinkSplit s = split_links(g, 0.85, 0.05, a);
  CHECK(s.train_pos.size() == 4614);
  CHECK(s.val_pos.size() == 271);
  CHECK(s.test_pos.size() == 544);
  CHECK(s.train_neg.size() == 4614);
  CHECK(s.val_neg.size() == 271);
  CHECK(s.test_neg.size() == 544);

  std::set<NodePair> pos;
  for (const auto* part : {&s.train_pos, &s.val_pos, &s.test_pos}) {
    for (const auto& p : *part) {
      CHECK(edge_set.contains(p));
      pos.insert(p);
    }
  }
  CHECK(pos.size() == 5429);
  std::set<NodePair> neg;
  for (const auto* part : {&s.train_neg, &s.val_neg, &s.test_neg}) {
    for (const auto& p : *part) {
      CHECK(p.u < p.v);
      CHECK(!edge_set.contains(p));
      neg.insert(p);
    }
  }
  CHECK(neg.size() == 5429);

  const LinkSplit again = split_links(g, 0.85, 0.05, b);
  CHECK(again.train_pos == s.train_pos);
  CHECK(again.test_neg == s.test_neg);

  const LabeledPairs train = s.train();
  CHECK(train.size() == 2 * 4614);
  CHECK(train.targets.front() == 1.0);
  CHECK(train.targets.back() == 0.0);
}

TEST_CASE("split_links capacity") {
  std::vector<NodePair> k4;
  for (Index u = 0; u < 4; ++u) {
    for (Index v = u + 1; v < 4; ++v) k4.push_back({u, v});
  }
  const Graph complete = make_graph(4, k4, DenseMatrix(4, 1), {0, 1, 0, 1}, 2);
  Rng rng(7);
  CHECK_THROWS_AS(split_links(complete, 0.85, 0.05, rng), CapacityError);
  // Dense but feasible: 11 non-edges for 10 edges.
  std::vector<NodePair> dense{{0, 2}, {1, 3}, {2, 4}, {3, 5}};
  for (Index u = 0; u + 1 < 7; ++u) dense.push_back({u, u + 1});
  const Graph tight = make_graph(7, dense, DenseMatrix(7, 1), std::vector<Index>(7, 0), 2);
  const LinkSplit t = split_links(tight, 0.5, 0.2, rng);
  CHECK(t.train_neg.size() + t.val_neg.size() + t.test_neg.size() == 10);
  std::set<NodePair> tight_neg(t.train_neg.begin(), t.train_neg.end());
  tight_neg.insert(t.val_neg.begin(), t.val_neg.end());
  tight_neg.insert(t.test_neg.begin(), t.test_neg.end());
  CHECK(tight_neg.size() == 10);

  const Graph path = path_graph(12);
  const LinkSplit s = split_links(path, 0.85, 0.05, rng);
  CHECK(s.train_pos.size() == 9);
  CHECK(s.val_pos.size() == 0);
  CHECK(s.test_pos.size() == 2);
  CHECK_THROWS_AS(split_links(path, 0.9, 0.2, rng), RangeError);
}

TEST_CASE("gen_sbm limits") {
  Rng rng(8);
  SbmSpec tri;
  tri.blocks = 2;
  tri.nodes_per_block = 3;
  tri.p_in = 1.0;
  tri.p_out = 0.0;
  const Graph g = gen_sbm(tri, rng);
  CHECK(g.edges == std::vector<NodePair>{{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
  CHECK(g.labels == std::vector<Index>{0, 0, 0, 1, 1, 1});
  CHECK(g.num_classes == 2);
  CHECK(g.feature_dim() == 2);
  for (Index u = 0; u < 6; ++u) {
    CHECK(g.features(u, g.labels[u]) >= 1.0);
    CHECK(g.features(u, g.labels[u]) < 1.0 + tri.noise);
  }

  SbmSpec empty = tri;
  empty.p_in = 0.0;
  CHECK(gen_sbm(empty, rng).edges.empty());

  SbmSpec bad = tri;
  bad.p_out = 0.5;
  bad.p_in = 0.2;
  CHECK_THROWS_AS(gen_sbm(bad, rng), RangeError);
}

TEST_CASE("gen_sbm intra-block edge count") {
  SbmSpec spec;
  spec.blocks = 2;
  spec.nodes_per_block = 100;
  spec.p_in = 0.1;
  spec.p_out = 0.01;
  Rng rng(9);
  const Graph g = gen_sbm(spec, rng);
  Index intra = 0, inter = 0;
  for (const auto& e : g.edges) (g.labels[e.u] == g.labels[e.v] ? intra : inter)++;
  const double trials_in = 2.0 * 4950.0;
  CHECK(std::abs(intra - 990.0) <= 5.0 * std::sqrt(trials_in * 0.1 * 0.9));
  const double trials_out = 100.0 * 100.0;
  CHECK(std::abs(inter - 100.0) <= 5.0 * std::sqrt(trials_out * 0.01 * 0.99));
}

TEST_CASE("make_graph validation") {
  CHECK_THROWS_AS(make_graph(2, {{0, 2}}, DenseMatrix(2, 1), {0, 1}, 2), RangeError);
  CHECK_THROWS_AS(make_graph(2, {}, DenseMatrix(2, 1), {0, 2}, 2), RangeError);
  CHECK_THROWS_AS(make_graph(2, {}, DenseMatrix(3, 1), {0, 1}, 2), ShapeError);
  CHECK_THROWS_AS(make_graph(2, {}, DenseMatrix(2, 1), {0, 0}, 1), RangeError);
}

}  // namespace
}  // namespace privgraph
