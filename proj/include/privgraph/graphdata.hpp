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

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "privgraph/numkit.hpp"

namespace privgraph {

// Undirected, simple, attributed graph with one class label per node.
// Edges are stored canonically (u < v), sorted and unique.
struct Graph {
  Index num_nodes = 0;
  std::vector<NodePair> edges;
  DenseMatrix features;  // num_nodes x D
  std::vector<Index> labels;
  Index num_classes = 0;

  Index feature_dim() const { return features.cols(); }
};

// Symmetrizes and deduplicates `edges`, drops self-loops, validates the rest.
Graph make_graph(Index num_nodes, std::vector<NodePair> edges, DenseMatrix features,
                 std::vector<Index> labels, Index num_classes);

// Reads edges.tsv / features.csv / labels.csv from `dir`.
Graph load_graph(const std::filesystem::path& dir);
// Writes the three files; features use 17 significant digits.
void save_graph(const Graph& g, const std::filesystem::path& dir);

// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
SparseMatrix normalized_adjacency(Index num_nodes, std::span<const NodePair> edges);
SparseMatrix normalized_adjacency(const Graph& g);

struct NodeSplit {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;
};

// Stratified training set of `per_class` nodes per class, then `n_val` and
// `n_test` drawn uniformly from what is left.
NodeSplit split_nodes(const Graph& g, Index per_class, Index n_val, Index n_test,
                      Rng& rng);

// Pairs with 0/1 link targets, positives first.
struct LabeledPairs {
  std::vector<NodePair> pairs;
  std::vector<double> targets;

  Index size() const { return pairs.size(); }
};

struct LinkSplit {
  std::vector<NodePair> train_pos;
  std::vector<NodePair> train_neg;
  std::vector<NodePair> val_pos;
  std::vector<NodePair> val_neg;
  std::vector<NodePair> test_pos;
  std::vector<NodePair> test_neg;

  LabeledPairs train() const;
  LabeledPairs val() const;
  LabeledPairs test() const;
};

// Positives split floor(train_frac*E) / floor(val_frac*E) / remainder; each
// positive set gets an equally sized, mutually disjoint set of non-edges.
LinkSplit split_links(const Graph& g, double train_frac, double val_frac, Rng& rng);

struct SbmSpec {
  Index blocks = 2;
  Index nodes_per_block = 50;
  double p_in = 0.3;
  double p_out = 0.02;
  double noise = 0.5;
};

// Labels are block indices; features are the one-hot block indicator plus
// uniform noise in [0, noise).
Graph gen_sbm(const SbmSpec& spec, Rng& rng);

}  // namespace privgraph
