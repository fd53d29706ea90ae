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

#include "privgraph/graphdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "privgraph/errors.hpp"

namespace privgraph {

namespace fs = std::filesystem;

namespace {

std::uint64_t pair_key(NodePair p, Index n) {
  return static_cast<std::uint64_t>(p.u) * n + p.v;
}

NodePair canonical(Index a, Index b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    if (s.front() == '+') s.remove_prefix(1);
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path.string());
  return in;
}

// Reads an "N,K" header line.
std::pair<Index, Index> read_header(std::ifstream& in, const fs::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header");
  const auto fields = split(trim(line), ',');
  Index a = 0;
  Index b = 0;
  if (fields.size() != 2 || !parse_number(fields[0], a) || !parse_number(fields[1], b)) {
    throw ParseError(path.string(), 1, "expected header 'N,K', got '" + line + "'");
  }
  return {a, b};
}

}  // namespace

Graph make_graph(Index num_nodes, std::vector<NodePair> edges, DenseMatrix features,
                 std::vector<Index> labels, Index num_classes) {
  if (features.rows() != num_nodes) {
    throw ShapeError("graph: features " + features.shape_string() + " for " +
                     std::to_string(num_nodes) + " nodes");
  }
  if (labels.size() != num_nodes) {
    throw ShapeError("graph: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(num_nodes) + " nodes");
  }
  if (num_classes < 2) throw RangeError("graph: need at least 2 classes");
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) {
      throw RangeError("graph: label " + std::to_string(labels[i]) + " of node " +
                       std::to_string(i) + " not below " + std::to_string(num_classes));
    }
  }
  std::vector<NodePair> clean;
  clean.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw RangeError("graph: edge (" + std::to_string(e.u) + "," +
                       std::to_string(e.v) + ") has an endpoint >= " +
                       std::to_string(num_nodes));
    }
    if (e.u != e.v) clean.push_back(canonical(e.u, e.v));
  }
  std::sort(clean.begin(), clean.end());
  clean.erase(std::unique(clean.begin(), clean.end()), clean.end());
  return Graph{num_nodes, std::move(clean), std::move(features), std::move(labels),
               num_classes};
}

Graph load_graph(const fs::path& dir) {
  const fs::path labels_path = dir / "labels.csv";
  const fs::path features_path = dir / "features.csv";
  const fs::path edges_path = dir / "edges.tsv";

  std::ifstream labels_in = open_input(labels_path);
  const auto [n, num_classes] = read_header(labels_in, labels_path);
  std::vector<Index> labels;
  labels.reserve(n);
  std::string line;
  std::size_t line_no = 1;
  while (labels.size() < n && std::getline(labels_in, line)) {
    ++line_no;
    Index y = 0;
    if (!parse_number(line, y)) {
      throw ParseError(labels_path.string(), line_no, "bad label '" + line + "'");
    }
    if (y >= num_classes) {
      throw RangeError(labels_path.string() + ":" + std::to_string(line_no) +
                       ": label " + std::to_string(y) + " not below " +
                       std::to_string(num_classes));
    }
    labels.push_back(y);
  }
  if (labels.size() != n) {
    throw ParseError(labels_path.string(), line_no + 1, "expected " + std::to_string(n) +
                                                            " labels");
  }

  std::ifstream features_in = open_input(features_path);
  const auto [fn, dim] = read_header(features_in, features_path);
  if (fn != n) {
    throw ParseError(features_path.string(), 1,
                     "declares " + std::to_string(fn) + " rows but labels.csv has " +
                         std::to_string(n));
  }
  DenseMatrix features(n, dim);
  line_no = 1;
  for (Index r = 0; r < n; ++r) {
    if (!std::getline(features_in, line)) {
      throw ParseError(features_path.string(), line_no + 1, "missing feature row");
    }
    ++line_no;
    const auto fields = split(trim(line), ',');
    if (fields.size() != dim) {
      throw ParseError(features_path.string(), line_no,
                       "expected " + std::to_string(dim) + " values, got " +
                           std::to_string(fields.size()));
    }
    for (Index c = 0; c < dim; ++c) {
      if (!parse_number(fields[c], features(r, c))) {
        throw ParseError(features_path.string(), line_no,
                         "bad value '" + std::string(fields[c]) + "'");
      }
    }
  }

  std::ifstream edges_in = open_input(edges_path);
  std::vector<NodePair> edges;
  line_no = 0;
  while (std::getline(edges_in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split(body, '\t');
    if (fields.size() == 1) {
      // Tolerate space-separated exports.
      fields.clear();
      for (auto f : split(body, ' ')) {
        if (!trim(f).empty()) fields.push_back(f);
      }
    }
    Index u = 0;
    Index v = 0;
    if (fields.size() != 2 || !parse_number(fields[0], u) || !parse_number(fields[1], v)) {
      throw ParseError(edges_path.string(), line_no, "expected 'u<TAB>v', got '" + line + "'");
    }
    if (u >= n || v >= n) {
      throw RangeError(edges_path.string() + ":" + std::to_string(line_no) +
                       ": endpoint >= " + std::to_string(n));
    }
    edges.push_back({u, v});
  }
  return make_graph(n, std::move(edges), std::move(features), std::move(labels),
                    num_classes);
}

void save_graph(const Graph& g, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto open_output = [](const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
  };
  {
    std::ofstream out = open_output(dir / "edges.tsv");
    for (const auto& e : g.edges) out << e.u << '\t' << e.v << '\n';
    if (!out) throw Error("write failed: " + (dir / "edges.tsv").string());
  }
  {
    std::ofstream out = open_output(dir / "features.csv");
    out << g.num_nodes << ',' << g.feature_dim() << '\n';
    char buf[32];
    for (Index r = 0; r < g.num_nodes; ++r) {
      for (Index c = 0; c < g.feature_dim(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", g.features(r, c));
        if (c > 0) out << ',';
        out << buf;
      }
      out << '\n';
    }
    if (!out) throw Error("write failed: " + (dir / "features.csv").string());
  }
  {
    std::ofstream out = open_output(dir / "labels.csv");
    out << g.num_nodes << ',' << g.num_classes << '\n';
    for (Index y : g.labels) out << y << '\n';
    if (!out) throw Error("write failed: " + (dir / "labels.csv").string());
  }
}

SparseMatrix normalized_adjacency(Index num_nodes, std::span<const NodePair> edges) {
  std::vector<double> degree(num_nodes, 1.0);
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw RangeError("normalized_adjacency: edge endpoint out of range");
    }
    if (e.u == e.v) continue;
    degree[e.u] += 1.0;
    degree[e.v] += 1.0;
  }
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(num_nodes + 2 * edges.size());
  for (Index i = 0; i < num_nodes; ++i) triplets.push_back({i, i, 1.0 / degree[i]});
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    const double w = 1.0 / std::sqrt(degree[e.u] * degree[e.v]);
    triplets.push_back({e.u, e.v, w});
    triplets.push_back({e.v, e.u, w});
  }
  return SparseMatrix::from_triplets(num_nodes, num_nodes, std::move(triplets));
}

SparseMatrix normalized_adjacency(const Graph& g) {
  return normalized_adjacency(g.num_nodes, g.edges);
}

NodeSplit split_nodes(const Graph& g, Index per_class, Index n_val, Index n_test,
                      Rng& rng) {
  if (per_class * g.num_classes + n_val + n_test > g.num_nodes) {
    throw CapacityError("split_nodes: " + std::to_string(per_class) + " per class x " +
                        std::to_string(g.num_classes) + " classes + " +
                        std::to_string(n_val) + " + " + std::to_string(n_test) +
                        " exceeds " + std::to_string(g.num_nodes) + " nodes");
  }
  std::vector<std::vector<Index>> by_class(g.num_classes);
  for (Index i = 0; i < g.num_nodes; ++i) by_class[g.labels[i]].push_back(i);

  NodeSplit split;
  std::vector<bool> taken(g.num_nodes, false);
  for (auto& members : by_class) {
    rng.shuffle(members);
    const Index take = std::min(per_class, members.size());
    for (Index k = 0; k < take; ++k) {
      split.train.push_back(members[k]);
      taken[members[k]] = true;
    }
  }
  std::vector<Index> rest;
  for (Index i = 0; i < g.num_nodes; ++i) {
    if (!taken[i]) rest.push_back(i);
  }
  if (n_val + n_test > rest.size()) {
    throw CapacityError("split_nodes: only " + std::to_string(rest.size()) +
                        " nodes left for validation and test");
  }
  rng.shuffle(rest);
  split.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.test.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val),
                    rest.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
  return split;
}

namespace {

LabeledPairs label_pairs(const std::vector<NodePair>& pos,
                         const std::vector<NodePair>& neg) {
  LabeledPairs out;
  out.pairs.reserve(pos.size() + neg.size());
  out.pairs.insert(out.pairs.end(), pos.begin(), pos.end());
  out.pairs.insert(out.pairs.end(), neg.begin(), neg.end());
  out.targets.assign(pos.size(), 1.0);
  out.targets.resize(pos.size() + neg.size(), 0.0);
  return out;
}

// Floor that tolerates representation error in e.g. 0.85 * 20.
Index floor_count(double frac, Index total) {
  return static_cast<Index>(std::floor(frac * static_cast<double>(total) + 1e-9));
}

}  // namespace

LabeledPairs LinkSplit::train() const { return label_pairs(train_pos, train_neg); }
LabeledPairs LinkSplit::val() const { return label_pairs(val_pos, val_neg); }
LabeledPairs LinkSplit::test() const { return label_pairs(test_pos, test_neg); }

LinkSplit split_links(const Graph& g, double train_frac, double val_frac, Rng& rng) {
  if (!(train_frac >= 0.0 && val_frac >= 0.0 && train_frac + val_frac < 1.0)) {
    throw RangeError("split_links: need train_frac, val_frac >= 0 with sum < 1");
  }
  const Index n = g.num_nodes;
  const Index num_edges = g.edges.size();
  if (num_edges < 10) {
    throw CapacityError("split_links: need at least 10 edges, have " +
                        std::to_string(num_edges));
  }
  const std::uint64_t total_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t non_edges = total_pairs - num_edges;
  if (non_edges < num_edges) {
    throw CapacityError("split_links: graph has " + std::to_string(non_edges) +
                        " non-edges but " + std::to_string(num_edges) +
                        " negatives are required");
  }

  std::vector<NodePair> positives = g.edges;
  rng.shuffle(positives);
  const Index n_train = floor_count(train_frac, num_edges);
  const Index n_val = floor_count(val_frac, num_edges);

  LinkSplit split;
  auto at = [&](Index k) { return positives.begin() + static_cast<std::ptrdiff_t>(k); };
  split.train_pos.assign(at(0), at(n_train));
  split.val_pos.assign(at(n_train), at(n_train + n_val));
  split.test_pos.assign(at(n_train + n_val), positives.end());

  std::unordered_set<std::uint64_t> edge_keys;
  edge_keys.reserve(num_edges * 2);
  for (const auto& e : g.edges) edge_keys.insert(pair_key(e, n));

  std::vector<NodePair> negatives;
  negatives.reserve(num_edges);
  if (non_edges <= 4 * static_cast<std::uint64_t>(num_edges)) {
    // Dense graph: enumerate the complement rather than rejection sampling.
    std::vector<NodePair> complement;
    complement.reserve(non_edges);
    for (Index u = 0; u < n; ++u) {
      for (Index v = u + 1; v < n; ++v) {
        if (!edge_keys.contains(pair_key({u, v}, n))) complement.push_back({u, v});
      }
    }
    rng.shuffle(complement);
    negatives.assign(complement.begin(),
                     complement.begin() + static_cast<std::ptrdiff_t>(num_edges));
  } else {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(num_edges * 2);
    while (negatives.size() < num_edges) {
      const Index a = rng.uniform_index(n);
      const Index b = rng.uniform_index(n);
      if (a == b) continue;
      const NodePair p = canonical(a, b);
      const auto key = pair_key(p, n);
      if (edge_keys.contains(key) || !chosen.insert(key).second) continue;
      negatives.push_back(p);
    }
  }
  auto neg_at = [&](Index k) { return negatives.begin() + static_cast<std::ptrdiff_t>(k); };
  split.train_neg.assign(neg_at(0), neg_at(n_train));
  split.val_neg.assign(neg_at(n_train), neg_at(n_train + n_val));
  split.test_neg.assign(neg_at(n_train + n_val), negatives.end());
  return split;
}

Graph gen_sbm(const SbmSpec& spec, Rng& rng) {
  if (spec.blocks < 2) throw RangeError("sbm: need at least 2 blocks");
  if (spec.nodes_per_block < 1) throw RangeError("sbm: empty blocks");
  if (!(0.0 <= spec.p_out && spec.p_out <= spec.p_in && spec.p_in <= 1.0)) {
    throw RangeError("sbm: need 0 <= p_out <= p_in <= 1");
  }
  if (!(spec.noise >= 0.0)) throw RangeError("sbm: noise must be >= 0");
  const Index n = spec.blocks * spec.nodes_per_block;
  std::vector<Index> labels(n);
  for (Index i = 0; i < n; ++i) labels[i] = i / spec.nodes_per_block;

  std::vector<NodePair> edges;
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? spec.p_in : spec.p_out;
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  }
  DenseMatrix features(n, spec.blocks);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < spec.blocks; ++c) {
      features(i, c) = (c == labels[i] ? 1.0 : 0.0) + spec.noise * rng.uniform_double();
    }
  }
  return make_graph(n, std::move(edges), std::move(features), std::move(labels),
                    spec.blocks);
}

}  // namespace privgraph
