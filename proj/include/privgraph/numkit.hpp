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

// Numerical substrate: dense/sparse matrices, a coarse-grained reverse-mode
// tape, Adam, and a seedable generator. Everything is double precision and
// single-threaded; loop orders are fixed so results are bit-reproducible.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace privgraph {

using Index = std::size_t;

// Undirected node pair (u, v). Used both for edges and for scored pairs.
struct NodePair {
  Index u = 0;
  Index v = 0;

  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols, double fill = 0.0);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(Index n);
  // Takes ownership of row-major `data`; throws ShapeError on size mismatch.
  static DenseMatrix from_data(Index rows, Index cols, std::vector<double> data);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(Index r, Index c) { return data_[r * cols_ + c]; }
  double operator()(Index r, Index c) const { return data_[r * cols_ + c]; }

  std::span<double> row(Index r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(Index r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;
  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

// Compressed sparse row matrix. Column indices are strictly increasing per row.
class SparseMatrix {
 public:
  struct Triplet {
    Index row;
    Index col;
    double value;
  };

  SparseMatrix() = default;
  // Validates the CSR invariants; throws ShapeError if any is violated.
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
               std::vector<Index> col_idx, std::vector<double> values);

  // Duplicate coordinates are summed.
  static SparseMatrix from_triplets(Index rows, Index cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return values_.size(); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  // Entry lookup by binary search; zero when absent.
  double at(Index r, Index c) const;
  DenseMatrix densify() const;
  std::string shape_string() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Eager kernels. The tape below records these with hand-written backward rules.

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a^T * b without materializing the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a * b^T without materializing the transpose.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix relu(const DenseMatrix& a);
DenseMatrix log_softmax_rows(const DenseMatrix& a);

double sigmoid(double x);
// log(1 + exp(x)) without overflow.
double log1pexp(double x);

// Mean over rows of -log_softmax(logits)[r, labels[r]].
double softmax_ce_loss(const DenseMatrix& logits, std::span<const Index> labels);
// Mean binary cross-entropy on raw scores; targets must be 0 or 1.
double bce_with_logits_loss(std::span<const double> scores,
                            std::span<const double> targets);

// ---------------------------------------------------------------------------
// Reverse-mode tape over matrix-valued primitives.

struct Var {
  Index id = 0;
};

class Gradients {
 public:
  explicit Gradients(std::vector<DenseMatrix> grads) : grads_(std::move(grads)) {}

  // Gradient with respect to a recorded node; shape matches the node value.
  const DenseMatrix& of(Var v) const { return grads_.at(v.id); }

 private:
  std::vector<DenseMatrix> grads_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  // Backward closures refer back into the tape, so it stays put.
  Tape(Tape&&) = delete;
  Tape& operator=(Tape&&) = delete;

  // Leaf that receives a gradient.
  Var parameter(DenseMatrix value);
  // Leaf that never receives a gradient.
  Var constant(DenseMatrix value);

  const DenseMatrix& value(Var v) const { return nodes_.at(v.id).value; }
  double scalar(Var v) const;
  Index size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);
  // `s` must outlive the tape.
  Var spmm(const SparseMatrix& s, Var d);
  Var relu(Var a);
  Var add(Var a, Var b);
  Var scale(Var a, double factor);
  Var sum(Var a);
  Var gather_rows(Var a, std::span<const Index> rows);
  // out[k] = dot(a.row(pairs[k].u), b.row(pairs[k].v)), shape P x 1.
  Var row_dot_pairs(Var a, Var b, std::span<const NodePair> pairs);
  Var log_softmax_rows(Var a);
  Var softmax_ce(Var logits, std::span<const Index> labels);
  // `scores` is P x 1.
  Var bce_with_logits(Var scores, std::span<const double> targets);

  // Gradient of the scalar `output` with respect to every recorded node.
  // Does not mutate the tape, so repeated calls give identical results.
  Gradients backward(Var output) const;

 private:
  using BackwardFn =
      std::function<void(const DenseMatrix& grad_out, std::vector<DenseMatrix>& grads)>;

  struct Node {
    DenseMatrix value;
    bool requires_grad = false;
    std::vector<Index> inputs;
    BackwardFn backward;
  };

  Var push(DenseMatrix value, std::vector<Index> inputs, BackwardFn backward);
  bool needs_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Adam.

struct AdamConfig {
  double step_size = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  AdamState(AdamConfig config, std::span<const DenseMatrix* const> params);

  const AdamConfig& config() const { return config_; }
  std::uint64_t step_count() const { return steps_; }
  std::span<const DenseMatrix> first_moments() const { return first_; }
  std::span<const DenseMatrix> second_moments() const { return second_; }

 private:
  friend void adam_step(AdamState&, std::span<DenseMatrix* const>,
                        std::span<const DenseMatrix>, bool);

  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<DenseMatrix> first_;
  std::vector<DenseMatrix> second_;
};

// Bias-corrected Adam update in place. With `ascend` the gradient is negated
// first, so the parameters move uphill.
void adam_step(AdamState& state, std::span<DenseMatrix* const> params,
               std::span<const DenseMatrix> grads, bool ascend = false);

// ---------------------------------------------------------------------------
// xoshiro256** seeded through splitmix64.

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  // Unbiased integer in [0, bound); bound must be >= 1.
  Index uniform_index(Index bound);
  // Uniform in [0, 1) with 53 random bits.
  double uniform_double();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_double(); }
  bool bernoulli(double p) { return uniform_double() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (Index i = items.size(); i > 1; --i) {
      const Index j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::vector<Index> permutation(Index n);

 private:
  std::array<std::uint64_t, 4> state_{};
};

// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// n indices drawn uniformly from [0, k).
std::vector<Index> seeded_uniform(Rng& rng, Index n, Index k);

}  // namespace privgraph
