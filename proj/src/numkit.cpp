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

#include "privgraph/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "privgraph/errors.hpp"

namespace privgraph {

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b,
                        const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shapes " + a.shape_string() +
                     " and " + b.shape_string() + " differ");
  }
}

void accumulate(DenseMatrix& into, const DenseMatrix& delta) {
  if (into.empty() && delta.size() != 0) {
    into = delta;
    return;
  }
  auto dst = into.data();
  auto src = delta.data();
  for (Index i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(Index rows, Index cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_data(Index rows, Index cols, std::vector<double> data) {
  if (data.size() != rows * cols) {
    throw ShapeError("from_data: " + std::to_string(data.size()) +
                     " values for shape " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  DenseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  return m;
}

std::string DenseMatrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
                           std::vector<Index> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0) {
    throw ShapeError("csr: row pointer must have rows+1 entries starting at 0");
  }
  if (col_idx_.size() != values_.size() || row_ptr_.back() != values_.size()) {
    throw ShapeError("csr: last row pointer must equal nnz");
  }
  for (Index r = 0; r < rows_; ++r) {
    if (row_ptr_[r] > row_ptr_[r + 1]) {
      throw ShapeError("csr: row pointer decreases at row " + std::to_string(r));
    }
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw ShapeError("csr: column index out of range");
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1]) {
        throw ShapeError("csr: column indices not strictly increasing in row " +
                         std::to_string(r));
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw ShapeError("from_triplets: entry (" + std::to_string(t.row) + "," +
                       std::to_string(t.col) + ") outside " + std::to_string(rows) +
                       "x" + std::to_string(cols));
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  std::vector<Index> row_ptr(rows + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (Index i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    if (i > 0 && triplets[i - 1].row == t.row && triplets[i - 1].col == t.col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (Index r = 0; r < rows; ++r) row_ptr[r + 1] += row_ptr[r];
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Index> row_ptr(n + 1);
  std::vector<Index> col_idx(n);
  for (Index i = 0; i <= n; ++i) row_ptr[i] = i;
  for (Index i = 0; i < n; ++i) col_idx[i] = i;
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                      std::vector<double>(n, 1.0));
}

double SparseMatrix::at(Index r, Index c) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values_[static_cast<Index>(it - col_idx_.begin())];
}

DenseMatrix SparseMatrix::densify() const {
  DenseMatrix d(rows_, cols_);
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) = values_[k];
  }
  return d;
}

std::string SparseMatrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_) + " (sparse)";
}

// ---------------------------------------------------------------------------
// Kernels

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + a.shape_string() + " x " + b.shape_string());
  }
  DenseMatrix out(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (Index k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      // Feature matrices are mostly zeros.
      if (s == 0.0) continue;
      auto src = b.row(k);
      for (Index j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: " + a.shape_string() + "^T x " + b.shape_string());
  }
  DenseMatrix out(a.cols(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    auto src = b.row(i);
    for (Index k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      if (s == 0.0) continue;
      auto dst = out.row(k);
      for (Index j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: " + a.shape_string() + " x " + b.shape_string() + "^T");
  }
  DenseMatrix out(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    auto ar = a.row(i);
    for (Index j = 0; j < b.rows(); ++j) {
      auto br = b.row(j);
      double acc = 0.0;
      for (Index k = 0; k < ar.size(); ++k) acc += ar[k] * br[k];
      out(i, j) = acc;
    }
  }
  return out;
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.cols() != d.rows()) {
    throw ShapeError("spmm: " + s.shape_string() + " x " + d.shape_string());
  }
  DenseMatrix out(s.rows(), d.cols());
  const auto ptr = s.row_ptr();
  const auto col = s.col_idx();
  const auto val = s.values();
  for (Index r = 0; r < s.rows(); ++r) {
    auto dst = out.row(r);
    for (Index k = ptr[r]; k < ptr[r + 1]; ++k) {
      auto src = d.row(col[k]);
      for (Index j = 0; j < dst.size(); ++j) dst[j] += val[k] * src[j];
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

DenseMatrix relu(const DenseMatrix& a) {
  DenseMatrix out = a;
  for (double& x : out.data()) x = x > 0.0 ? x : 0.0;
  return out;
}

DenseMatrix log_softmax_rows(const DenseMatrix& a) {
  DenseMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    auto in = a.row(i);
    auto dst = out.row(i);
    if (in.empty()) continue;
    const double mx = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (double x : in) total += std::exp(x - mx);
    const double log_norm = mx + std::log(total);
    for (Index j = 0; j < in.size(); ++j) dst[j] = in[j] - log_norm;
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

namespace {

void check_labels(const DenseMatrix& logits, std::span<const Index> labels) {
  if (labels.size() != logits.rows()) {
    throw ShapeError("softmax_ce: " + std::to_string(labels.size()) +
                     " labels for logits " + logits.shape_string());
  }
  for (Index r = 0; r < labels.size(); ++r) {
    if (labels[r] >= logits.cols()) {
      throw IndexError("softmax_ce: label " + std::to_string(labels[r]) +
                       " at row " + std::to_string(r) + " not below " +
                       std::to_string(logits.cols()));
    }
  }
}

void check_targets(Index n_scores, std::span<const double> targets) {
  if (n_scores != targets.size()) {
    throw ShapeError("bce: " + std::to_string(n_scores) + " scores vs " +
                     std::to_string(targets.size()) + " targets");
  }
  for (double t : targets) {
    if (t != 0.0 && t != 1.0) throw RangeError("bce: targets must be 0 or 1");
  }
}

double bce_term(double s, double t) { return t == 1.0 ? log1pexp(-s) : log1pexp(s); }

}  // namespace

double softmax_ce_loss(const DenseMatrix& logits, std::span<const Index> labels) {
  check_labels(logits, labels);
  if (labels.empty()) return 0.0;
  const DenseMatrix lsm = log_softmax_rows(logits);
  double total = 0.0;
  for (Index r = 0; r < labels.size(); ++r) total -= lsm(r, labels[r]);
  return total / static_cast<double>(labels.size());
}

double bce_with_logits_loss(std::span<const double> scores,
                            std::span<const double> targets) {
  check_targets(scores.size(), targets);
  if (scores.empty()) return 0.0;
  double total = 0.0;
  for (Index i = 0; i < scores.size(); ++i) total += bce_term(scores[i], targets[i]);
  return total / static_cast<double>(scores.size());
}

// ---------------------------------------------------------------------------
// Tape

Var Tape::push(DenseMatrix value, std::vector<Index> inputs, BackwardFn backward) {
  bool tracked = false;
  for (Index in : inputs) tracked = tracked || nodes_[in].requires_grad;
  nodes_.push_back(Node{std::move(value), tracked, std::move(inputs),
                        tracked ? std::move(backward) : BackwardFn{}});
  return Var{nodes_.size() - 1};
}

Var Tape::parameter(DenseMatrix value) {
  nodes_.push_back(Node{std::move(value), true, {}, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::constant(DenseMatrix value) {
  nodes_.push_back(Node{std::move(value), false, {}, {}});
  return Var{nodes_.size() - 1};
}

double Tape::scalar(Var v) const {
  const auto& m = value(v);
  if (m.rows() != 1 || m.cols() != 1) {
    throw ContractError("scalar: node has shape " + m.shape_string());
  }
  return m(0, 0);
}

Var Tape::matmul(Var a, Var b) {
  DenseMatrix out = privgraph::matmul(value(a), value(b));
  const bool ga = needs_grad(a);
  const bool gb = needs_grad(b);
  return push(std::move(out), {a.id, b.id},
              [this, a, b, ga, gb](const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                if (ga) accumulate(grads[a.id], matmul_nt(g, value(b)));
                if (gb) accumulate(grads[b.id], matmul_tn(value(a), g));
              });
}

Var Tape::spmm(const SparseMatrix& s, Var d) {
  DenseMatrix out = privgraph::spmm(s, value(d));
  return push(std::move(out), {d.id},
              [&s, d](const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                // s^T g, scattered row by row.
                DenseMatrix back(s.cols(), g.cols());
                const auto ptr = s.row_ptr();
                const auto col = s.col_idx();
                const auto val = s.values();
                for (Index r = 0; r < s.rows(); ++r) {
                  auto src = g.row(r);
                  for (Index k = ptr[r]; k < ptr[r + 1]; ++k) {
                    auto dst = back.row(col[k]);
                    for (Index j = 0; j < dst.size(); ++j) dst[j] += val[k] * src[j];
                  }
                }
                accumulate(grads[d.id], back);
              });
}

Var Tape::relu(Var a) {
  DenseMatrix out = privgraph::relu(value(a));
  return push(std::move(out), {a.id},
              [this, a](const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                DenseMatrix back = g;
                auto in = value(a).data();
                auto dst = back.data();
                for (Index i = 0; i < dst.size(); ++i) {
                  if (!(in[i] > 0.0)) dst[i] = 0.0;
                }
                accumulate(grads[a.id], back);
              });
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  DenseMatrix out = value(a);
  auto dst = out.data();
  auto src = value(b).data();
  for (Index i = 0; i < dst.size(); ++i) dst[i] += src[i];
  const bool ga = needs_grad(a);
  const bool gb = needs_grad(b);
  return push(std::move(out), {a.id, b.id},
              [a, b, ga, gb](const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                if (ga) accumulate(grads[a.id], g);
                if (gb) accumulate(grads[b.id], g);
              });
}

Var Tape::scale(Var a, double factor) {
  DenseMatrix out = value(a);
  for (double& x : out.data()) x *= factor;
  return push(std::move(out), {a.id},
              [a, factor](const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                DenseMatrix back = g;
                for (double& x : back.data()) x *= factor;
                accumulate(grads[a.id], back);
              });
}

Var Tape::sum(Var a) {
  double total = 0.0;
  for (double x : value(a).data()) total += x;
  const Index rows = value(a).rows();
  const Index cols = value(a).cols();
  return push(DenseMatrix(1, 1, total), {a.id},
              [a, rows, cols](const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                accumulate(grads[a.id], DenseMatrix(rows, cols, g(0, 0)));
              });
}

Var Tape::gather_rows(Var a, std::span<const Index> rows) {
  const DenseMatrix& src = value(a);
  DenseMatrix out(rows.size(), src.cols());
  for (Index i = 0; i < rows.size(); ++i) {
    if (rows[i] >= src.rows()) {
      throw IndexError("gather_rows: row " + std::to_string(rows[i]) +
                       " outside " + src.shape_string());
    }
    std::copy_n(src.row(rows[i]).begin(), src.cols(), out.row(i).begin());
  }
  std::vector<Index> idx(rows.begin(), rows.end());
  const Index n = src.rows();
  return push(std::move(out), {a.id},
              [a, idx = std::move(idx), n](const DenseMatrix& g,
                                           std::vector<DenseMatrix>& grads) {
                DenseMatrix back(n, g.cols());
                for (Index i = 0; i < idx.size(); ++i) {
                  auto dst = back.row(idx[i]);
                  auto src_row = g.row(i);
                  for (Index j = 0; j < dst.size(); ++j) dst[j] += src_row[j];
                }
                accumulate(grads[a.id], back);
              });
}

Var Tape::row_dot_pairs(Var a, Var b, std::span<const NodePair> pairs) {
  const DenseMatrix& av = value(a);
  const DenseMatrix& bv = value(b);
  if (av.cols() != bv.cols()) {
    throw ShapeError("row_dot_pairs: " + av.shape_string() + " vs " + bv.shape_string());
  }
  DenseMatrix out(pairs.size(), 1);
  for (Index k = 0; k < pairs.size(); ++k) {
    if (pairs[k].u >= av.rows() || pairs[k].v >= bv.rows()) {
      throw IndexError("row_dot_pairs: pair (" + std::to_string(pairs[k].u) + "," +
                       std::to_string(pairs[k].v) + ") out of range");
    }
    auto ar = av.row(pairs[k].u);
    auto br = bv.row(pairs[k].v);
    double acc = 0.0;
    for (Index j = 0; j < ar.size(); ++j) acc += ar[j] * br[j];
    out(k, 0) = acc;
  }
  std::vector<NodePair> saved(pairs.begin(), pairs.end());
  const bool ga = needs_grad(a);
  const bool gb = needs_grad(b);
  return push(std::move(out), {a.id, b.id},
              [this, a, b, ga, gb, saved = std::move(saved)](
                  const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                const DenseMatrix& av = value(a);
                const DenseMatrix& bv = value(b);
                DenseMatrix da(ga ? av.rows() : 0, av.cols());
                DenseMatrix db(gb ? bv.rows() : 0, bv.cols());
                for (Index k = 0; k < saved.size(); ++k) {
                  const double gk = g(k, 0);
                  if (ga) {
                    auto dst = da.row(saved[k].u);
                    auto src = bv.row(saved[k].v);
                    for (Index j = 0; j < dst.size(); ++j) dst[j] += gk * src[j];
                  }
                  if (gb) {
                    auto dst = db.row(saved[k].v);
                    auto src = av.row(saved[k].u);
                    for (Index j = 0; j < dst.size(); ++j) dst[j] += gk * src[j];
                  }
                }
                if (ga) accumulate(grads[a.id], da);
                if (gb) accumulate(grads[b.id], db);
              });
}

Var Tape::log_softmax_rows(Var a) {
  DenseMatrix out = privgraph::log_softmax_rows(value(a));
  const Index id = nodes_.size();
  return push(std::move(out), {a.id},
              [this, a, id](const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                const DenseMatrix& lsm = nodes_[id].value;
                DenseMatrix back(g.rows(), g.cols());
                for (Index i = 0; i < g.rows(); ++i) {
                  double gsum = 0.0;
                  for (double x : g.row(i)) gsum += x;
                  for (Index j = 0; j < g.cols(); ++j) {
                    back(i, j) = g(i, j) - std::exp(lsm(i, j)) * gsum;
                  }
                }
                accumulate(grads[a.id], back);
              });
}

Var Tape::softmax_ce(Var logits, std::span<const Index> labels) {
  const DenseMatrix& lv = value(logits);
  check_labels(lv, labels);
  DenseMatrix lsm = privgraph::log_softmax_rows(lv);
  double total = 0.0;
  for (Index r = 0; r < labels.size(); ++r) total -= lsm(r, labels[r]);
  const double n = static_cast<double>(labels.size());
  const double loss = labels.empty() ? 0.0 : total / n;
  std::vector<Index> saved(labels.begin(), labels.end());
  return push(DenseMatrix(1, 1, loss), {logits.id},
              [logits, lsm = std::move(lsm), saved = std::move(saved), n](
                  const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                DenseMatrix back(lsm.rows(), lsm.cols());
                if (saved.empty()) {
                  accumulate(grads[logits.id], back);
                  return;
                }
                const double w = g(0, 0) / n;
                for (Index r = 0; r < lsm.rows(); ++r) {
                  for (Index j = 0; j < lsm.cols(); ++j) {
                    back(r, j) = w * std::exp(lsm(r, j));
                  }
                  back(r, saved[r]) -= w;
                }
                accumulate(grads[logits.id], back);
              });
}

Var Tape::bce_with_logits(Var scores, std::span<const double> targets) {
  const DenseMatrix& sv = value(scores);
  if (sv.cols() != 1) throw ShapeError("bce_with_logits: scores must be a column");
  check_targets(sv.rows(), targets);
  double total = 0.0;
  for (Index i = 0; i < sv.rows(); ++i) total += bce_term(sv(i, 0), targets[i]);
  const double n = static_cast<double>(targets.size());
  const double loss = targets.empty() ? 0.0 : total / n;
  std::vector<double> saved(targets.begin(), targets.end());
  return push(DenseMatrix(1, 1, loss), {scores.id},
              [this, scores, saved = std::move(saved), n](
                  const DenseMatrix& g, std::vector<DenseMatrix>& grads) {
                const DenseMatrix& sv = value(scores);
                DenseMatrix back(sv.rows(), 1);
                if (!saved.empty()) {
                  const double w = g(0, 0) / n;
                  for (Index i = 0; i < sv.rows(); ++i) {
                    back(i, 0) = w * (sigmoid(sv(i, 0)) - saved[i]);
                  }
                }
                accumulate(grads[scores.id], back);
              });
}

Gradients Tape::backward(Var output) const {
  const DenseMatrix& out = value(output);
  if (out.rows() != 1 || out.cols() != 1) {
    throw ContractError("backward: output must be scalar, got " + out.shape_string());
  }
  std::vector<DenseMatrix> grads(nodes_.size());
  grads[output.id] = DenseMatrix(1, 1, 1.0);
  for (Index i = output.id + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (grads[i].empty() || !node.backward) continue;
    node.backward(grads[i], grads);
  }
  for (Index i = 0; i < nodes_.size(); ++i) {
    if (grads[i].empty()) grads[i] = DenseMatrix(nodes_[i].value.rows(), nodes_[i].value.cols());
  }
  return Gradients(std::move(grads));
}

// ---------------------------------------------------------------------------
// Adam

AdamState::AdamState(AdamConfig config, std::span<const DenseMatrix* const> params)
    : config_(config) {
  first_.reserve(params.size());
  second_.reserve(params.size());
  for (const DenseMatrix* p : params) {
    first_.emplace_back(p->rows(), p->cols());
    second_.emplace_back(p->rows(), p->cols());
  }
}

void adam_step(AdamState& state, std::span<DenseMatrix* const> params,
               std::span<const DenseMatrix> grads, bool ascend) {
  if (params.size() != grads.size() || params.size() != state.first_.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " params, " +
                     std::to_string(grads.size()) + " grads, " +
                     std::to_string(state.first_.size()) + " moment slots");
  }
  for (Index p = 0; p < params.size(); ++p) {
    require_same_shape(*params[p], grads[p], "adam_step");
    require_same_shape(*params[p], state.first_[p], "adam_step");
  }
  const AdamConfig& c = state.config_;
  ++state.steps_;
  const double t = static_cast<double>(state.steps_);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (Index p = 0; p < params.size(); ++p) {
    auto w = params[p]->data();
    auto g = grads[p].data();
    auto m = state.first_[p].data();
    auto v = state.second_[p].data();
    for (Index i = 0; i < w.size(); ++i) {
      const double gi = ascend ? -g[i] : g[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * gi;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * gi * gi;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= c.step_size * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

// ---------------------------------------------------------------------------
// Rng

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

Index Rng::uniform_index(Index bound) {
  if (bound == 0) throw RangeError("uniform_index: bound must be >= 1");
  // Lemire's multiply-shift with rejection.
  const std::uint64_t range = bound;
  unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * range;
  auto low = static_cast<std::uint64_t>(product);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(next_u64()) * range;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<Index>(product >> 64);
}

double Rng::uniform_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::vector<Index> Rng::permutation(Index n) {
  std::vector<Index> p(n);
  for (Index i = 0; i < n; ++i) p[i] = i;
  shuffle(p);
  return p;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b * 0xd1342543de82ef95ULL);
  splitmix64(x);
  return splitmix64(x);
}

std::vector<Index> seeded_uniform(Rng& rng, Index n, Index k) {
  if (k == 0) throw RangeError("seeded_uniform: k must be >= 1");
  std::vector<Index> out(n);
  for (auto& x : out) x = rng.uniform_index(k);
  return out;
}

}  // namespace privgraph
