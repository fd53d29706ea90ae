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

#include "privgraph/models.hpp"

#include <cmath>
#include <string>

#include "privgraph/errors.hpp"

namespace privgraph {

namespace {

DenseMatrix glorot(Index fan_in, Index fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  DenseMatrix m(fan_in, fan_out);
  for (double& w : m.data()) w = rng.uniform(-bound, bound);
  return m;
}

void expect_shape(const DenseMatrix& m, Index rows, Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(std::string(name) + " is " + m.shape_string() + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

void ModelParams::validate() const {
  expect_shape(encoder.w0, dims.features, dims.hidden, "W0");
  expect_shape(encoder.w1, dims.hidden, dims.embed, "W1");
  expect_shape(predictor.wb, dims.embed, dims.embed, "Wb");
  expect_shape(classifier.wc, dims.embed, dims.classes, "Wc");
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  return a.dims == b.dims && a.encoder.w0 == b.encoder.w0 &&
         a.encoder.w1 == b.encoder.w1 && a.predictor.wb == b.predictor.wb &&
         a.classifier.wc == b.classifier.wc;
}

ModelParams init_params(const ModelDims& dims, Rng& rng) {
  if (dims.features < 1 || dims.hidden < 1 || dims.embed < 1 || dims.classes < 1) {
    throw RangeError("init_params: all dimensions must be >= 1");
  }
  ModelParams p;
  p.dims = dims;
  p.encoder.w0 = glorot(dims.features, dims.hidden, rng);
  p.encoder.w1 = glorot(dims.hidden, dims.embed, rng);
  p.predictor.wb = glorot(dims.embed, dims.embed, rng);
  p.classifier.wc = glorot(dims.embed, dims.classes, rng);
  return p;
}

DenseMatrix encode(const EncoderParams& theta, const SparseMatrix& a_hat,
                   const DenseMatrix& x) {
  if (a_hat.rows() != x.rows() || a_hat.cols() != x.rows()) {
    throw ShapeError("encode: adjacency " + a_hat.shape_string() + " vs features " +
                     x.shape_string());
  }
  const DenseMatrix h = relu(spmm(a_hat, matmul(x, theta.w0)));
  return spmm(a_hat, matmul(h, theta.w1));
}

Var encode(Tape& tape, Var w0, Var w1, const SparseMatrix& a_hat, Var x) {
  const DenseMatrix& xv = tape.value(x);
  if (a_hat.rows() != xv.rows() || a_hat.cols() != xv.rows()) {
    throw ShapeError("encode: adjacency " + a_hat.shape_string() + " vs features " +
                     xv.shape_string());
  }
  const Var h = tape.relu(tape.spmm(a_hat, tape.matmul(x, w0)));
  return tape.spmm(a_hat, tape.matmul(h, w1));
}

DenseMatrix classify_logits(const ClassifierParams& psi, const DenseMatrix& z) {
  return matmul(z, psi.wc);
}

Index predict_label(const DenseMatrix& logits, Index u) {
  if (u >= logits.rows()) {
    throw IndexError("predict_label: row " + std::to_string(u) + " outside " +
                     logits.shape_string());
  }
  auto row = logits.row(u);
  Index best = 0;
  for (Index j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

std::vector<Index> predict_labels(const DenseMatrix& logits, std::span<const Index> nodes) {
  std::vector<Index> out;
  out.reserve(nodes.size());
  for (Index u : nodes) out.push_back(predict_label(logits, u));
  return out;
}

double link_score(const PredictorParams& phi, const DenseMatrix& z, Index u, Index v) {
  if (u >= z.rows() || v >= z.rows()) {
    throw IndexError("link_score: node out of range for " + z.shape_string());
  }
  if (phi.wb.rows() != z.cols() || phi.wb.cols() != z.cols()) {
    throw ShapeError("link_score: Wb " + phi.wb.shape_string() + " vs Z " +
                     z.shape_string());
  }
  auto zu = z.row(u);
  auto zv = z.row(v);
  double score = 0.0;
  for (Index i = 0; i < zu.size(); ++i) {
    double inner = 0.0;
    for (Index j = 0; j < zv.size(); ++j) inner += phi.wb(i, j) * zv[j];
    score += zu[i] * inner;
  }
  return score;
}

std::vector<double> link_scores(const PredictorParams& phi, const DenseMatrix& z,
                                std::span<const NodePair> pairs) {
  // Same association as the tape path: (Z * Wb)[u] . Z[v].
  const DenseMatrix zw = matmul(z, phi.wb);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.u >= z.rows() || p.v >= z.rows()) {
      throw IndexError("link_scores: pair out of range for " + z.shape_string());
    }
    auto a = zw.row(p.u);
    auto b = z.row(p.v);
    double acc = 0.0;
    for (Index j = 0; j < a.size(); ++j) acc += a[j] * b[j];
    out.push_back(acc);
  }
  return out;
}

Var link_scores(Tape& tape, Var wb, Var z, std::span<const NodePair> pairs) {
  return tape.row_dot_pairs(tape.matmul(z, wb), z, pairs);
}

// sigmoid(s) > 1/2 exactly when s > 0; comparing the score avoids rounding
// sigmoid(tiny) to 1/2.
int predict_link(double score) { return score > 0.0 ? 1 : 0; }

}  // namespace privgraph
