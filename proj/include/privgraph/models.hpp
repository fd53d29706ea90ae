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

// The three networks sharing one node representation Z:
//
//   encoder     Z = A_hat * relu(A_hat * X * W0) * W1
//   classifier  logits = Z * Wc               (softmax posterior over classes)
//   predictor   score(u, v) = z_u^T * Wb * z_v (sigmoid gives the link probability)
//
// No biases, no dropout.

#pragma once

#include <span>
#include <vector>

#include "privgraph/numkit.hpp"

namespace privgraph {

struct ModelDims {
  Index features = 0;
  Index hidden = 64;
  Index embed = 16;
  Index classes = 0;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

struct EncoderParams {
  DenseMatrix w0;  // features x hidden
  DenseMatrix w1;  // hidden x embed
};

struct ClassifierParams {
  DenseMatrix wc;  // embed x classes
};

struct PredictorParams {
  DenseMatrix wb;  // embed x embed
};

struct ModelParams {
  ModelDims dims;
  EncoderParams encoder;
  PredictorParams predictor;
  ClassifierParams classifier;

  // Throws ShapeError if any matrix disagrees with `dims`.
  void validate() const;
  friend bool operator==(const ModelParams& a, const ModelParams& b);
};

// Glorot-uniform initialization of every weight matrix.
ModelParams init_params(const ModelDims& dims, Rng& rng);

DenseMatrix encode(const EncoderParams& theta, const SparseMatrix& a_hat,
                   const DenseMatrix& x);
// Tape version; `a_hat` must outlive the tape.
Var encode(Tape& tape, Var w0, Var w1, const SparseMatrix& a_hat, Var x);

DenseMatrix classify_logits(const ClassifierParams& psi, const DenseMatrix& z);

// Arg max of row `u`; ties go to the lowest column.
Index predict_label(const DenseMatrix& logits, Index u);
std::vector<Index> predict_labels(const DenseMatrix& logits, std::span<const Index> nodes);

double link_score(const PredictorParams& phi, const DenseMatrix& z, Index u, Index v);
std::vector<double> link_scores(const PredictorParams& phi, const DenseMatrix& z,
                                std::span<const NodePair> pairs);
// Tape version, P x 1. Computes (Z * Wb) row u dotted with Z row v.
Var link_scores(Tape& tape, Var wb, Var z, std::span<const NodePair> pairs);

// 1 iff sigmoid(score) > 0.5.
int predict_link(double score);

}  // namespace privgraph
