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

#include <optional>
#include <span>

#include "privgraph/numkit.hpp"

namespace privgraph {

struct Metrics {
  std::optional<double> auc;
  std::optional<double> accuracy;
  double rand_node = 0.0;
  double rand_link = 0.5;
};

// Mann-Whitney AUC: the fraction of (positive, negative) pairs ordered
// correctly, ties counting one half. Average ranks, O(n log n).
double auc(std::span<const double> scores_pos, std::span<const double> scores_neg);

double accuracy(std::span<const Index> predictions, std::span<const Index> truth);

struct RandomBaselines {
  double node = 0.0;
  double link = 0.5;
};

// Chance-level accuracy 1/C and chance-level AUC 1/2.
RandomBaselines random_baselines(Index num_classes);

}  // namespace privgraph
