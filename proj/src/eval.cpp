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

#include "privgraph/eval.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "privgraph/errors.hpp"

namespace privgraph {

double auc(std::span<const double> scores_pos, std::span<const double> scores_neg) {
  if (scores_pos.empty() || scores_neg.empty()) {
    throw ContractError("auc: both score vectors must be nonempty");
  }
  const Index n_pos = scores_pos.size();
  const Index n_neg = scores_neg.size();
  const Index n = n_pos + n_neg;
  std::vector<double> all;
  all.reserve(n);
  all.insert(all.end(), scores_pos.begin(), scores_pos.end());
  all.insert(all.end(), scores_neg.begin(), scores_neg.end());
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return all[a] < all[b]; });

  // Twice the rank sum of positives keeps tied averages integral.
  std::uint64_t rank_sum_x2 = 0;
  Index i = 0;
  while (i < n) {
    Index j = i + 1;
    while (j < n && all[order[j]] == all[order[i]]) ++j;
    // Ranks i+1..j share the average (i+1+j)/2.
    const std::uint64_t avg_x2 = static_cast<std::uint64_t>(i + 1 + j);
    for (Index k = i; k < j; ++k) {
      if (order[k] < n_pos) rank_sum_x2 += avg_x2;
    }
    i = j;
  }
  // U = R_pos - n_pos (n_pos + 1) / 2, all doubled.
  const std::uint64_t base_x2 = static_cast<std::uint64_t>(n_pos) * (n_pos + 1);
  const std::uint64_t u_x2 = rank_sum_x2 - base_x2;
  return static_cast<double>(u_x2) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double accuracy(std::span<const Index> predictions, std::span<const Index> truth) {
  if (predictions.size() != truth.size()) {
    throw ContractError("accuracy: " + std::to_string(predictions.size()) +
                        " predictions vs " + std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) throw ContractError("accuracy: empty input");
  Index hits = 0;
  for (Index i = 0; i < truth.size(); ++i) hits += predictions[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

RandomBaselines random_baselines(Index num_classes) {
  if (num_classes < 2) throw RangeError("random_baselines: need at least 2 classes");
  return {1.0 / static_cast<double>(num_classes), 0.5};
}

}  // namespace privgraph
