// Copyright 2026 The jointslt Authors
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

#include <span>

#include "slt/numcore.hpp"

namespace slt {

template <class T>
struct LossSum {
  Tensor<T> total;      // Σ over non-pad positions of the smoothed cross-entropy
  std::size_t tokens;   // non-pad positions
};

/// Smoothed cross-entropy summed over non-pad positions. The smoothed target
/// puts 1 - eps + eps/V on the reference and eps/V elsewhere.
template <class T>
LossSum<T> label_smoothed_nll_sum(const Tensor<T>& logits, std::span<const int> targets, double eps,
                                  int pad_id) {
  if (logits.rank() != 2 || logits.dim(0) != targets.size()) {
    throw Error("label_smoothed_loss: logits " + shape_str(logits.shape()) + " vs " +
                std::to_string(targets.size()) + " targets");
  }
  if (eps < 0.0 || eps >= 1.0) throw Error("label_smoothed_loss: eps must lie in [0, 1)");
  const std::size_t len = targets.size(), vocab = logits.dim(1);
  std::vector<T> q(len * vocab, T(0));
  std::size_t tokens = 0;
  const double off = eps / double(vocab);
  for (std::size_t i = 0; i < len; ++i) {
    if (targets[i] == pad_id) continue;
    if (targets[i] < 0 || std::size_t(targets[i]) >= vocab) {
      throw Error("label_smoothed_loss: target id " + std::to_string(targets[i]) + " outside vocabulary");
    }
    ++tokens;
    for (std::size_t v = 0; v < vocab; ++v) q[i * vocab + v] = T(off);
    q[i * vocab + std::size_t(targets[i])] = T(1.0 - eps + off);
  }
  if (tokens == 0) throw Error("label_smoothed_loss: every position is padding");
  auto total = scale(sum(mul(log_softmax(logits, 1), Tensor<T>({len, vocab}, std::move(q)))), T(-1));
  return {total, tokens};
}

/// Mean smoothed cross-entropy over non-pad positions.
template <class T>
Tensor<T> label_smoothed_loss(const Tensor<T>& logits, std::span<const int> targets, double eps,
                              int pad_id) {
  auto s = label_smoothed_nll_sum(logits, targets, eps, pad_id);
  return scale(s.total, T(1.0 / double(s.tokens)));
}

}  // namespace slt
