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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "slt/numcore/tensor.hpp"

namespace slt {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-9;
};

/// Optimizer moments, one (m, v) pair per parameter tensor in a fixed order.
template <class T>
struct AdamState {
  AdamConfig config;
  std::size_t step = 0;
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
};

enum class UpdateStatus { kApplied, kRejectedNonFinite };

/// One bias-corrected ADAM step over `params` using their accumulated
/// gradients. A parameter whose gradient is identically zero is left as is,
/// moments included. Any non-finite gradient rejects the whole step and
/// leaves params and state unchanged.
template <class T>
UpdateStatus adam_update(std::span<Tensor<T>> params, AdamState<T>& state, double lrate) {
  if (lrate < 0.0) throw Error("adam_update: negative learning rate");
  if (state.m.empty()) {
    for (auto& p : params) {
      state.m.emplace_back(p.numel(), T(0));
      state.v.emplace_back(p.numel(), T(0));
    }
  }
  if (state.m.size() != params.size()) {
    throw Error("adam_update: optimizer state holds " + std::to_string(state.m.size()) +
                " tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].size() != params[i].numel()) {
      throw Error("adam_update: moment shape differs from parameter " + shape_str(params[i].shape()));
    }
    for (T g : params[i].grad()) {
      if (!std::isfinite(double(g))) return UpdateStatus::kRejectedNonFinite;
    }
  }
  state.step += 1;
  const auto& c = state.config;
  const double t = double(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto g = params[i].grad();
    if (std::all_of(g.begin(), g.end(), [](T x) { return x == T(0); })) continue;
    auto w = params[i].mutable_data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = g[j];
      const double mj = c.beta1 * m[j] + (1.0 - c.beta1) * gj;
      const double vj = c.beta2 * v[j] + (1.0 - c.beta2) * gj * gj;
      m[j] = T(mj);
      v[j] = T(vj);
      w[j] = T(double(w[j]) - lrate * (mj / bc1) / (std::sqrt(vj / bc2) + c.epsilon));
    }
  }
  return UpdateStatus::kApplied;
}

}  // namespace slt
