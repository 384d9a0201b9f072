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

#include <cmath>
#include <vector>

#include "slt/numcore/tensor.hpp"

namespace slt {

/// Fixed trigonometric position table, max_pos × d_model, half-split layout:
/// column i < d/2 holds sin(pos / 10000^(2i/d)), column i >= d/2 holds
/// cos(pos / 10000^(2i/d)) with the same exponent formula.
template <class T = float>
Tensor<T> positional_encoding(std::size_t max_pos, std::size_t d_model) {
  if (d_model == 0 || d_model % 2 != 0) {
    throw Error("positional_encoding: d_model must be even, got " + std::to_string(d_model));
  }
  if (max_pos == 0) throw Error("positional_encoding: max_pos must be positive");
  std::vector<T> table(max_pos * d_model);
  const std::size_t half = d_model / 2;
  for (std::size_t pos = 0; pos < max_pos; ++pos) {
    for (std::size_t i = 0; i < d_model; ++i) {
      const double angle = double(pos) / std::pow(10000.0, 2.0 * double(i) / double(d_model));
      table[pos * d_model + i] = T(i < half ? std::sin(angle) : std::cos(angle));
    }
  }
  return Tensor<T>({max_pos, d_model}, std::move(table));
}

}  // namespace slt
