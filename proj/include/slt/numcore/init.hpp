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
#include <cstdint>
#include <random>

#include "slt/numcore/tensor.hpp"

namespace slt {

using Rng = std::mt19937_64;

/// Weight matrix [fan_in, fan_out] drawn from U(-r, r), r = sqrt(6 / (fan_in + fan_out)).
template <class T>
Tensor<T> xavier_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double r = std::sqrt(6.0 / double(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-r, r);
  std::vector<T> data(fan_in * fan_out);
  for (auto& v : data) v = T(dist(rng));
  return Tensor<T>({fan_in, fan_out}, std::move(data), true);
}

template <class T>
Tensor<T> zeros_param(Shape shape) {
  return Tensor<T>::zeros(std::move(shape), true);
}

template <class T>
Tensor<T> ones_param(Shape shape) {
  return Tensor<T>::full(std::move(shape), T(1), true);
}

}  // namespace slt
