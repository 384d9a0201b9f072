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

#include <cstddef>
#include <string>
#include <vector>

#include "slt/numcore/tensor.hpp"

namespace slt {

/// Reserved token ids shared by every vocabulary.
namespace token {
inline constexpr int kPad = 0;
inline constexpr int kUnk = 1;
inline constexpr int kSos = 2;
inline constexpr int kEos = 3;
inline constexpr int kNumReserved = 4;
}  // namespace token

/// Per-frame feature matrix, frames × dim, row-major.
struct FeatureSequence {
  std::size_t frames = 0;
  std::size_t dim = 0;
  std::vector<float> values;

  FeatureSequence() = default;
  FeatureSequence(std::size_t t, std::size_t d, std::vector<float> v)
      : frames(t), dim(d), values(std::move(v)) {
    if (values.size() != frames * dim) throw Error("feature matrix size mismatch");
  }
  float at(std::size_t t, std::size_t f) const { return values[t * dim + f]; }
  float& at(std::size_t t, std::size_t f) { return values[t * dim + f]; }
};

/// Next-token distribution over the target vocabulary plus the decoder
/// state (final layer, pre-projection) that produced it.
struct StepOutput {
  std::vector<double> probs;
  std::vector<float> hidden;
};

}  // namespace slt
