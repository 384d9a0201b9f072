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

#include <cstdint>
#include <string>
#include <vector>

#include "slt/transformer/layers.hpp"
#include "slt/types.hpp"

namespace slt {

/// Output length of one stride-2, kernel-3, padding-1 convolution.
inline std::size_t conv_out_len(std::size_t n) { return (n + 1) / 2; }

/// Two 3×3 stride-2 convolutions over (time, feature) with ReLU, then the
/// flattened channels × reduced features are projected to d_model.
/// Activations are stored position-major: row (t, f), column channel.
template <class T>
struct ConvFrontend {
  Tensor<T> w1, b1, w2, b2, proj_w, proj_b;
  std::size_t feat_dim = 0;
  std::size_t channels = 0;

  static ConvFrontend init(int feat_dim, int channels, int d_model, Rng& rng) {
    const auto c = std::size_t(channels);
    const auto f2 = conv_out_len(conv_out_len(std::size_t(feat_dim)));
    ConvFrontend fe;
    fe.feat_dim = std::size_t(feat_dim);
    fe.channels = c;
    fe.w1 = xavier_uniform<T>(9, c, rng);
    fe.b1 = zeros_param<T>({c});
    fe.w2 = xavier_uniform<T>(9 * c, c, rng);
    fe.b2 = zeros_param<T>({c});
    fe.proj_w = xavier_uniform<T>(f2 * c, std::size_t(d_model), rng);
    fe.proj_b = zeros_param<T>({std::size_t(d_model)});
    return fe;
  }

  /// [ceil(ceil(T/2)/2), d_model], before positional encoding.
  Tensor<T> forward(const FeatureSequence& x) const {
    if (x.dim != feat_dim) {
      throw Error("conv frontend expects feature dim " + std::to_string(feat_dim) + ", got " +
                  std::to_string(x.dim));
    }
    if (x.frames < 4) {
      throw Error("conv frontend needs at least 4 frames, got " + std::to_string(x.frames));
    }
    const std::size_t t0 = x.frames, f0 = x.dim;
    const std::size_t t1 = conv_out_len(t0), f1 = conv_out_len(f0);
    const std::size_t t2 = conv_out_len(t1), f2 = conv_out_len(f1);
    Tensor<T> input({t0 * f0}, std::vector<T>(x.values.begin(), x.values.end()));

    std::vector<std::int64_t> idx1(t1 * f1 * 9);
    for (std::size_t t = 0; t < t1; ++t) {
      for (std::size_t f = 0; f < f1; ++f) {
        for (std::size_t k = 0; k < 9; ++k) {
          const auto ti = std::int64_t(2 * t + k / 3) - 1;
          const auto fi = std::int64_t(2 * f + k % 3) - 1;
          const bool inside = ti >= 0 && ti < std::int64_t(t0) && fi >= 0 && fi < std::int64_t(f0);
          idx1[(t * f1 + f) * 9 + k] = inside ? ti * std::int64_t(f0) + fi : -1;
        }
      }
    }
    auto h1 = relu(add(matmul(gather(input, std::move(idx1), {t1 * f1, 9}), w1), b1));

    const std::size_t c = channels;
    std::vector<std::int64_t> idx2(t2 * f2 * 9 * c);
    for (std::size_t t = 0; t < t2; ++t) {
      for (std::size_t f = 0; f < f2; ++f) {
        for (std::size_t k = 0; k < 9; ++k) {
          const auto ti = std::int64_t(2 * t + k / 3) - 1;
          const auto fi = std::int64_t(2 * f + k % 3) - 1;
          const bool inside = ti >= 0 && ti < std::int64_t(t1) && fi >= 0 && fi < std::int64_t(f1);
          for (std::size_t ch = 0; ch < c; ++ch) {
            idx2[((t * f2 + f) * 9 + k) * c + ch] =
                inside ? (ti * std::int64_t(f1) + fi) * std::int64_t(c) + std::int64_t(ch) : -1;
          }
        }
      }
    }
    auto h2 = relu(add(matmul(gather(h1, std::move(idx2), {t2 * f2, 9 * c}), w2), b2));
    return add(matmul(reshape(h2, {t2, f2 * c}), proj_w), proj_b);
  }

  void collect(const std::string& prefix, NamedParams<T>& out) const {
    out.emplace_back(prefix + ".conv1.weight", w1);
    out.emplace_back(prefix + ".conv1.bias", b1);
    out.emplace_back(prefix + ".conv2.weight", w2);
    out.emplace_back(prefix + ".conv2.bias", b2);
    out.emplace_back(prefix + ".proj.weight", proj_w);
    out.emplace_back(prefix + ".proj.bias", proj_b);
  }
};

}  // namespace slt
