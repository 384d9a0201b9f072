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

#include <string>
#include <utility>
#include <vector>

#include "slt/transformer/attention.hpp"

namespace slt {

template <class T>
using NamedParams = std::vector<std::pair<std::string, Tensor<T>>>;

template <class T>
struct FfnParams {
  Tensor<T> w1, b1, w2, b2;

  static FfnParams init(int d_model, int d_ff, Rng& rng) {
    const auto d = std::size_t(d_model), f = std::size_t(d_ff);
    return {xavier_uniform<T>(d, f, rng), zeros_param<T>({f}), xavier_uniform<T>(f, d, rng),
            zeros_param<T>({d})};
  }
  void collect(const std::string& prefix, NamedParams<T>& out) const {
    out.emplace_back(prefix + ".w1", w1);
    out.emplace_back(prefix + ".b1", b1);
    out.emplace_back(prefix + ".w2", w2);
    out.emplace_back(prefix + ".b2", b2);
  }
};

/// max(0, x·W1 + b1)·W2 + b2, row by row.
template <class T>
Tensor<T> position_wise_ffn(const Tensor<T>& x, const FfnParams<T>& p) {
  return add(matmul(relu(add(matmul(x, p.w1), p.b1)), p.w2), p.b2);
}

template <class T>
struct LayerNormParams {
  Tensor<T> gamma, beta;

  static LayerNormParams init(int d_model) {
    return {ones_param<T>({std::size_t(d_model)}), zeros_param<T>({std::size_t(d_model)})};
  }
  Tensor<T> operator()(const Tensor<T>& x) const { return layer_norm(x, gamma, beta); }
  void collect(const std::string& prefix, NamedParams<T>& out) const {
    out.emplace_back(prefix + ".gamma", gamma);
    out.emplace_back(prefix + ".beta", beta);
  }
};

template <class T>
Tensor<T> residual_dropout(const Tensor<T>& x, double p, const ForwardContext<T>& ctx) {
  return ctx.dropout_active(p) ? dropout(x, p, *ctx.rng) : x;
}

/// Self-attention + FFN block. Pre-norm: x + f(LN(x)); post-norm: LN(x + f(x)).
template <class T>
struct EncoderLayer {
  AttentionParams<T> self_attn;
  FfnParams<T> ffn;
  LayerNormParams<T> ln1, ln2;

  static EncoderLayer init(int d_model, int d_ff, int heads, Rng& rng) {
    return {AttentionParams<T>::init(d_model, heads, rng), FfnParams<T>::init(d_model, d_ff, rng),
            LayerNormParams<T>::init(d_model), LayerNormParams<T>::init(d_model)};
  }

  Tensor<T> forward(const Tensor<T>& x, bool pre_norm, double drop, const ForwardContext<T>& ctx,
                    const std::string& site) const {
    if (pre_norm) {
      auto y = ln1(x);
      auto h = add(x, residual_dropout(multi_head_attention(y, y, self_attn, nullptr, ctx, drop, site), drop, ctx));
      return add(h, residual_dropout(position_wise_ffn(ln2(h), ffn), drop, ctx));
    }
    auto h = ln1(add(x, residual_dropout(multi_head_attention(x, x, self_attn, nullptr, ctx, drop, site), drop, ctx)));
    return ln2(add(h, residual_dropout(position_wise_ffn(h, ffn), drop, ctx)));
  }

  void collect(const std::string& prefix, NamedParams<T>& out) const {
    self_attn.collect(prefix + ".self_attn", out);
    ffn.collect(prefix + ".ffn", out);
    ln1.collect(prefix + ".ln1", out);
    ln2.collect(prefix + ".ln2", out);
  }
};

/// Causal self-attention, cross-attention over the encoder output, FFN.
template <class T>
struct DecoderLayer {
  AttentionParams<T> self_attn, cross_attn;
  FfnParams<T> ffn;
  LayerNormParams<T> ln1, ln2, ln3;

  static DecoderLayer init(int d_model, int d_ff, int heads, Rng& rng) {
    return {AttentionParams<T>::init(d_model, heads, rng), AttentionParams<T>::init(d_model, heads, rng),
            FfnParams<T>::init(d_model, d_ff, rng), LayerNormParams<T>::init(d_model),
            LayerNormParams<T>::init(d_model), LayerNormParams<T>::init(d_model)};
  }

  Tensor<T> forward(const Tensor<T>& x, const Tensor<T>& memory, const AttentionMask& causal,
                    bool pre_norm, double drop, const ForwardContext<T>& ctx,
                    const std::string& site) const {
    if (pre_norm) {
      auto y = ln1(x);
      auto h = add(x, residual_dropout(multi_head_attention(y, y, self_attn, &causal, ctx, drop, site + ".self"), drop, ctx));
      h = add(h, residual_dropout(multi_head_attention(ln2(h), memory, cross_attn, nullptr, ctx, drop, site + ".cross"), drop, ctx));
      return add(h, residual_dropout(position_wise_ffn(ln3(h), ffn), drop, ctx));
    }
    auto h = ln1(add(x, residual_dropout(multi_head_attention(x, x, self_attn, &causal, ctx, drop, site + ".self"), drop, ctx)));
    h = ln2(add(h, residual_dropout(multi_head_attention(h, memory, cross_attn, nullptr, ctx, drop, site + ".cross"), drop, ctx)));
    return ln3(add(h, residual_dropout(position_wise_ffn(h, ffn), drop, ctx)));
  }

  void collect(const std::string& prefix, NamedParams<T>& out) const {
    self_attn.collect(prefix + ".self_attn", out);
    cross_attn.collect(prefix + ".cross_attn", out);
    ffn.collect(prefix + ".ffn", out);
    ln1.collect(prefix + ".ln1", out);
    ln2.collect(prefix + ".ln2", out);
    ln3.collect(prefix + ".ln3", out);
  }
};

}  // namespace slt
