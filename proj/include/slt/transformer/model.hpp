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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slt/transformer/config.hpp"
#include "slt/transformer/frontend.hpp"
#include "slt/transformer/layers.hpp"
#include "slt/transformer/positional.hpp"
#include "slt/types.hpp"

namespace slt {

/// Adds the positional table to a [L, d] sequence.
template <class T>
Tensor<T> add_positions(const Tensor<T>& x) {
  return add(x, positional_encoding<T>(x.dim(0), x.dim(1)));
}

/// Encoder-decoder transformer. The input side is a conv frontend (speech),
/// a token embedding (text) or nothing (continuous d_model inputs).
template <class T>
class SeqModel {
 public:
  struct DecoderOutput {
    Tensor<T> hidden;  // [L, d], final decoder state before the output projection
    Tensor<T> logits;  // [L, vocab_tgt]
  };

  SeqModel(ModelConfig cfg, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    const int d = cfg_.d_model;
    if (cfg_.input_mode == InputMode::kSpeech) {
      frontend_ = ConvFrontend<T>::init(cfg_.feat_dim, cfg_.conv_channels, d, rng);
    } else if (cfg_.input_mode == InputMode::kText) {
      src_embed_ = xavier_uniform<T>(std::size_t(cfg_.vocab_src), std::size_t(d), rng);
    }
    for (int i = 0; i < cfg_.n_enc_layers; ++i) {
      enc_.push_back(EncoderLayer<T>::init(d, cfg_.d_ff, cfg_.heads, rng));
    }
    if (cfg_.pre_norm && cfg_.n_enc_layers > 0) enc_norm_ = LayerNormParams<T>::init(d);
    tgt_embed_ = xavier_uniform<T>(std::size_t(cfg_.vocab_tgt), std::size_t(d), rng);
    for (int i = 0; i < cfg_.n_dec_layers; ++i) {
      dec_.push_back(DecoderLayer<T>::init(d, cfg_.d_ff, cfg_.heads, rng));
    }
    if (cfg_.pre_norm && cfg_.n_dec_layers > 0) dec_norm_ = LayerNormParams<T>::init(d);
    out_w_ = xavier_uniform<T>(std::size_t(d), std::size_t(cfg_.vocab_tgt), rng);
    out_b_ = zeros_param<T>({std::size_t(cfg_.vocab_tgt)});
  }

  const ModelConfig& config() const { return cfg_; }

  /// Parameters in a fixed order; the handles alias the model's storage.
  NamedParams<T> named_parameters() const {
    NamedParams<T> out;
    if (frontend_) frontend_->collect("frontend", out);
    if (src_embed_.defined()) out.emplace_back("src_embed", src_embed_);
    for (std::size_t i = 0; i < enc_.size(); ++i) enc_[i].collect("enc." + std::to_string(i), out);
    if (enc_norm_) enc_norm_->collect("enc.norm", out);
    out.emplace_back("tgt_embed", tgt_embed_);
    for (std::size_t i = 0; i < dec_.size(); ++i) dec_[i].collect("dec." + std::to_string(i), out);
    if (dec_norm_) dec_norm_->collect("dec.norm", out);
    out.emplace_back("out.weight", out_w_);
    out.emplace_back("out.bias", out_b_);
    return out;
  }

  std::vector<Tensor<T>> parameters() const {
    std::vector<Tensor<T>> out;
    for (auto& [name, t] : named_parameters()) out.push_back(t);
    return out;
  }

  void zero_grad() const {
    for (auto [name, t] : named_parameters()) t.zero_grad();
  }

  /// Deep copy, optionally into another scalar type.
  template <class U = T>
  SeqModel<U> clone() const {
    Rng scratch(0);
    SeqModel<U> copy(cfg_, scratch);
    auto dst = copy.named_parameters();
    auto src = named_parameters();
    for (std::size_t i = 0; i < src.size(); ++i) {
      auto d = dst[i].second.mutable_data();
      auto s = src[i].second.data();
      for (std::size_t j = 0; j < s.size(); ++j) d[j] = U(s[j]);
    }
    return copy;
  }

  /// Conv frontend output without positions (speech mode).
  Tensor<T> frontend_features(const FeatureSequence& x) const {
    if (!frontend_) throw Error("model input mode is " + to_string(cfg_.input_mode) + ", not speech");
    return frontend_->forward(x);
  }

  Tensor<T> encode(const FeatureSequence& x, const ForwardContext<T>& ctx = {}) const {
    return encode_stack(add_positions(frontend_features(x)), ctx);
  }

  Tensor<T> encode(std::span<const int> ids, const ForwardContext<T>& ctx = {}) const {
    if (cfg_.input_mode != InputMode::kText) {
      throw Error("model input mode is " + to_string(cfg_.input_mode) + ", not text");
    }
    auto e = embedding(src_embed_, ids);
    if (ctx.training && ctx.embedding_hook) e = ctx.embedding_hook(e, src_embed_, EmbeddingSide::kEncoder);
    return encode_stack(add_positions(scale(e, embed_scale())), ctx);
  }

  /// Continuous [L, d_model] inputs, e.g. connector outputs.
  Tensor<T> encode_continuous(const Tensor<T>& x, const ForwardContext<T>& ctx = {}) const {
    if (x.rank() != 2 || x.dim(1) != std::size_t(cfg_.d_model)) {
      throw Error("continuous encoder input must be [L, " + std::to_string(cfg_.d_model) + "], got " +
                  shape_str(x.shape()));
    }
    return encode_stack(add_positions(x), ctx);
  }

  /// Teacher-forced decoder pass over `inputs` (which start with <sos>).
  DecoderOutput decode(const Tensor<T>& memory, std::span<const int> inputs,
                       const ForwardContext<T>& ctx = {}) const {
    if (inputs.empty()) throw Error("decoder input is empty");
    if (inputs[0] != token::kSos) throw Error("decoder input must start with <sos>");
    auto e = embedding(tgt_embed_, inputs);
    if (ctx.training && ctx.embedding_hook) e = ctx.embedding_hook(e, tgt_embed_, EmbeddingSide::kDecoder);
    auto x = add_positions(scale(e, embed_scale()));
    const auto causal = AttentionMask::causal(inputs.size());
    for (std::size_t i = 0; i < dec_.size(); ++i) {
      x = dec_[i].forward(x, memory, causal, cfg_.pre_norm, ctx.dropout_rate(cfg_.dropout), ctx, "dec." + std::to_string(i));
    }
    if (dec_norm_) x = (*dec_norm_)(x);
    auto logits = add(matmul(x, out_w_), out_b_);
    return {x, logits};
  }

  /// Next-token distribution after `prefix` (which starts with <sos>).
  StepOutput decode_step(const Tensor<T>& memory, std::span<const int> prefix) const {
    if (prefix.empty()) throw Error("decode_step: empty prefix");
    NoGradGuard guard;
    auto out = decode(memory, prefix);
    const std::size_t last = prefix.size() - 1;
    auto probs = softmax(slice(out.logits, 0, last, 1), 1);
    auto hidden = slice(out.hidden, 0, last, 1);
    StepOutput step;
    step.probs.assign(probs.data().begin(), probs.data().end());
    step.hidden.assign(hidden.data().begin(), hidden.data().end());
    return step;
  }

  Tensor<T> encode_stack(const Tensor<T>& x, const ForwardContext<T>& ctx) const {
    auto h = x;
    for (std::size_t i = 0; i < enc_.size(); ++i) {
      h = enc_[i].forward(h, cfg_.pre_norm, ctx.dropout_rate(cfg_.dropout), ctx, "enc." + std::to_string(i));
    }
    if (enc_norm_) h = (*enc_norm_)(h);
    return h;
  }

  const Tensor<T>& source_embedding() const { return src_embed_; }
  const Tensor<T>& target_embedding() const { return tgt_embed_; }

 private:
  T embed_scale() const { return T(std::sqrt(double(cfg_.d_model))); }

  ModelConfig cfg_;
  std::optional<ConvFrontend<T>> frontend_;
  Tensor<T> src_embed_;
  std::vector<EncoderLayer<T>> enc_;
  std::optional<LayerNormParams<T>> enc_norm_;
  Tensor<T> tgt_embed_;
  std::vector<DecoderLayer<T>> dec_;
  std::optional<LayerNormParams<T>> dec_norm_;
  Tensor<T> out_w_, out_b_;
};

}  // namespace slt
