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

#include <optional>
#include <string>
#include <vector>

#include "slt/training/trainer.hpp"

namespace slt {

enum class ConnectorKind { kLinear, kSelfAttention };
enum class FreezeMode { kFull, kConnectorOnly };

inline std::string to_string(ConnectorKind k) { return k == ConnectorKind::kLinear ? "linear" : "self_attention"; }
inline std::string to_string(FreezeMode m) { return m == FreezeMode::kFull ? "full" : "connector_only"; }

inline ConnectorKind connector_kind_from_string(const std::string& s) {
  if (s == "linear") return ConnectorKind::kLinear;
  if (s == "self_attention" || s == "self-attention") return ConnectorKind::kSelfAttention;
  throw Error("unknown connector kind '" + s + "'");
}

inline FreezeMode freeze_mode_from_string(const std::string& s) {
  if (s == "full") return FreezeMode::kFull;
  if (s == "connector_only" || s == "connector-only") return FreezeMode::kConnectorOnly;
  throw Error("unknown freeze mode '" + s + "'");
}

struct ConnectorConfig {
  ConnectorKind kind = ConnectorKind::kLinear;
  int layers = 1;  // self-attention only
  int heads = 4;
  int d_ff = 256;
};

/// Maps ASR decoder states [L, d_asr] to MT encoder inputs [L, d_mt]: an
/// affine map, optionally followed by self-attention encoder layers.
template <class T>
class Connector {
 public:
  Connector(const ConnectorConfig& cfg, int d_in, int d_out, Rng& rng) : cfg_(cfg), d_in_(d_in), d_out_(d_out) {
    if (d_in <= 0 || d_out <= 0) throw Error("connector dimensions must be positive");
    if (cfg.kind == ConnectorKind::kSelfAttention) {
      if (cfg.layers < 1) {
        throw Error("self-attention connector needs at least one layer; choose the linear connector instead");
      }
      if (d_out % cfg.heads != 0) throw Error("connector heads must divide the MT d_model");
    }
    w_ = xavier_uniform<T>(std::size_t(d_in), std::size_t(d_out), rng);
    b_ = zeros_param<T>({std::size_t(d_out)});
    if (cfg.kind == ConnectorKind::kSelfAttention) {
      for (int i = 0; i < cfg.layers; ++i) layers_.push_back(EncoderLayer<T>::init(d_out, cfg.d_ff, cfg.heads, rng));
      norm_ = LayerNormParams<T>::init(d_out);
    }
  }

  const ConnectorConfig& config() const { return cfg_; }
  int input_dim() const { return d_in_; }
  int output_dim() const { return d_out_; }

  Tensor<T> forward(const Tensor<T>& h, const ForwardContext<T>& ctx = {}, double dropout = 0.0) const {
    if (h.rank() != 2 || h.dim(1) != std::size_t(d_in_)) {
      throw Error("connector expects [L, " + std::to_string(d_in_) + "], got " + shape_str(h.shape()));
    }
    auto x = add(matmul(h, w_), b_);
    if (layers_.empty()) return x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      x = layers_[i].forward(x, true, dropout, ctx, "connector." + std::to_string(i));
    }
    return (*norm_)(x);
  }

  void collect(const std::string& prefix, NamedParams<T>& out) const {
    out.emplace_back(prefix + ".weight", w_);
    out.emplace_back(prefix + ".bias", b_);
    for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i].collect(prefix + "." + std::to_string(i), out);
    if (norm_) norm_->collect(prefix + ".norm", out);
  }

 private:
  ConnectorConfig cfg_;
  int d_in_, d_out_;
  Tensor<T> w_, b_;
  std::vector<EncoderLayer<T>> layers_;
  std::optional<LayerNormParams<T>> norm_;
};

/// Speech → ASR → connector → MT, trained on asr_loss + λ·mt_loss.
template <class T>
class JointModel {
 public:
  JointModel(const ModelConfig& asr_cfg, ModelConfig mt_cfg, const ConnectorConfig& conn, Rng& rng)
      : asr(check_asr(asr_cfg), rng),
        connector(conn, asr_cfg.d_model, mt_cfg.d_model, rng),
        mt(continuous(mt_cfg), rng) {}

  SeqModel<T> asr;
  Connector<T> connector;
  SeqModel<T> mt;
  FreezeMode freeze = FreezeMode::kFull;
  bool pretrained = false;

  NamedParams<T> named_parameters() const {
    NamedParams<T> out;
    for (auto& [n, t] : asr.named_parameters()) out.emplace_back("asr." + n, t);
    connector.collect("connector", out);
    for (auto& [n, t] : mt.named_parameters()) out.emplace_back("mt." + n, t);
    return out;
  }

  std::vector<Tensor<T>> parameters() const {
    std::vector<Tensor<T>> out;
    for (auto& [n, t] : named_parameters()) out.push_back(t);
    return out;
  }

  /// Parameters the optimizer may touch under the freeze mode.
  std::vector<Tensor<T>> trainable_parameters() const {
    if (freeze == FreezeMode::kFull) return parameters();
    NamedParams<T> c;
    connector.collect("connector", c);
    std::vector<Tensor<T>> out;
    for (auto& [n, t] : c) out.push_back(t);
    return out;
  }

  std::size_t connector_parameter_count() const {
    NamedParams<T> c;
    connector.collect("connector", c);
    std::size_t n = 0;
    for (auto& [name, t] : c) n += t.numel();
    return n;
  }

  void zero_grad() const {
    for (auto [n, t] : named_parameters()) t.zero_grad();
  }

 private:
  static const ModelConfig& check_asr(const ModelConfig& c) {
    if (c.input_mode != InputMode::kSpeech) throw Error("joint model ASR side must take speech input");
    return c;
  }
  static ModelConfig continuous(ModelConfig c) {
    c.input_mode = InputMode::kContinuous;
    return c;
  }
};

template <class T>
struct JointLoss {
  LossSum<T> asr;
  LossSum<T> mt;
};

/// Teacher-forced joint forward. `source_ids` are the ASR targets and
/// `target_ids` the MT targets; the ASR decoder's final states (one per
/// source position, <eos> included) feed the connector.
template <class T>
JointLoss<T> joint_example_loss(const JointModel<T>& jm, const TrainExample& ex, double label_smoothing,
                                const ForwardContext<T>& asr_ctx = {}, const ForwardContext<T>& mt_ctx = {}) {
  if (!ex.features) throw Error("joint example needs features");
  auto memory = jm.asr.encode(*ex.features, asr_ctx);
  auto asr_out = jm.asr.decode(memory, teacher_inputs(ex.source_ids), asr_ctx);
  auto asr_loss = label_smoothed_nll_sum(asr_out.logits, ex.source_ids, label_smoothing, token::kPad);
  const double conn_drop = mt_ctx.dropout_rate(jm.mt.config().dropout);
  auto bridged = jm.connector.forward(asr_out.hidden, mt_ctx, conn_drop);
  auto mt_memory = jm.mt.encode_continuous(bridged, mt_ctx);
  auto mt_out = jm.mt.decode(mt_memory, teacher_inputs(ex.target_ids), mt_ctx);
  auto mt_loss = label_smoothed_nll_sum(mt_out.logits, ex.target_ids, label_smoothing, token::kPad);
  return {asr_loss, mt_loss};
}

/// Random streams of a joint run. The ASR streams coincide with those of
/// plain `train` under the same seed.
struct JointStreams {
  Rng asr_dropout, asr_embed, mt_dropout, mt_embed;
  explicit JointStreams(std::uint64_t seed)
      : asr_dropout(detail::derive_seed(seed, 2)),
        asr_embed(detail::derive_seed(seed, 3)),
        mt_dropout(detail::derive_seed(seed, 4)),
        mt_embed(detail::derive_seed(seed, 5)) {}
};

/// Accumulates the gradient of asr/N_asr + λ·mt/N_mt over one batch and
/// returns (loss sum, tokens) for the loss curve.
template <class T>
std::pair<double, std::size_t> joint_batch_gradients(const JointModel<T>& jm, const std::vector<TrainExample>& data,
                                                     std::span<const std::size_t> batch, const TrainConfig& cfg,
                                                     const ForwardContext<T>& asr_ctx,
                                                     const ForwardContext<T>& mt_ctx) {
  std::size_t asr_tokens = 0, mt_tokens = 0;
  for (auto i : batch) {
    asr_tokens += data[i].source_ids.size();
    mt_tokens += data[i].target_ids.size();
  }
  double asr_sum = 0.0, mt_sum = 0.0;
  const T lambda = T(cfg.mt_loss_weight);
  for (auto i : batch) {
    auto l = joint_example_loss(jm, data[i], cfg.label_smoothing, asr_ctx, mt_ctx);
    asr_sum += double(l.asr.total.item());
    mt_sum += double(l.mt.total.item());
    auto total = add(scale(l.asr.total, T(1.0 / double(asr_tokens))),
                     scale(l.mt.total, T(double(lambda) / double(mt_tokens))));
    backward(total);
  }
  const double per_token = asr_sum / double(asr_tokens) + cfg.mt_loss_weight * mt_sum / double(mt_tokens);
  return {per_token * double(asr_tokens), asr_tokens};
}

template <class T>
TrainResult train_joint(const JointModel<T>& jm, const std::vector<TrainExample>& data, const TrainConfig& cfg,
                        const EpochCallback& on_epoch = {}) {
  if (jm.freeze == FreezeMode::kConnectorOnly && !jm.pretrained) {
    throw Error("connector-only fine-tuning needs ASR and MT initialized from pretrained checkpoints");
  }
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < data.size(); ++i) {
    detail::validate_ids(data[i].source_ids, jm.asr.config().vocab_tgt, i, "source");
    detail::validate_ids(data[i].target_ids, jm.mt.config().vocab_tgt, i, "target");
    lengths.push_back(std::max(data[i].source_ids.size(), data[i].target_ids.size()));
  }
  JointStreams streams(cfg.seed);
  ForwardContext<T> asr_ctx, mt_ctx;
  asr_ctx.training = mt_ctx.training = true;
  asr_ctx.dropout_override = mt_ctx.dropout_override = cfg.dropout;
  asr_ctx.rng = &streams.asr_dropout;
  mt_ctx.rng = &streams.mt_dropout;
  asr_ctx.embedding_hook = detail::embedding_hook<T>(cfg, streams.asr_embed);
  mt_ctx.embedding_hook = detail::embedding_hook<T>(cfg, streams.mt_embed);
  auto step = [&](std::span<const std::size_t> batch) {
    jm.zero_grad();
    return joint_batch_gradients(jm, data, batch, cfg, asr_ctx, mt_ctx);
  };
  auto snap = [&] { return snapshot(jm.named_parameters()); };
  return detail::run_training(jm.trainable_parameters(), lengths, jm.mt.config().d_model, cfg, step, snap,
                              on_epoch);
}

/// Builds a joint model whose ASR and MT stacks are copied from pretrained
/// checkpoints. The MT source embedding is dropped; the connector is fresh.
template <class T>
JointModel<T> init_joint_from_pretrained(const Checkpoint& asr_ckpt, const ModelConfig& asr_cfg,
                                         const Checkpoint& mt_ckpt, const ModelConfig& mt_cfg,
                                         const ConnectorConfig& conn, Rng& rng) {
  JointModel<T> jm(asr_cfg, mt_cfg, conn, rng);
  load_parameters(jm.asr.named_parameters(), asr_ckpt, {}, "asr.");
  load_parameters(jm.mt.named_parameters(), mt_ckpt, {}, "mt.");
  jm.pretrained = true;
  return jm;
}

}  // namespace slt
