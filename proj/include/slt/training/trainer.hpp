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
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "slt/numcore.hpp"
#include "slt/training/checkpoint.hpp"
#include "slt/transformer.hpp"

namespace slt {

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_target_units = 150;
  std::int64_t warmup = 200;
  double k = 0.3;
  double label_smoothing = 0.1;
  double dropout = 0.1;
  std::uint64_t seed = 1;
  int average_last = 5;
  double mt_loss_weight = 1.0;
  double max_grad_norm = 0.0;  // 0 disables clipping
  double embed_avg_rate = 0.0;
  bool embed_avg_encoder = true;
  bool embed_avg_decoder = true;

  void validate() const {
    if (epochs < 0) throw Error("epochs must be >= 0");
    if (batch_target_units < 1) throw Error("batch_target_units must be >= 1");
    if (warmup < 1) throw Error("warmup must be >= 1");
    if (k <= 0.0) throw Error("k must be positive");
    if (label_smoothing < 0.0 || label_smoothing >= 1.0) throw Error("label_smoothing must lie in [0, 1)");
    if (dropout < 0.0 || dropout >= 1.0) throw Error("dropout must lie in [0, 1)");
    if (average_last < 1) throw Error("average_last must be >= 1");
    if (mt_loss_weight < 0.0) throw Error("mt_loss_weight must be >= 0");
    if (max_grad_norm < 0.0) throw Error("max_grad_norm must be >= 0");
    if (embed_avg_rate < 0.0 || embed_avg_rate > 1.0) throw Error("embed_avg_rate must lie in [0, 1]");
  }
};

/// Partitions example indices into batches. Examples are visited in
/// ascending length order (ties by index) and a batch grows while
/// longest_length × count stays within `budget`.
inline std::vector<std::vector<std::size_t>> make_batches(std::span<const std::size_t> lengths,
                                                          std::size_t budget) {
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] > budget) {
      throw Error("example " + std::to_string(i) + " has " + std::to_string(lengths[i]) +
                  " target units, more than the batch budget of " + std::to_string(budget));
    }
  }
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return lengths[a] < lengths[b]; });
  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::size_t> cur;
  std::size_t longest = 0;
  for (auto idx : order) {
    const std::size_t grown = std::max(longest, lengths[idx]);
    if (!cur.empty() && grown * (cur.size() + 1) > budget) {
      batches.push_back(std::move(cur));
      cur.clear();
      longest = 0;
    }
    cur.push_back(idx);
    longest = std::max(longest, lengths[idx]);
  }
  if (!cur.empty()) batches.push_back(std::move(cur));
  return batches;
}

/// Each row is independently chosen with probability `rate` and replaced by
/// the mean of itself and a uniformly drawn row of `table`.
template <class T>
Tensor<T> embedding_average_augment(const Tensor<T>& embedded, const Tensor<T>& table, double rate, Rng& rng) {
  if (rate < 0.0 || rate > 1.0) throw Error("embedding_average_augment: rate must lie in [0, 1]");
  if (rate == 0.0) return embedded;
  std::bernoulli_distribution pick(rate);
  std::uniform_int_distribution<int> row(0, int(table.dim(0)) - 1);
  std::vector<std::pair<std::size_t, int>> chosen;
  for (std::size_t i = 0; i < embedded.dim(0); ++i) {
    if (pick(rng)) chosen.emplace_back(i, row(rng));
  }
  if (chosen.empty()) return embedded;
  return average_rows_with(embedded, table, std::move(chosen));
}

/// One supervised pair. Exactly one of `features` / `source_ids` feeds the
/// encoder, matching the model's input mode. Targets end with <eos>.
struct TrainExample {
  std::optional<FeatureSequence> features;
  std::vector<int> source_ids;
  std::vector<int> target_ids;
};

struct LossPoint {
  std::int64_t step;
  double loss;   // per-token loss of the batch
  double lrate;
};

struct TrainIssue {
  int epoch;
  std::size_t batch;
  std::string what;
};

struct TrainResult {
  std::vector<Checkpoint> checkpoints;  // one per finished epoch
  std::vector<LossPoint> curve;
  std::vector<double> epoch_loss;  // token-weighted mean per epoch
  std::vector<TrainIssue> issues;
  std::int64_t steps = 0;

  /// Mean of the last `n` epoch checkpoints.
  Checkpoint averaged(int n) const {
    if (checkpoints.empty()) throw Error("no checkpoints to average");
    const std::size_t take = std::min<std::size_t>(std::size_t(std::max(n, 1)), checkpoints.size());
    return average_checkpoints({checkpoints.end() - std::ptrdiff_t(take), checkpoints.end()});
  }
};

/// Called after each epoch's checkpoint is taken.
using EpochCallback = std::function<void(int epoch, const TrainResult&)>;

inline std::string loss_curve_csv(const std::vector<LossPoint>& curve) {
  std::string out = "step,loss,lrate\n";
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g\n", static_cast<long long>(p.step), p.loss, p.lrate);
    out += buf;
  }
  return out;
}

/// Scales all gradients so their joint L2 norm is at most `max_norm`.
template <class T>
void clip_grad_norm(std::span<Tensor<T>> params, double max_norm) {
  double sq = 0.0;
  for (auto& p : params)
    for (T g : p.grad()) sq += double(g) * double(g);
  const double norm = std::sqrt(sq);
  if (!(norm > max_norm) || !std::isfinite(norm)) return;
  const double f = max_norm / norm;
  for (auto& p : params)
    for (auto& g : p.mutable_grad()) g = T(double(g) * f);
}

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[0]) << 32) | words[1];
}

/// Shared epoch/batch loop. `batch_step(batch)` must accumulate gradients
/// into `params` and return (loss sum, tokens); `snap()` captures a
/// checkpoint after each epoch.
template <class T, class BatchStep, class Snapshot>
TrainResult run_training(std::vector<Tensor<T>> params, std::span<const std::size_t> lengths, int d_model,
                         const TrainConfig& cfg, BatchStep&& batch_step, Snapshot&& snap,
                         const EpochCallback& on_epoch) {
  cfg.validate();
  TrainResult result;
  if (cfg.epochs == 0 || lengths.empty()) return result;
  auto batches = make_batches(lengths, cfg.batch_target_units);
  Rng shuffle_rng(derive_seed(cfg.seed, 1));
  AdamState<T> adam;
  const ScheduleConfig sched{cfg.k, d_model, cfg.warmup};
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(batches.begin(), batches.end(), shuffle_rng);
    double epoch_sum = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      for (auto& p : params) p.zero_grad();
      auto [loss_sum, tokens] = batch_step(std::span<const std::size_t>(batches[b]));
      if (!std::isfinite(loss_sum)) {
        result.issues.push_back({epoch, b, "non-finite loss"});
        break;
      }
      if (cfg.max_grad_norm > 0.0) clip_grad_norm(std::span<Tensor<T>>(params), cfg.max_grad_norm);
      const std::int64_t step = result.steps + 1;
      const double lr = noam_lrate(step, sched);
      if (adam_update(std::span<Tensor<T>>(params), adam, lr) == UpdateStatus::kRejectedNonFinite) {
        result.issues.push_back({epoch, b, "non-finite gradient"});
        break;
      }
      result.steps = step;
      result.curve.push_back({step, loss_sum / double(tokens), lr});
      epoch_sum += loss_sum;
      epoch_tokens += tokens;
    }
    result.epoch_loss.push_back(epoch_tokens ? epoch_sum / double(epoch_tokens)
                                             : std::numeric_limits<double>::quiet_NaN());
    result.checkpoints.push_back(snap());
    if (on_epoch) on_epoch(epoch, result);
  }
  return result;
}

template <class T>
std::function<Tensor<T>(const Tensor<T>&, const Tensor<T>&, EmbeddingSide)> embedding_hook(
    const TrainConfig& cfg, Rng& rng) {
  if (cfg.embed_avg_rate <= 0.0) return {};
  return [&rng, rate = cfg.embed_avg_rate, enc = cfg.embed_avg_encoder, dec = cfg.embed_avg_decoder](
             const Tensor<T>& e, const Tensor<T>& table, EmbeddingSide side) {
    const bool on = side == EmbeddingSide::kEncoder ? enc : dec;
    return on ? embedding_average_augment(e, table, rate, rng) : e;
  };
}

inline void validate_ids(std::span<const int> ids, int vocab, std::size_t example, const char* side) {
  for (int id : ids) {
    if (id < 0 || id >= vocab) {
      throw Error("example " + std::to_string(example) + ": " + side + " id " + std::to_string(id) +
                  " outside model vocabulary of " + std::to_string(vocab));
    }
  }
}

}  // namespace detail

/// Decoder input for a target sequence ending in <eos>: <sos> + target[:-1].
inline std::vector<int> teacher_inputs(std::span<const int> target) {
  if (target.empty() || target.back() != token::kEos) throw Error("target sequence must end with <eos>");
  std::vector<int> in{token::kSos};
  in.insert(in.end(), target.begin(), target.end() - 1);
  return in;
}

/// Smoothed loss sum and token count for one example.
template <class T>
LossSum<T> example_loss(const SeqModel<T>& model, const TrainExample& ex, double label_smoothing,
                        const ForwardContext<T>& ctx = {}) {
  Tensor<T> memory;
  switch (model.config().input_mode) {
    case InputMode::kSpeech:
      if (!ex.features) throw Error("speech model needs features");
      memory = model.encode(*ex.features, ctx);
      break;
    case InputMode::kText:
      memory = model.encode(std::span<const int>(ex.source_ids), ctx);
      break;
    case InputMode::kContinuous:
      throw Error("continuous-input models train inside a joint model");
  }
  auto out = model.decode(memory, teacher_inputs(ex.target_ids), ctx);
  return label_smoothed_nll_sum(out.logits, ex.target_ids, label_smoothing, token::kPad);
}

/// Teacher-forced training with one ADAM step per batch at
/// noam_lrate(global step). Batch gradients are per-token means.
template <class T>
TrainResult train(const SeqModel<T>& model, const std::vector<TrainExample>& data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {}) {
  const int vsrc = model.config().vocab_src, vtgt = model.config().vocab_tgt;
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < data.size(); ++i) {
    detail::validate_ids(data[i].target_ids, vtgt, i, "target");
    if (model.config().input_mode == InputMode::kText) detail::validate_ids(data[i].source_ids, vsrc, i, "source");
    lengths.push_back(data[i].target_ids.size());
  }
  Rng dropout_rng(detail::derive_seed(cfg.seed, 2));
  Rng embed_rng(detail::derive_seed(cfg.seed, 3));
  ForwardContext<T> ctx;
  ctx.training = true;
  ctx.rng = &dropout_rng;
  ctx.dropout_override = cfg.dropout;
  ctx.embedding_hook = detail::embedding_hook<T>(cfg, embed_rng);
  auto step = [&](std::span<const std::size_t> batch) {
    std::size_t tokens = 0;
    for (auto i : batch) tokens += data[i].target_ids.size();
    double total = 0.0;
    for (auto i : batch) {
      auto l = example_loss(model, data[i], cfg.label_smoothing, ctx);
      total += double(l.total.item());
      backward(scale(l.total, T(1.0 / double(tokens))));
    }
    return std::pair<double, std::size_t>{total, tokens};
  };
  auto snap = [&] { return snapshot(model.named_parameters()); };
  return detail::run_training(model.parameters(), lengths, model.config().d_model, cfg, step, snap,
                              on_epoch);
}

}  // namespace slt
