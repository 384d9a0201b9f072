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
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "slt/numcore.hpp"

namespace slt {

/// Boolean score mask; blocked(i, j) hides key j from query i.
struct AttentionMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<char> blocked;

  static AttentionMask causal(std::size_t n) {
    AttentionMask m{n, n, std::vector<char>(n * n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) m.blocked[i * n + j] = 1;
    }
    return m;
  }
  bool is_blocked(std::size_t i, std::size_t j) const { return blocked[i * cols + j] != 0; }
};

/// Captured attention weights, used by invariant checks.
struct AttentionRecord {
  std::string site;
  std::size_t head = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;
  std::vector<char> blocked;
};

template <class T>
class SeqModel;

enum class EmbeddingSide { kEncoder, kDecoder };

/// Per-call forward settings. Inference uses the default (no dropout).
template <class T>
struct ForwardContext {
  bool training = false;
  Rng* rng = nullptr;
  std::vector<AttentionRecord>* probe = nullptr;
  // Applied to raw token embeddings during training (embedding averaging).
  std::function<Tensor<T>(const Tensor<T>& embedded, const Tensor<T>& table, EmbeddingSide)>
      embedding_hook;
  // Replaces the model's configured dropout rate when non-negative.
  double dropout_override = -1.0;

  double dropout_rate(double configured) const { return dropout_override >= 0.0 ? dropout_override : configured; }
  bool dropout_active(double p) const { return training && rng != nullptr && p > 0.0; }
};

/// softmax(QKᵀ/√d_k + penalty)·V, where blocked positions get -inf.
template <class T>
Tensor<T> scaled_dot_attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                               const AttentionMask* mask = nullptr,
                               const ForwardContext<T>& ctx = {}, double attn_dropout = 0.0,
                               const std::string& site = "", std::size_t head = 0) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2) throw Error("attention expects matrices");
  if (q.dim(1) != k.dim(1)) detail::shape_mismatch("attention(Q,K)", q.shape(), k.shape());
  if (k.dim(0) != v.dim(0)) detail::shape_mismatch("attention(K,V)", k.shape(), v.shape());
  const std::size_t n = q.dim(0), m = k.dim(0);
  auto scores = scale(matmul_bt(q, k), T(1.0 / std::sqrt(double(q.dim(1)))));
  if (mask) {
    if (mask->rows != n || mask->cols != m) {
      detail::shape_mismatch("attention mask", scores.shape(), Shape{mask->rows, mask->cols});
    }
    std::vector<T> penalty(n * m, T(0));
    for (std::size_t i = 0; i < n; ++i) {
      bool any_open = false;
      for (std::size_t j = 0; j < m; ++j) {
        if (mask->is_blocked(i, j)) {
          penalty[i * m + j] = -std::numeric_limits<T>::infinity();
        } else {
          any_open = true;
        }
      }
      if (!any_open) throw Error("attention: query row " + std::to_string(i) + " has no unmasked key");
    }
    scores = add(scores, Tensor<T>({n, m}, std::move(penalty)));
  }
  auto weights = softmax(scores, 1);
  if (ctx.probe) {
    AttentionRecord rec{site, head, n, m, {}, {}};
    rec.weights.assign(weights.data().begin(), weights.data().end());
    if (mask) rec.blocked = mask->blocked;
    ctx.probe->push_back(std::move(rec));
  }
  if (ctx.dropout_active(attn_dropout)) weights = dropout(weights, attn_dropout, *ctx.rng);
  return matmul(weights, v);
}

/// Stacked projections: head l uses column block [l·d_k, (l+1)·d_k) of
/// wq, wk and wv, and row block l of wo.
template <class T>
struct AttentionParams {
  Tensor<T> wq, wk, wv, wo;
  int heads = 1;

  static AttentionParams init(int d_model, int heads, Rng& rng) {
    const auto d = std::size_t(d_model);
    return {xavier_uniform<T>(d, d, rng), xavier_uniform<T>(d, d, rng),
            xavier_uniform<T>(d, d, rng), xavier_uniform<T>(d, d, rng), heads};
  }

  void collect(const std::string& prefix, std::vector<std::pair<std::string, Tensor<T>>>& out) const {
    out.emplace_back(prefix + ".wq", wq);
    out.emplace_back(prefix + ".wk", wk);
    out.emplace_back(prefix + ".wv", wv);
    out.emplace_back(prefix + ".wo", wo);
  }
};

/// Concat[head_1..head_h]·W_O with head_l = Attention(x_q W_q^l, x_kv W_k^l, x_kv W_v^l).
template <class T>
Tensor<T> multi_head_attention(const Tensor<T>& x_q, const Tensor<T>& x_kv, const AttentionParams<T>& p,
                               const AttentionMask* mask = nullptr, const ForwardContext<T>& ctx = {},
                               double attn_dropout = 0.0, const std::string& site = "") {
  const std::size_t d = p.wq.dim(0);
  if (x_q.rank() != 2 || x_q.dim(1) != d) detail::shape_mismatch("multi_head_attention(x_q)", x_q.shape(), p.wq.shape());
  if (x_kv.rank() != 2 || x_kv.dim(1) != d) detail::shape_mismatch("multi_head_attention(x_kv)", x_kv.shape(), p.wk.shape());
  const std::size_t h = std::size_t(p.heads);
  if (d % h != 0) throw Error("multi_head_attention: d_model not divisible by head count");
  const std::size_t dk = d / h;
  auto q = matmul(x_q, p.wq);
  auto k = matmul(x_kv, p.wk);
  auto v = matmul(x_kv, p.wv);
  if (h == 1) return matmul(scaled_dot_attention(q, k, v, mask, ctx, attn_dropout, site, 0), p.wo);
  std::vector<Tensor<T>> heads;
  heads.reserve(h);
  for (std::size_t l = 0; l < h; ++l) {
    heads.push_back(scaled_dot_attention(slice(q, 1, l * dk, dk), slice(k, 1, l * dk, dk),
                                         slice(v, 1, l * dk, dk), mask, ctx, attn_dropout, site, l));
  }
  return matmul(concat(heads, 1), p.wo);
}

}  // namespace slt
