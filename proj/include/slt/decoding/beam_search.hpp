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
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "slt/types.hpp"

namespace slt {

/// Next-token distribution for a prefix of emitted tokens (no <sos>).
using Scorer = std::function<StepOutput(std::span<const int> prefix)>;

struct Hypothesis {
  std::vector<int> tokens;  // emitted tokens; ends with <eos> when finished
  double logprob = 0.0;
  bool finished = false;
  // Decoder state that produced each emitted token (when recorded).
  std::vector<std::vector<float>> hidden_trace;
};

struct DecodeConfig {
  int beam = 10;
  double length_penalty_alpha = 1.0;
  double eos_gamma = 1.0;
  int max_len = 0;  // counts <eos>; must be set (see default_max_len helpers)
  int n_best = 1;
  std::vector<int> suppress;  // never expanded
  bool record_hidden = false;

  void validate() const {
    if (beam < 1) throw Error("beam must be >= 1");
    if (max_len < 1) throw Error("max_len must be >= 1");
    if (n_best < 1 || n_best > beam) throw Error("n_best must lie in [1, beam]");
    if (length_penalty_alpha < 0.0) throw Error("length penalty alpha must be >= 0");
    if (eos_gamma < 0.0) throw Error("eos gamma must be >= 0");
  }
};

inline double length_normalized_score(double logprob, std::size_t length, double alpha) {
  if (length < 1) throw Error("length_normalized_score: length must be >= 1");
  return alpha == 0.0 ? logprob : logprob / std::pow(double(length), alpha);
}

inline double normalized_score(const Hypothesis& h, double alpha) {
  return length_normalized_score(h.logprob, h.tokens.size(), alpha);
}

/// Descending score, then ascending token order.
inline bool ranks_before(double sa, const std::vector<int>& ta, double sb, const std::vector<int>& tb) {
  if (sa != sb) return sa > sb;
  return ta < tb;
}

namespace detail {

inline void check_distribution(const StepOutput& out, std::size_t vocab) {
  if (out.probs.empty()) throw Error("scorer returned an empty distribution");
  if (vocab != 0 && out.probs.size() != vocab) {
    throw Error("scorer vocabulary changed from " + std::to_string(vocab) + " to " + std::to_string(out.probs.size()));
  }
  if (out.probs.size() <= std::size_t(token::kEos)) throw Error("scorer vocabulary lacks <eos>");
  double s = 0.0;
  for (double p : out.probs) {
    if (!(p >= 0.0)) throw Error("scorer returned a negative or NaN probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-4) throw Error("scorer distribution sums to " + std::to_string(s) + ", not 1");
}

}  // namespace detail

/// Beam search. Each step ranks all one-token extensions of the live
/// prefixes by cumulative logprob and keeps the top `beam`. <eos> is a
/// candidate only when p(eos) >= gamma * p(best other token); kept <eos>
/// extensions move to the finished list and the rest stay live. Prefixes
/// reaching max_len - 1 tokens are closed with <eos>. The search stops
/// early once `beam` hypotheses have finished and no live prefix can
/// outscore the beam-th of them.
inline std::vector<Hypothesis> beam_search(const Scorer& scorer, const DecodeConfig& cfg) {
  cfg.validate();
  struct Candidate {
    std::size_t parent;
    int token;
    double logprob;
  };
  const double alpha = cfg.length_penalty_alpha;
  std::vector<Hypothesis> live(1), finished;
  std::vector<bool> suppressed;
  std::vector<StepOutput> outs;
  std::size_t vocab = 0;
  for (int len = 0; len < cfg.max_len && !live.empty(); ++len) {
    const bool forced = len == cfg.max_len - 1;
    outs.clear();
    std::vector<Candidate> cands;
    for (std::size_t h = 0; h < live.size(); ++h) {
      outs.push_back(scorer(live[h].tokens));
      const auto& p = outs.back().probs;
      detail::check_distribution(outs.back(), vocab);
      if (vocab == 0) {
        vocab = p.size();
        suppressed.assign(vocab, false);
        for (int s : cfg.suppress)
          if (s >= 0 && std::size_t(s) < vocab && s != token::kEos) suppressed[std::size_t(s)] = true;
      }
      double top = 0.0;
      for (std::size_t v = 0; v < vocab; ++v)
        if (int(v) != token::kEos && !suppressed[v]) top = std::max(top, p[v]);
      const double pe = p[std::size_t(token::kEos)];
      if (forced || top == 0.0 || pe >= cfg.eos_gamma * top) {
        const double lp = live[h].logprob + std::log(pe);
        if (forced || std::isfinite(lp)) cands.push_back({h, token::kEos, lp});
      }
      if (forced) continue;
      for (std::size_t v = 0; v < vocab; ++v) {
        if (int(v) == token::kEos || suppressed[v] || p[v] <= 0.0) continue;
        cands.push_back({h, int(v), live[h].logprob + std::log(p[v])});
      }
    }
    auto before = [&](const Candidate& a, const Candidate& b) {
      if (a.logprob != b.logprob) return a.logprob > b.logprob;
      const auto& ta = live[a.parent].tokens;
      const auto& tb = live[b.parent].tokens;
      if (ta != tb) return ta < tb;
      return a.token < b.token;
    };
    const std::size_t keep = std::min(cands.size(), std::size_t(cfg.beam));
    std::partial_sort(cands.begin(), cands.begin() + std::ptrdiff_t(keep), cands.end(), before);
    std::vector<Hypothesis> next;
    for (std::size_t c = 0; c < keep; ++c) {
      const auto& cand = cands[c];
      Hypothesis h;
      h.tokens = live[cand.parent].tokens;
      h.tokens.push_back(cand.token);
      h.logprob = cand.logprob;
      if (cfg.record_hidden) {
        h.hidden_trace = live[cand.parent].hidden_trace;
        h.hidden_trace.push_back(outs[cand.parent].hidden);
      }
      if (cand.token == token::kEos) {
        h.finished = true;
        finished.push_back(std::move(h));
      } else {
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
    if (finished.size() >= std::size_t(cfg.beam) && !live.empty()) {
      std::vector<double> scores;
      for (const auto& f : finished) scores.push_back(normalized_score(f, alpha));
      std::nth_element(scores.begin(), scores.begin() + (cfg.beam - 1), scores.end(), std::greater<>());
      const double kth = scores[std::size_t(cfg.beam - 1)];
      double best_live = -std::numeric_limits<double>::infinity();
      for (const auto& h : live) best_live = std::max(best_live, h.logprob);
      if (length_normalized_score(best_live, std::size_t(cfg.max_len), alpha) < kth) break;
    }
  }
  if (finished.empty()) throw Error("beam search produced no finished hypothesis");
  std::stable_sort(finished.begin(), finished.end(), [&](const Hypothesis& a, const Hypothesis& b) {
    return ranks_before(normalized_score(a, alpha), a.tokens, normalized_score(b, alpha), b.tokens);
  });
  if (finished.size() > std::size_t(cfg.n_best)) finished.resize(std::size_t(cfg.n_best));
  return finished;
}

/// Sum of log-probabilities the scorer assigns to `tokens` (forced decoding).
inline double sequence_logprob(const Scorer& scorer, std::span<const int> tokens) {
  double lp = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto out = scorer(tokens.first(i));
    detail::check_distribution(out, 0);
    lp += std::log(out.probs.at(std::size_t(tokens[i])));
  }
  return lp;
}

/// Averages member distributions in probability space. The decoder state
/// is taken from the first member.
inline Scorer ensemble_scorer(std::vector<Scorer> members) {
  if (members.empty()) throw Error("ensemble needs at least one member");
  if (members.size() == 1) return members.front();
  return [members = std::move(members)](std::span<const int> prefix) {
    StepOutput avg = members[0](prefix);
    for (std::size_t m = 1; m < members.size(); ++m) {
      auto out = members[m](prefix);
      if (out.probs.size() != avg.probs.size()) {
        throw Error("ensemble members disagree on vocabulary size (" + std::to_string(avg.probs.size()) + " vs " +
                    std::to_string(out.probs.size()) + ")");
      }
      for (std::size_t v = 0; v < avg.probs.size(); ++v) avg.probs[v] += out.probs[v];
    }
    for (auto& p : avg.probs) p /= double(members.size());
    return avg;
  };
}

}  // namespace slt
