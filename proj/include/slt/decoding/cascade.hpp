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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slt/decoding/scorers.hpp"
#include "slt/tasks/tokenizer.hpp"

namespace slt {

enum class CascadeMode { kOneBest, kNBest, kRankedNBest };

inline std::string to_string(CascadeMode m) {
  switch (m) {
    case CascadeMode::kOneBest: return "one_best";
    case CascadeMode::kNBest: return "n_best";
    case CascadeMode::kRankedNBest: return "ranked_n_best";
  }
  return "?";
}

inline CascadeMode cascade_mode_from_string(const std::string& s) {
  if (s == "one_best") return CascadeMode::kOneBest;
  if (s == "n_best") return CascadeMode::kNBest;
  if (s == "ranked_n_best") return CascadeMode::kRankedNBest;
  throw Error("unknown cascade mode '" + s + "'");
}

struct CascadePair {
  Hypothesis asr;
  Hypothesis mt;
  double score = 0.0;  // ranking score under the cascade mode
};

struct CascadeResult {
  CascadePair best;
  std::vector<CascadePair> pairs;  // every scored pair, best first
  std::size_t skipped = 0;         // ASR hypotheses that gave no MT input
};

/// MT side for one ASR hypothesis; `max_len` 0 defers to the MT config.
struct MtInput {
  Scorer scorer;
  int max_len = 0;
};

using MtInputFactory = std::function<std::optional<MtInput>(const Hypothesis& asr)>;

/// Ranking score of a (z, y) pair: the ASR n-best ranking score of z plus
/// the MT score of y, each length-normalized with its own alpha. With both
/// alphas 0 this is log P(z|x) + log P(y|z).
inline double combined_score(const Hypothesis& asr, const Hypothesis& mt, double alpha_asr, double alpha_mt) {
  return normalized_score(asr, alpha_asr) + normalized_score(mt, alpha_mt);
}

/// Two-stage search. one_best translates the best usable ASR hypothesis;
/// n_best keeps the translation with the best MT-only score across the ASR
/// n-best; ranked_n_best ranks every (z, y) pair by combined_score.
inline CascadeResult cascade_search(const Scorer& asr, const MtInputFactory& mt_input, CascadeMode mode,
                                    const DecodeConfig& cfg_asr, const DecodeConfig& cfg_mt) {
  const auto asr_hyps = beam_search(asr, cfg_asr);
  const double alpha = cfg_mt.length_penalty_alpha;
  CascadeResult result;
  for (const auto& z : asr_hyps) {
    auto in = mt_input(z);
    if (!in) {
      ++result.skipped;
      continue;
    }
    DecodeConfig c = cfg_mt;
    if (in->max_len > 0) c.max_len = in->max_len;
    if (mode != CascadeMode::kRankedNBest) c.n_best = 1;
    for (auto& y : beam_search(in->scorer, c)) {
      const double s = mode == CascadeMode::kRankedNBest ? combined_score(z, y, cfg_asr.length_penalty_alpha, alpha)
                                                         : normalized_score(y, alpha);
      result.pairs.push_back({z, std::move(y), s});
    }
    if (mode == CascadeMode::kOneBest) break;
  }
  if (result.pairs.empty()) throw Error("cascade: every ASR hypothesis was empty");
  std::stable_sort(result.pairs.begin(), result.pairs.end(), [](const CascadePair& a, const CascadePair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.mt.tokens != b.mt.tokens) return a.mt.tokens < b.mt.tokens;
    return a.asr.tokens < b.asr.tokens;
  });
  result.best = result.pairs.front();
  return result;
}

/// Text-level bridge between an ASR vocabulary and an MT source tokenizer.
struct TextBridge {
  const Vocabulary* asr_vocab;
  const Vocabulary* mt_vocab;
  Granularity mt_granularity;

  /// MT source ids for an ASR hypothesis, or nothing if it spells no text.
  std::optional<std::vector<int>> operator()(const Hypothesis& z) const {
    const auto text = normalize_text(detokenize(z.tokens, *asr_vocab));
    if (text.empty()) return std::nullopt;
    return tokenize(text, mt_granularity, *mt_vocab);
  }
};

template <class T>
CascadeResult cascade_decode(const std::vector<const SeqModel<T>*>& asr_models,
                             const std::vector<const SeqModel<T>*>& mt_models, const TextBridge& bridge,
                             const FeatureSequence& x, CascadeMode mode, const DecodeConfig& cfg_asr,
                             const DecodeConfig& cfg_mt) {
  check_same_target_vocab(mt_models);
  auto factory = [&](const Hypothesis& z) -> std::optional<MtInput> {
    auto ids = bridge(z);
    if (!ids) return std::nullopt;
    return MtInput{text_scorer(mt_models, *ids), cfg_mt.max_len > 0 ? 0 : mt_max_len(*ids)};
  };
  return cascade_search(speech_scorer(asr_models, x), factory, mode, cfg_asr, cfg_mt);
}

template <class T>
CascadeResult cascade_decode(const SeqModel<T>& asr, const SeqModel<T>& mt, const TextBridge& bridge,
                             const FeatureSequence& x, CascadeMode mode, const DecodeConfig& cfg_asr,
                             const DecodeConfig& cfg_mt) {
  return cascade_decode<T>({&asr}, {&mt}, bridge, x, mode, cfg_asr, cfg_mt);
}

}  // namespace slt
