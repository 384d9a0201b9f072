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

#include <span>
#include <vector>

#include "slt/decoding/beam_search.hpp"
#include "slt/transformer/model.hpp"

namespace slt {

/// Tokens no model decoder should emit.
inline std::vector<int> model_suppress() { return {token::kPad, token::kUnk, token::kSos}; }

inline int asr_max_len(const FeatureSequence& x, int frames_per_token) {
  if (frames_per_token < 1) throw Error("frames_per_token must be >= 1");
  return int(x.frames) / frames_per_token + 10;
}

/// `source_ids` may end with <eos>, which is not counted.
inline int mt_max_len(std::span<const int> source_ids) {
  std::size_t n = source_ids.size();
  if (n > 0 && source_ids[n - 1] == token::kEos) --n;
  return 2 * int(n) + 10;
}

template <class T>
Scorer model_scorer(const SeqModel<T>& model, Tensor<T> memory) {
  return [&model, memory = std::move(memory)](std::span<const int> prefix) {
    std::vector<int> in{token::kSos};
    in.insert(in.end(), prefix.begin(), prefix.end());
    return model.decode_step(memory, in);
  };
}

template <class T>
void check_same_target_vocab(const std::vector<const SeqModel<T>*>& models) {
  if (models.empty()) throw Error("no models given");
  for (const auto* m : models) {
    if (m->config().vocab_tgt != models[0]->config().vocab_tgt) {
      throw Error("ensemble members disagree on target vocabulary (" + std::to_string(models[0]->config().vocab_tgt) +
                  " vs " + std::to_string(m->config().vocab_tgt) + ")");
    }
  }
}

template <class T>
Scorer speech_scorer(const std::vector<const SeqModel<T>*>& models, const FeatureSequence& x) {
  check_same_target_vocab(models);
  std::vector<Scorer> members;
  NoGradGuard guard;
  for (const auto* m : models) members.push_back(model_scorer(*m, m->encode(x)));
  return ensemble_scorer(std::move(members));
}

template <class T>
Scorer text_scorer(const std::vector<const SeqModel<T>*>& models, std::span<const int> source_ids) {
  check_same_target_vocab(models);
  std::vector<Scorer> members;
  NoGradGuard guard;
  for (const auto* m : models) members.push_back(model_scorer(*m, m->encode(source_ids)));
  return ensemble_scorer(std::move(members));
}

/// Decoder states [n, d] for `tokens` under teacher forcing: row i is the
/// state that predicts tokens[i].
template <class T>
Tensor<T> forced_hidden(const SeqModel<T>& model, const Tensor<T>& memory, std::span<const int> tokens) {
  if (tokens.empty()) throw Error("forced_hidden: empty token sequence");
  NoGradGuard guard;
  std::vector<int> in{token::kSos};
  in.insert(in.end(), tokens.begin(), tokens.end() - 1);
  return model.decode(memory, in).hidden;
}

}  // namespace slt
