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
#include "slt/tasks/corpus.hpp"
#include "slt/tasks/dataset.hpp"

namespace slt {

struct AugmentedCorpus {
  std::vector<TextPair> pairs;  // originals first, then hypothesis pairs in corpus order
  std::size_t skipped = 0;
};

/// Returns the recognized source text, or nothing when decoding failed.
using Recognizer = std::function<std::optional<std::string>(const ParallelExample&)>;

/// Union of (reference source → target) and (1-best ASR source → target).
inline AugmentedCorpus augment_with_hypotheses(const Dataset& corpus, const Recognizer& recognize) {
  AugmentedCorpus out;
  for (const auto& ex : corpus) out.pairs.push_back({ex.source_text, ex.target_text});
  for (const auto& ex : corpus) {
    std::optional<std::string> hyp;
    try {
      hyp = recognize(ex);
    } catch (const Error&) {
      hyp.reset();
    }
    if (!hyp || hyp->empty()) {
      ++out.skipped;
      continue;
    }
    out.pairs.push_back({*hyp, ex.target_text});
  }
  return out;
}

/// Recognizer backed by beam search over a speech model.
template <class T>
Recognizer asr_recognizer(const SeqModel<T>& asr, const Vocabulary& vocab, int beam, int frames_per_token,
                          double alpha = 1.0) {
  return [&asr, &vocab, beam, frames_per_token, alpha](const ParallelExample& ex) -> std::optional<std::string> {
    if (!ex.features) return std::nullopt;
    DecodeConfig cfg;
    cfg.beam = beam;
    cfg.length_penalty_alpha = alpha;
    cfg.max_len = asr_max_len(*ex.features, frames_per_token);
    cfg.suppress = model_suppress();
    auto best = beam_search(speech_scorer<T>({&asr}, *ex.features), cfg).front();
    return normalize_text(detokenize(best.tokens, vocab));
  };
}

}  // namespace slt
