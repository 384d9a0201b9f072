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

#include <vector>

#include "slt/decoding/cascade.hpp"
#include "slt/training/joint.hpp"

namespace slt {

/// Connector + MT encoder memory for an ASR decoder-state trace.
template <class T>
Tensor<T> bridge_memory(const JointModel<T>& jm, const Tensor<T>& trace) {
  NoGradGuard guard;
  return jm.mt.encode_continuous(jm.connector.forward(trace));
}

template <class T>
Tensor<T> trace_tensor(const Hypothesis& z, std::size_t d_model) {
  if (z.hidden_trace.empty() || z.hidden_trace.size() != z.tokens.size()) {
    throw Error("joint decoding needs the ASR hidden trace of every emitted token");
  }
  std::vector<T> flat;
  for (const auto& h : z.hidden_trace) {
    if (h.size() != d_model) throw Error("hidden trace width differs from the ASR d_model");
    flat.insert(flat.end(), h.begin(), h.end());
  }
  return Tensor<T>({z.tokens.size(), d_model}, std::move(flat));
}

/// ASR n-best with recorded decoder states; each trace is bridged into the
/// MT stack and decoded; pairs are ranked by combined_score. The ASR search
/// ensembles `asr_members`; MT scoring ensembles `mt_members`, each bridging
/// its own ASR decoder's states for the shared hypothesis (the recorded
/// trace serves the first ASR member).
template <class T>
CascadeResult joint_decode(const std::vector<const JointModel<T>*>& asr_members,
                           const std::vector<const JointModel<T>*>& mt_members, const FeatureSequence& x,
                           DecodeConfig cfg_asr, const DecodeConfig& cfg_mt) {
  if (asr_members.empty() || mt_members.empty()) throw Error("joint decoding needs at least one model per side");
  std::vector<const SeqModel<T>*> asr_models, mt_models;
  for (const auto* jm : asr_members) asr_models.push_back(&jm->asr);
  for (const auto* jm : mt_members) mt_models.push_back(&jm->mt);
  check_same_target_vocab(asr_models);
  check_same_target_vocab(mt_models);
  std::vector<Tensor<T>> asr_memory;
  {
    NoGradGuard guard;
    for (const auto* jm : mt_members) asr_memory.push_back(jm->asr.encode(x));
  }
  cfg_asr.record_hidden = true;
  auto factory = [&](const Hypothesis& z) -> std::optional<MtInput> {
    std::vector<Scorer> members;
    for (std::size_t m = 0; m < mt_members.size(); ++m) {
      const auto& jm = *mt_members[m];
      Tensor<T> trace = &jm == asr_members[0]
                            ? trace_tensor<T>(z, std::size_t(jm.asr.config().d_model))
                            : forced_hidden(jm.asr, asr_memory[m], z.tokens);
      members.push_back(model_scorer(jm.mt, bridge_memory(jm, trace)));
    }
    return MtInput{ensemble_scorer(std::move(members)), cfg_mt.max_len > 0 ? 0 : mt_max_len(z.tokens)};
  };
  return cascade_search(speech_scorer(asr_models, x), factory, CascadeMode::kRankedNBest, cfg_asr, cfg_mt);
}

template <class T>
CascadeResult joint_decode(const JointModel<T>& jm, const FeatureSequence& x, const DecodeConfig& cfg_asr,
                           const DecodeConfig& cfg_mt) {
  return joint_decode<T>({&jm}, {&jm}, x, cfg_asr, cfg_mt);
}

}  // namespace slt
