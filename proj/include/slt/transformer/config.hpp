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

#include "slt/numcore/tensor.hpp"

namespace slt {

enum class InputMode {
  kSpeech,      // conv frontend over feature frames
  kText,        // token embedding
  kContinuous,  // precomputed d_model vectors (joint model MT side)
};

inline std::string to_string(InputMode mode) {
  switch (mode) {
    case InputMode::kSpeech: return "speech";
    case InputMode::kText: return "text";
    case InputMode::kContinuous: return "continuous";
  }
  return "?";
}

inline InputMode input_mode_from_string(const std::string& s) {
  if (s == "speech") return InputMode::kSpeech;
  if (s == "text") return InputMode::kText;
  if (s == "continuous") return InputMode::kContinuous;
  throw Error("unknown input mode '" + s + "'");
}

struct ModelConfig {
  int n_enc_layers = 2;
  int n_dec_layers = 2;
  int d_model = 64;
  int d_ff = 256;
  int heads = 4;
  int vocab_src = 0;  // text mode only
  int vocab_tgt = 0;
  InputMode input_mode = InputMode::kText;
  int feat_dim = 40;       // speech mode only
  int conv_channels = 64;  // speech mode only
  double dropout = 0.1;    // residual and attention dropout
  double label_smoothing = 0.1;
  bool pre_norm = true;

  void validate() const {
    if (n_enc_layers < 0 || n_dec_layers < 0) throw Error("layer counts must be non-negative");
    if (d_model <= 0 || d_ff <= 0 || heads <= 0) throw Error("d_model, d_ff and heads must be positive");
    if (d_model % heads != 0) {
      throw Error("d_model " + std::to_string(d_model) + " not divisible by " +
                  std::to_string(heads) + " heads");
    }
    if (d_model % 2 != 0) throw Error("d_model must be even for positional encoding");
    if (vocab_tgt <= 0) throw Error("target vocabulary size must be positive");
    if (input_mode == InputMode::kText && vocab_src <= 0) throw Error("text input needs a source vocabulary");
    if (input_mode == InputMode::kSpeech && (feat_dim < 4 || conv_channels <= 0)) {
      throw Error("speech input needs feat_dim >= 4 and positive conv channels");
    }
    if (dropout < 0.0 || dropout >= 1.0) throw Error("dropout must lie in [0, 1)");
    if (label_smoothing < 0.0 || label_smoothing >= 1.0) throw Error("label smoothing must lie in [0, 1)");
  }
};

/// Large sizes, kept as presets; the desk-scale defaults live in the
/// experiment configuration.
namespace presets {

inline ModelConfig asr(int vocab_tgt, int feat_dim = 40) {
  ModelConfig c;
  c.n_enc_layers = 12;
  c.n_dec_layers = 6;
  c.d_model = 256;
  c.d_ff = 2048;
  c.heads = 4;
  c.vocab_tgt = vocab_tgt;
  c.input_mode = InputMode::kSpeech;
  c.feat_dim = feat_dim;
  return c;
}

inline ModelConfig mt(int vocab_src, int vocab_tgt) {
  ModelConfig c;
  c.n_enc_layers = 6;
  c.n_dec_layers = 6;
  c.d_model = 512;
  c.d_ff = 1024;
  c.heads = 8;
  c.vocab_src = vocab_src;
  c.vocab_tgt = vocab_tgt;
  c.input_mode = InputMode::kText;
  return c;
}

inline ModelConfig end_to_end(int vocab_tgt, int feat_dim = 40) {
  ModelConfig c = asr(vocab_tgt, feat_dim);
  return c;
}

}  // namespace presets

}  // namespace slt
