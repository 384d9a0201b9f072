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
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "slt/numcore/init.hpp"
#include "slt/types.hpp"

namespace slt {

struct TextPair {
  std::string source;
  std::string target;
};

struct CorpusConfig {
  int alphabet_size = 12;
  int min_words = 3;
  int max_words = 8;
  int max_word_len = 1;
  /// Target letter for source letter i; empty means 'z' - i.
  std::string target_letters;

  void validate() const {
    if (alphabet_size < 4 || alphabet_size > 13) throw Error("alphabet size must lie in [4, 13]");
    if (min_words < 1 || max_words < min_words) throw Error("invalid sentence length range");
    if (max_word_len < 1) throw Error("max_word_len must be >= 1");
    if (!target_letters.empty()) {
      if (int(target_letters.size()) != alphabet_size) throw Error("target_letters must cover the alphabet");
      std::string seen;
      for (char c : target_letters) {
        if (seen.find(c) != std::string::npos) throw Error("target_letters is not a bijection");
        seen.push_back(c);
      }
    }
  }

  std::string source_alphabet() const {
    std::string s;
    for (int i = 0; i < alphabet_size; ++i) s.push_back(char('a' + i));
    return s;
  }
  std::string target_alphabet() const {
    if (!target_letters.empty()) return target_letters;
    std::string s;
    for (int i = 0; i < alphabet_size; ++i) s.push_back(char('z' - i));
    return s;
  }
};

/// Reverses word order and maps every letter through the bijection.
inline std::string toy_translate(const std::string& source, const CorpusConfig& cfg) {
  const std::string src = cfg.source_alphabet(), tgt = cfg.target_alphabet();
  std::vector<std::string> words;
  std::string cur;
  for (char c : source + " ") {
    if (c == ' ') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
      continue;
    }
    auto pos = src.find(c);
    if (pos == std::string::npos) throw Error(std::string("letter '") + c + "' outside source alphabet");
    cur.push_back(tgt[pos]);
  }
  std::string out;
  for (auto it = words.rbegin(); it != words.rend(); ++it) {
    if (!out.empty()) out.push_back(' ');
    out += *it;
  }
  return out;
}

inline std::vector<TextPair> gen_toy_corpus(std::uint64_t seed, int n, const CorpusConfig& cfg = {}) {
  cfg.validate();
  Rng rng(seed);
  std::uniform_int_distribution<int> n_words(cfg.min_words, cfg.max_words);
  std::uniform_int_distribution<int> word_len(1, cfg.max_word_len);
  std::uniform_int_distribution<int> letter(0, cfg.alphabet_size - 1);
  std::vector<TextPair> corpus;
  corpus.reserve(std::size_t(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    std::string src;
    for (int w = n_words(rng); w > 0; --w) {
      if (!src.empty()) src.push_back(' ');
      for (int l = word_len(rng); l > 0; --l) src.push_back(char('a' + letter(rng)));
    }
    corpus.push_back({src, toy_translate(src, cfg)});
  }
  return corpus;
}

struct FeatureConfig {
  int frames_per_token = 4;
  double noise_sd = 0.1;
  int feat_dim = 40;
};

/// Prototype for a token id. Fixed for the id, independent of any seed.
inline std::vector<float> token_prototype(int id, int feat_dim) {
  Rng rng(0x9e3779b97f4a7c15ULL ^ std::uint64_t(id) * 0x100000001b3ULL);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<float> p(static_cast<std::size_t>(feat_dim));
  for (auto& v : p) v = float(g(rng));
  return p;
}

/// Pseudo-speech for a token sequence: each token (trailing <eos> excluded)
/// yields frames_per_token noisy copies of its prototype.
inline FeatureSequence synth_features(std::span<const int> tokens, std::uint64_t seed,
                                      const FeatureConfig& cfg = {}) {
  if (cfg.frames_per_token < 1) throw Error("frames_per_token must be >= 1");
  if (cfg.feat_dim < 1) throw Error("feat_dim must be >= 1");
  std::size_t len = tokens.size();
  if (len > 0 && tokens[len - 1] == token::kEos) --len;
  if (len == 0) throw Error("synth_features: empty token sequence");
  const std::size_t fpt = std::size_t(cfg.frames_per_token), d = std::size_t(cfg.feat_dim);
  FeatureSequence out(len * fpt, d, std::vector<float>(len * fpt * d));
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < len; ++i) {
    const auto proto = token_prototype(tokens[i], cfg.feat_dim);
    for (std::size_t r = 0; r < fpt; ++r) {
      for (std::size_t f = 0; f < d; ++f) {
        out.at(i * fpt + r, f) = float(proto[f] + cfg.noise_sd * noise(rng));
      }
    }
  }
  return out;
}

/// Per-sequence mean/variance normalization (population variance). A
/// dimension with zero variance is only mean-shifted.
inline FeatureSequence cmvn(const FeatureSequence& x) {
  if (x.frames < 2) throw Error("cmvn needs at least 2 frames");
  FeatureSequence out = x;
  for (std::size_t f = 0; f < x.dim; ++f) {
    double mean = 0.0;
    for (std::size_t t = 0; t < x.frames; ++t) mean += x.at(t, f);
    mean /= double(x.frames);
    double var = 0.0;
    for (std::size_t t = 0; t < x.frames; ++t) var += (x.at(t, f) - mean) * (x.at(t, f) - mean);
    var /= double(x.frames);
    const double scale = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
    for (std::size_t t = 0; t < x.frames; ++t) {
      double v = (x.at(t, f) - mean) * scale;
      out.at(t, f) = float(var > 1e-12 ? v : 0.0);
    }
  }
  return out;
}

}  // namespace slt
