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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "slt/tasks.hpp"

namespace slt {
namespace {

TEST(VocabularyTest, ReservedIdsAreFixed) {
  Vocabulary v;
  EXPECT_EQ(v.size(), 4);
  EXPECT_EQ(v.id("<pad>"), token::kPad);
  EXPECT_EQ(v.id("<unk>"), token::kUnk);
  EXPECT_EQ(v.id("<sos>"), token::kSos);
  EXPECT_EQ(v.id("<eos>"), token::kEos);
  EXPECT_EQ(v.add("a"), 4);
  EXPECT_EQ(v.add("a"), 4);
  EXPECT_EQ(v.id("q"), token::kUnk);
}

TEST(VocabularyTest, ValidateRejectsInteriorEos) {
  Vocabulary v = build_vocabulary("ab", Granularity::kChar);
  EXPECT_NO_THROW(validate_token_sequence(std::vector<int>{5, 6, token::kEos}, v));
  EXPECT_THROW(validate_token_sequence(std::vector<int>{5, token::kEos, 6}, v), Error);
  EXPECT_THROW(validate_token_sequence(std::vector<int>{99}, v), Error);
}

TEST(TokenizerTest, CharModeSplitsCharacters) {
  Vocabulary v = build_vocabulary("abc", Granularity::kChar);
  auto ids = tokenize("abc", Granularity::kChar, v);
  EXPECT_EQ(ids, (std::vector<int>{v.id("a"), v.id("b"), v.id("c"), token::kEos}));
}

TEST(TokenizerTest, SingleMergeFuses) {
  std::vector<MergeRule> merges = {{"a", "b"}};
  Vocabulary v = build_vocabulary("ab", Granularity::kSubword, merges);
  auto ids = tokenize("ab", Granularity::kSubword, v, merges);
  EXPECT_EQ(ids, (std::vector<int>{v.id("ab"), token::kEos}));
}

TEST(TokenizerTest, MergesApplyInTableOrder) {
  // "abc": applying (b,c) before (a,b) leaves a + bc.
  std::vector<MergeRule> merges = {{"b", "c"}, {"a", "b"}};
  auto units = segment("abc", Granularity::kSubword, merges);
  EXPECT_EQ(units, (std::vector<std::string>{"a", "bc"}));
  // Non-overlapping left-to-right scan within one pass.
  units = segment("aaa", Granularity::kSubword, {{"a", "a"}});
  EXPECT_EQ(units, (std::vector<std::string>{"aa", "a"}));
}

TEST(TokenizerTest, UnknownCharacterMapsToUnk) {
  Vocabulary v = build_vocabulary("ab", Granularity::kChar);
  auto ids = tokenize("a?", Granularity::kChar, v);
  EXPECT_EQ(ids[1], token::kUnk);
}

TEST(TokenizerTest, CommittedTableSize) {
  EXPECT_EQ(toy_merges().size(), 50u);
  auto units = segment("a b c", Granularity::kSubword);
  EXPECT_EQ(units, (std::vector<std::string>{"a ", "b ", "c"}));
}

TEST(TokenizerTest, RoundTripOnRandomStringsBothModes) {
  CorpusConfig cfg;
  cfg.max_word_len = 4;
  for (const std::string& alphabet : {cfg.source_alphabet(), cfg.target_alphabet()}) {
    for (auto mode : {Granularity::kChar, Granularity::kSubword}) {
      Vocabulary v = build_vocabulary(alphabet, mode);
      Rng rng(7);
      std::uniform_int_distribution<int> len(1, 30), pick(0, int(alphabet.size()));
      for (int trial = 0; trial < 100; ++trial) {
        std::string s;
        for (int i = len(rng); i > 0; --i) {
          int k = pick(rng);
          s.push_back(k == int(alphabet.size()) ? ' ' : alphabet[std::size_t(k)]);
        }
        auto ids = tokenize(s, mode, v);
        for (int id : ids) ASSERT_NE(id, token::kUnk);
        ASSERT_EQ(detokenize(ids, v), s) << to_string(mode);
      }
    }
  }
}

TEST(TokenizerTest, SubwordIsNeverLongerThanChar) {
  CorpusConfig cfg;
  auto corpus = gen_toy_corpus(3, 50, cfg);
  Vocabulary vc = build_vocabulary(cfg.source_alphabet(), Granularity::kChar);
  Vocabulary vs = build_vocabulary(cfg.source_alphabet(), Granularity::kSubword);
  std::size_t nc = 0, ns = 0;
  for (const auto& p : corpus) {
    nc += tokenize(p.source, Granularity::kChar, vc).size();
    ns += tokenize(p.source, Granularity::kSubword, vs).size();
  }
  EXPECT_LT(ns, nc);
}

TEST(TokenizerTest, NormalizeText) {
  EXPECT_EQ(normalize_text("  Hello, World!  "), "hello world");
  EXPECT_EQ(normalize_text("a b c"), "a b c");
}

TEST(CorpusTest, ToyTransductionExample) {
  CorpusConfig cfg;
  cfg.alphabet_size = 4;
  cfg.target_letters = "xyzw";
  EXPECT_EQ(toy_translate("a b c", cfg), "z y x");
}

TEST(CorpusTest, DeterministicAndLengthPreserving) {
  CorpusConfig cfg;
  auto a = gen_toy_corpus(11, 40, cfg), b = gen_toy_corpus(11, 40, cfg), c = gen_toy_corpus(12, 40, cfg);
  ASSERT_EQ(a.size(), 40u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].source, b[i].source);
    EXPECT_EQ(a[i].target, b[i].target);
    EXPECT_EQ(a[i].source.size(), a[i].target.size());
    differs |= a[i].source != c[i].source;
  }
  EXPECT_TRUE(differs);
}

TEST(CorpusTest, TargetRecoverableByReverseAndMap) {
  CorpusConfig cfg;
  cfg.max_word_len = 3;
  const std::string src = cfg.source_alphabet(), tgt = cfg.target_alphabet();
  for (const auto& p : gen_toy_corpus(5, 30, cfg)) {
    // Independent oracle: map letters, then reverse words by splitting.
    std::string mapped;
    for (char ch : p.source) mapped.push_back(ch == ' ' ? ' ' : tgt[src.find(ch)]);
    std::vector<std::string> words;
    std::size_t start = 0;
    while (start <= mapped.size()) {
      auto end = mapped.find(' ', start);
      if (end == std::string::npos) end = mapped.size();
      words.push_back(mapped.substr(start, end - start));
      start = end + 1;
    }
    std::string expect;
    for (std::size_t i = words.size(); i-- > 0;) expect += words[i] + (i ? " " : "");
    EXPECT_EQ(p.target, expect);
  }
}

TEST(CorpusTest, RejectsBadConfig) {
  CorpusConfig cfg;
  cfg.alphabet_size = 3;
  EXPECT_THROW(gen_toy_corpus(1, 1, cfg), Error);
  cfg.alphabet_size = 4;
  cfg.target_letters = "xxyz";
  EXPECT_THROW(gen_toy_corpus(1, 1, cfg), Error);
}

TEST(FeaturesTest, ZeroNoiseGivesPrototypes) {
  FeatureConfig fc;
  fc.noise_sd = 0.0;
  std::vector<int> ids = {4, 5, 6, 7, token::kEos};
  auto x = synth_features(ids, 1, fc);
  EXPECT_EQ(x.frames, 4u * 4u);
  EXPECT_EQ(x.dim, 40u);
  for (std::size_t i = 0; i < 4; ++i) {
    auto proto = token_prototype(ids[i], 40);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t f = 0; f < 40; ++f) EXPECT_EQ(x.at(i * 4 + r, f), proto[f]);
  }
}

TEST(FeaturesTest, SeedsDifferOnlyInNoise) {
  FeatureConfig fc;
  fc.noise_sd = 0.1;
  std::vector<int> ids = {4, 9, 5};
  auto a = synth_features(ids, 1, fc), b = synth_features(ids, 2, fc);
  // a - b is the difference of two independent N(0, sd^2) draws.
  double sq = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) sq += std::pow(a.values[k] - b.values[k], 2);
  double sd = std::sqrt(sq / double(a.values.size()));
  EXPECT_NEAR(sd, 0.1 * std::sqrt(2.0), 0.02);
  // Mean over each token's frames of both draws still sits on the prototype.
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto proto = token_prototype(ids[i], 40);
    double err = 0.0;
    for (std::size_t f = 0; f < 40; ++f) {
      double m = 0.0;
      for (std::size_t r = 0; r < 4; ++r) m += a.at(i * 4 + r, f) + b.at(i * 4 + r, f);
      err = std::max(err, std::abs(m / 8.0 - proto[f]));
    }
    EXPECT_LT(err, 0.2);
  }
}

TEST(FeaturesTest, RejectsZeroFramesPerToken) {
  FeatureConfig fc;
  fc.frames_per_token = 0;
  EXPECT_THROW(synth_features(std::vector<int>{4}, 1, fc), Error);
}

FeatureSequence random_features(std::size_t t, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<float> u(-3.f, 5.f);
  std::vector<float> v(t * d);
  for (auto& x : v) x = u(rng);
  return {t, d, v};
}

TEST(CmvnTest, ColumnStatistics) {
  auto y = cmvn(random_features(10, 3, 4));
  for (std::size_t f = 0; f < 3; ++f) {
    double m = 0.0, v = 0.0;
    for (std::size_t t = 0; t < 10; ++t) m += y.at(t, f);
    m /= 10.0;
    for (std::size_t t = 0; t < 10; ++t) v += (y.at(t, f) - m) * (y.at(t, f) - m);
    v /= 10.0;
    EXPECT_LT(std::abs(m), 1e-6);
    EXPECT_NEAR(v, 1.0, 1e-6);
  }
}

TEST(CmvnTest, IdempotentAndAffineInvariant) {
  auto x = random_features(12, 4, 9);
  auto y = cmvn(x);
  auto yy = cmvn(y);
  for (std::size_t k = 0; k < y.values.size(); ++k) EXPECT_NEAR(yy.values[k], y.values[k], 1e-6);
  FeatureSequence z = x;
  for (std::size_t t = 0; t < x.frames; ++t)
    for (std::size_t f = 0; f < x.dim; ++f) z.at(t, f) = 2.5f * x.at(t, f) + float(f) - 1.f;
  auto yz = cmvn(z);
  for (std::size_t k = 0; k < y.values.size(); ++k) EXPECT_NEAR(yz.values[k], y.values[k], 1e-5);
}

TEST(CmvnTest, ConstantDimensionBecomesZero) {
  auto x = random_features(6, 2, 1);
  for (std::size_t t = 0; t < 6; ++t) x.at(t, 1) = 4.25f;
  auto y = cmvn(x);
  for (std::size_t t = 0; t < 6; ++t) EXPECT_EQ(y.at(t, 1), 0.f);
  EXPECT_THROW(cmvn(random_features(1, 2, 1)), Error);
}

TEST(DatasetTest, JsonlRoundTrip) {
  CorpusConfig cfg;
  auto data = make_dataset(gen_toy_corpus(2, 5, cfg), 2, cfg);
  data[1].features.reset();
  auto path = (std::filesystem::temp_directory_path() / "slt_dataset_test.jsonl").string();
  write_dataset(path, data);
  auto back = read_dataset(path);
  std::remove(path.c_str());
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].id, data[i].id);
    EXPECT_EQ(back[i].source_text, data[i].source_text);
    EXPECT_EQ(back[i].target_text, data[i].target_text);
    ASSERT_EQ(back[i].features.has_value(), data[i].features.has_value());
    if (data[i].features) EXPECT_EQ(back[i].features->values, data[i].features->values);
  }
}

TEST(DatasetTest, MalformedRecordReportsLine) {
  auto path = (std::filesystem::temp_directory_path() / "slt_dataset_bad.jsonl").string();
  {
    std::ofstream out(path);
    out << R"({"source":"a","target":"z"})" << '\n' << R"({"source":"a"})" << '\n';
  }
  try {
    read_dataset(path);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::remove(path.c_str());
}

}  // namespace
}  // namespace slt
