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

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "slt/metrics.hpp"
#include "slt/numcore/init.hpp"

namespace slt {
namespace {

using Words = std::vector<std::string>;

/// Plain recursive Levenshtein distance with memoization.
std::size_t reference_distance(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min({best, go(i + 1, j) + 1, go(i, j + 1) + 1});
    return memo[key] = best;
  };
  return go(0, 0);
}

std::vector<int> random_seq(Rng& rng, int max_len, int alphabet) {
  std::uniform_int_distribution<int> len(0, max_len), sym(0, alphabet - 1);
  std::vector<int> s(std::size_t(len(rng)));
  for (auto& x : s) x = sym(rng);
  return s;
}

TEST(EditDistanceTest, HandExamples) {
  EXPECT_EQ(edit_distance_alignment(Words{"a", "b"}, Words{"a", "b"}), EditCounts{});
  EXPECT_EQ(edit_distance_alignment(Words{"a", "b", "c"}, Words{"a", "x", "c"}), (EditCounts{1, 0, 0}));
  EXPECT_NEAR(word_errors({"a b c"}, {"a x c"}).percent(), 100.0 / 3.0, 1e-9);
  EXPECT_EQ(edit_distance_alignment(Words{"a", "b"}, Words{}), (EditCounts{0, 0, 2}));
  EXPECT_DOUBLE_EQ(word_errors({"a b"}, {""}).percent(), 100.0);
}

TEST(EditDistanceTest, TiesPreferSubstitutionThenInsertion) {
  // "a b" → "b a": two substitutions rather than an insertion and a deletion.
  EXPECT_EQ(edit_distance_alignment(Words{"a", "b"}, Words{"b", "a"}), (EditCounts{2, 0, 0}));
  EXPECT_EQ(edit_distance_alignment(Words{"a"}, Words{"b", "c"}), (EditCounts{1, 1, 0}));
  EXPECT_EQ(edit_distance_alignment(Words{"b", "c"}, Words{"a"}), (EditCounts{1, 0, 1}));
}

TEST(EditDistanceTest, MatchesRecursiveOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_seq(rng, 7, 3), b = random_seq(rng, 7, 3);
    auto c = edit_distance_alignment(a, b);
    EXPECT_EQ(c.errors(), reference_distance(a, b));
    EXPECT_EQ(std::ptrdiff_t(c.insertions) - std::ptrdiff_t(c.deletions), std::ptrdiff_t(b.size()) - std::ptrdiff_t(a.size()));
  }
}

TEST(EditDistanceTest, TriangleInequality) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_seq(rng, 5, 3), b = random_seq(rng, 5, 3), c = random_seq(rng, 5, 3);
    auto d = [](const auto& x, const auto& y) { return edit_distance_alignment(x, y).errors(); };
    EXPECT_LE(d(a, c), d(a, b) + d(b, c));
  }
}

TEST(WerTest, InvariantUnderSharedSuffix) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_seq(rng, 6, 4), b = random_seq(rng, 6, 4), s = random_seq(rng, 4, 4);
    auto a2 = a, b2 = b;
    a2.insert(a2.end(), s.begin(), s.end());
    b2.insert(b2.end(), s.begin(), s.end());
    EXPECT_EQ(edit_distance_alignment(a, b).errors(), edit_distance_alignment(a2, b2).errors());
  }
}

TEST(CerTest, SpacesAreCharacters) {
  auto r = char_errors({"a b"}, {"ab"});
  EXPECT_EQ(r.counts, (EditCounts{0, 0, 1}));
  EXPECT_NEAR(r.percent(), 100.0 / 3.0, 1e-9);
}

TEST(BleuTest, IdenticalCorpusScoresExactly100) {
  std::vector<std::string> refs = {"a b c d", "e f g h i", "z y x w v u"};
  EXPECT_EQ(corpus_bleu(refs, refs), 100.0);
}

TEST(BleuTest, NoOverlapScoresZero) {
  EXPECT_EQ(corpus_bleu(std::vector<std::string>{"a b c d"}, std::vector<std::string>{"e f g h"}), 0.0);
  // Unigram matches but no 4-gram match anywhere.
  EXPECT_EQ(corpus_bleu(std::vector<std::string>{"a b c d"}, std::vector<std::string>{"d c b a"}), 0.0);
}

TEST(BleuTest, HandCountedSentence) {
  auto s = bleu_stats({{"a", "b", "c", "d", "e"}}, {{"a", "b", "c", "d", "f"}});
  EXPECT_EQ(s.matches, (std::array<std::size_t, 4>{4, 3, 2, 1}));
  EXPECT_EQ(s.totals, (std::array<std::size_t, 4>{5, 4, 3, 2}));
  const double expect = 100.0 * std::pow(4.0 / 5 * 3.0 / 4 * 2.0 / 3 * 1.0 / 2, 0.25);
  EXPECT_NEAR(s.score(), expect, 1e-9);
  EXPECT_NEAR(s.score(), 66.87, 5e-3);
}

TEST(BleuTest, ClippingAndBrevityPenalty) {
  // "the the the the" against "the cat": unigram matches clip to 1.
  auto s = bleu_stats({{"the", "cat"}}, {{"the", "the", "the", "the"}});
  EXPECT_EQ(s.matches[0], 1u);
  EXPECT_EQ(s.totals[0], 4u);
  // Shorter hypothesis: BP = exp(1 - 6/5).
  auto t = bleu_stats({{"a", "b", "c", "d", "e", "f"}}, {{"a", "b", "c", "d", "e"}});
  EXPECT_NEAR(t.score(), 100.0 * std::exp(1.0 - 6.0 / 5.0), 1e-9);
}

TEST(BleuTest, PermutationInvariant) {
  std::vector<std::string> refs = {"a b c d e", "b c d e f g", "c d e a b", "e e d c b a"};
  std::vector<std::string> hyps = {"a b c d f", "b c d e g g", "c d e a", "e e d c b"};
  const double base = corpus_bleu(refs, hyps);
  std::vector<std::size_t> order = {2, 0, 3, 1};
  std::vector<std::string> r2, h2;
  for (auto i : order) {
    r2.push_back(refs[i]);
    h2.push_back(hyps[i]);
  }
  EXPECT_DOUBLE_EQ(corpus_bleu(r2, h2), base);
  EXPECT_GT(base, 0.0);
  EXPECT_LT(base, 100.0);
}

TEST(BleuTest, InvalidInputsRejected) {
  EXPECT_THROW(corpus_bleu(std::vector<std::string>{}, std::vector<std::string>{}), Error);
  EXPECT_THROW(corpus_bleu(std::vector<std::string>{"a"}, std::vector<std::string>{}), Error);
}

TEST(EvalReportTest, ComponentsConsistent) {
  auto r = evaluate({"a b c", "d e"}, {"a x c", "d e f"});
  EXPECT_EQ(r.n_sentences, 2u);
  EXPECT_EQ(r.reference_words, 5u);
  EXPECT_EQ(r.word_counts, (EditCounts{1, 1, 0}));
  EXPECT_DOUBLE_EQ(r.wer, 100.0 * 2 / 5);
  EXPECT_DOUBLE_EQ(r.bleu, r.bleu_components.score());
}

}  // namespace
}  // namespace slt
