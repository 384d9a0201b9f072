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

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "slt/numcore/tensor.hpp"

namespace slt {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  EditCounts& operator+=(const EditCounts& o) {
    substitutions += o.substitutions;
    insertions += o.insertions;
    deletions += o.deletions;
    return *this;
  }
  bool operator==(const EditCounts&) const = default;
};

/// Unit-cost Levenshtein alignment. Among minimal paths the backtrace
/// prefers a match or substitution, then an insertion, then a deletion.
template <class Tok>
EditCounts edit_distance_alignment(const std::vector<Tok>& ref, const std::vector<Tok>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1), at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }
  EditCounts c;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++c.substitutions;
      --i, --j;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ++c.insertions;
      --j;
    } else {
      ++c.deletions;
      --i;
    }
  }
  return c;
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline std::vector<char> split_chars(const std::string& s) { return {s.begin(), s.end()}; }

struct ErrorRate {
  EditCounts counts;
  std::size_t reference_length = 0;

  double percent() const {
    if (reference_length == 0) throw Error("error rate undefined for an empty reference");
    return 100.0 * double(counts.errors()) / double(reference_length);
  }
};

/// Corpus word error rate over whitespace tokens.
inline ErrorRate word_errors(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  if (refs.size() != hyps.size()) throw Error("reference and hypothesis counts differ");
  ErrorRate r;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    auto rw = split_words(refs[k]);
    r.counts += edit_distance_alignment(rw, split_words(hyps[k]));
    r.reference_length += rw.size();
  }
  return r;
}

/// Corpus character error rate; spaces count as characters.
inline ErrorRate char_errors(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  if (refs.size() != hyps.size()) throw Error("reference and hypothesis counts differ");
  ErrorRate r;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    r.counts += edit_distance_alignment(split_chars(refs[k]), split_chars(hyps[k]));
    r.reference_length += refs[k].size();
  }
  return r;
}

struct BleuStats {
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  double score() const {
    if (hyp_len == 0) return 0.0;
    double log_sum = 0.0;
    for (int n = 0; n < 4; ++n) {
      if (matches[std::size_t(n)] == 0) return 0.0;
      log_sum += 0.25 * std::log(double(matches[std::size_t(n)]) / double(totals[std::size_t(n)]));
    }
    const double bp = std::min(1.0, std::exp(1.0 - double(ref_len) / double(hyp_len)));
    return 100.0 * bp * std::exp(log_sum);
  }
};

inline BleuStats bleu_stats(const std::vector<std::vector<std::string>>& refs,
                            const std::vector<std::vector<std::string>>& hyps) {
  if (refs.size() != hyps.size()) throw Error("reference and hypothesis counts differ");
  if (refs.empty()) throw Error("BLEU of an empty corpus is undefined");
  BleuStats s;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    s.hyp_len += hyps[k].size();
    s.ref_len += refs[k].size();
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<std::vector<std::string>, std::size_t> ref_counts, hyp_counts;
      for (std::size_t i = 0; i + n <= refs[k].size(); ++i)
        ++ref_counts[{refs[k].begin() + std::ptrdiff_t(i), refs[k].begin() + std::ptrdiff_t(i + n)}];
      for (std::size_t i = 0; i + n <= hyps[k].size(); ++i)
        ++hyp_counts[{hyps[k].begin() + std::ptrdiff_t(i), hyps[k].begin() + std::ptrdiff_t(i + n)}];
      for (const auto& [gram, c] : hyp_counts) {
        auto it = ref_counts.find(gram);
        s.matches[n - 1] += it == ref_counts.end() ? 0 : std::min(c, it->second);
        s.totals[n - 1] += c;
      }
    }
  }
  return s;
}

/// Corpus BLEU-4 over whitespace tokens, 0..100.
inline double corpus_bleu(const std::vector<std::vector<std::string>>& refs,
                          const std::vector<std::vector<std::string>>& hyps) {
  return bleu_stats(refs, hyps).score();
}

inline double corpus_bleu(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  std::vector<std::vector<std::string>> r, h;
  for (const auto& s : refs) r.push_back(split_words(s));
  for (const auto& s : hyps) h.push_back(split_words(s));
  return corpus_bleu(r, h);
}

struct EvalReport {
  double wer = 0.0;
  double cer = 0.0;
  double bleu = 0.0;
  EditCounts word_counts;
  std::size_t reference_words = 0;
  BleuStats bleu_components;
  std::size_t n_sentences = 0;
};

inline EvalReport evaluate(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  EvalReport r;
  auto w = word_errors(refs, hyps);
  r.word_counts = w.counts;
  r.reference_words = w.reference_length;
  r.wer = w.percent();
  r.cer = char_errors(refs, hyps).percent();
  std::vector<std::vector<std::string>> rt, ht;
  for (const auto& s : refs) rt.push_back(split_words(s));
  for (const auto& s : hyps) ht.push_back(split_words(s));
  r.bleu_components = bleu_stats(rt, ht);
  r.bleu = r.bleu_components.score();
  r.n_sentences = refs.size();
  return r;
}

}  // namespace slt
