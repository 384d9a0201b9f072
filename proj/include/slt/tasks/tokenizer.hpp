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
#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "slt/tasks/vocabulary.hpp"

namespace slt {

enum class Granularity { kChar, kSubword };

inline std::string to_string(Granularity g) { return g == Granularity::kChar ? "char" : "subword"; }

inline Granularity granularity_from_string(const std::string& s) {
  if (s == "char") return Granularity::kChar;
  if (s == "subword" || s == "bpe") return Granularity::kSubword;
  throw Error("unknown granularity '" + s + "'");
}

using MergeRule = std::pair<std::string, std::string>;

/// Committed toy merge table, applied in order. Word-final letters fuse with
/// the following space first, then frequent letter pairs of both alphabets.
inline const std::vector<MergeRule>& toy_merges() {
  static const std::vector<MergeRule> table = [] {
    std::vector<MergeRule> m;
    for (char c = 'a'; c <= 'l'; ++c) m.emplace_back(std::string(1, c), " ");
    for (char c = 'z'; c >= 'o'; --c) m.emplace_back(std::string(1, c), " ");
    for (const char* p : {"ab", "cd", "ef", "gh", "ij", "kl", "ba", "dc", "fe", "hg", "ji", "lk", "ac",
                          "zy", "xw", "vu", "ts", "rq", "po", "yz", "wx", "uv", "st", "qr", "op", "zx"}) {
      m.emplace_back(std::string(1, p[0]), std::string(1, p[1]));
    }
    return m;
  }();
  return table;
}

/// Lowercases and drops punctuation, collapsing runs of whitespace.
inline std::string normalize_text(const std::string& text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (std::ispunct(c)) continue;
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(char(std::tolower(c)));
  }
  return out;
}

/// Splits into characters, then (subword mode) applies each merge in table
/// order with a left-to-right scan. Returns the units without <eos>.
inline std::vector<std::string> segment(const std::string& text, Granularity mode,
                                        const std::vector<MergeRule>& merges = toy_merges()) {
  std::vector<std::string> units;
  for (char c : text) units.emplace_back(1, c);
  if (mode == Granularity::kChar) return units;
  for (const auto& [left, right] : merges) {
    std::vector<std::string> next;
    next.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (i + 1 < units.size() && units[i] == left && units[i + 1] == right) {
        next.push_back(left + right);
        ++i;
      } else {
        next.push_back(units[i]);
      }
    }
    units = std::move(next);
  }
  return units;
}

/// Token ids for `text` followed by <eos>. Units missing from the
/// vocabulary map to <unk>.
inline std::vector<int> tokenize(const std::string& text, Granularity mode, const Vocabulary& vocab,
                                 const std::vector<MergeRule>& merges = toy_merges()) {
  if (text.empty()) throw Error("tokenize: empty text");
  std::vector<int> ids;
  for (const auto& unit : segment(text, mode, merges)) ids.push_back(vocab.id(unit));
  ids.push_back(token::kEos);
  return ids;
}

/// Concatenates unit strings up to the first <eos>; <pad> and <sos> vanish.
inline std::string detokenize(std::span<const int> ids, const Vocabulary& vocab) {
  std::string text;
  for (int id : ids) {
    if (id == token::kEos) break;
    if (id == token::kPad || id == token::kSos) continue;
    text += vocab.token(id);
  }
  return text;
}

/// Vocabulary over `alphabet` (plus space); subword mode adds every merge
/// product spelled only with those characters.
inline Vocabulary build_vocabulary(const std::string& alphabet, Granularity mode,
                                   const std::vector<MergeRule>& merges = toy_merges()) {
  Vocabulary v;
  v.add(" ");
  for (char c : alphabet) v.add(std::string(1, c));
  if (mode == Granularity::kSubword) {
    auto inside = [&](const std::string& s) {
      for (char c : s)
        if (c != ' ' && alphabet.find(c) == std::string::npos) return false;
      return true;
    };
    for (const auto& [l, r] : merges) {
      if (inside(l + r)) v.add(l + r);
    }
  }
  return v;
}

}  // namespace slt
