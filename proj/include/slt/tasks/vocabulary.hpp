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
#include <string>
#include <unordered_map>
#include <vector>

#include "slt/types.hpp"

namespace slt {

/// Ordered token inventory. Ids 0..3 are <pad>, <unk>, <sos>, <eos>.
class Vocabulary {
 public:
  Vocabulary() {
    for (const char* t : {"<pad>", "<unk>", "<sos>", "<eos>"}) add(t);
  }

  explicit Vocabulary(std::span<const std::string> tokens) : Vocabulary() {
    for (const auto& t : tokens) add(t);
  }

  /// Appends `token` if new; returns its id either way.
  int add(const std::string& token) {
    auto [it, inserted] = index_.emplace(token, int(tokens_.size()));
    if (inserted) tokens_.push_back(token);
    return it->second;
  }

  int id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? token::kUnk : it->second;
  }
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  const std::string& token(int id) const { return tokens_.at(std::size_t(id)); }
  int size() const { return int(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// User tokens only (everything after the reserved block).
  std::vector<std::string> user_tokens() const {
    return {tokens_.begin() + token::kNumReserved, tokens_.end()};
  }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Checks id range and that <eos>, if present, is the final token.
inline void validate_token_sequence(std::span<const int> ids, const Vocabulary& vocab) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab.size()) {
      throw Error("token id " + std::to_string(ids[i]) + " outside vocabulary of " + std::to_string(vocab.size()));
    }
    if (ids[i] == token::kEos && i + 1 != ids.size()) throw Error("interior <eos> at position " + std::to_string(i));
  }
}

}  // namespace slt
