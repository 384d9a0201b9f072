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
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slt/tasks/corpus.hpp"
#include "slt/tasks/tokenizer.hpp"

namespace slt {

struct ParallelExample {
  std::string id;
  std::string source_text;
  std::string target_text;
  std::optional<FeatureSequence> features;
};

using Dataset = std::vector<ParallelExample>;

/// Attaches CMVN-normalized pseudo-speech to each pair. Features derive from
/// the character tokenization of the source so that every ASR granularity
/// hears the same signal.
inline Dataset make_dataset(const std::vector<TextPair>& pairs, std::uint64_t seed, const CorpusConfig& corpus,
                            const FeatureConfig& feats = {}) {
  const Vocabulary chars = build_vocabulary(corpus.source_alphabet(), Granularity::kChar);
  Dataset out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto ids = tokenize(pairs[i].source, Granularity::kChar, chars);
    auto x = synth_features(ids, seed * 1000003ULL + i, feats);
    out.push_back({"utt" + std::to_string(i), pairs[i].source, pairs[i].target, cmvn(x)});
  }
  return out;
}

inline nlohmann::json to_json(const ParallelExample& ex) {
  nlohmann::json j = {{"id", ex.id}, {"source", ex.source_text}, {"target", ex.target_text}};
  if (ex.features) {
    auto rows = nlohmann::json::array();
    for (std::size_t t = 0; t < ex.features->frames; ++t) {
      auto row = nlohmann::json::array();
      for (std::size_t f = 0; f < ex.features->dim; ++f) row.push_back(ex.features->at(t, f));
      rows.push_back(std::move(row));
    }
    j["features"] = std::move(rows);
  }
  return j;
}

inline ParallelExample example_from_json(const nlohmann::json& j, std::size_t line) {
  const std::string where = "line " + std::to_string(line);
  if (!j.is_object() || !j.contains("source") || !j.contains("target")) {
    throw Error(where + ": record needs 'source' and 'target'");
  }
  ParallelExample ex;
  ex.id = j.value("id", "utt" + std::to_string(line - 1));
  ex.source_text = j.at("source").get<std::string>();
  ex.target_text = j.at("target").get<std::string>();
  if (ex.source_text.empty() || ex.target_text.empty()) throw Error(where + ": empty text");
  if (j.contains("features")) {
    const auto& rows = j.at("features");
    if (!rows.is_array() || rows.empty()) throw Error(where + ": features must be a non-empty matrix");
    const std::size_t dim = rows[0].size();
    std::vector<float> values;
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != dim || dim == 0) throw Error(where + ": ragged feature matrix");
      for (const auto& v : row) {
        double d = v.get<double>();
        if (!std::isfinite(d)) throw Error(where + ": non-finite feature");
        values.push_back(float(d));
      }
    }
    ex.features = FeatureSequence(rows.size(), dim, std::move(values));
  }
  return ex;
}

inline void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& ex : data) out << to_json(ex).dump() << '\n';
}

inline Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  Dataset data;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(path + " line " + std::to_string(n) + ": " + e.what());
    }
    data.push_back(example_from_json(j, n));
  }
  return data;
}

}  // namespace slt
