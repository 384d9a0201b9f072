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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slt/types.hpp"

namespace slt {

/// One line of the append-only results file.
struct ResultRow {
  std::string experiment_id;
  std::string kind;
  std::string variant;  // e.g. ensemble member set, oracle vs ASR input
  std::string dataset_id;
  std::string split;
  std::optional<double> wer, cer, asr_wer, bleu;
  std::size_t sentences = 0;
  nlohmann::json decode = nlohmann::json::object();
  std::string config_hash;
  std::string status = "ok";  // "failed" marks a partial run
  std::string failed_stage;
  std::string error;

  bool failed() const { return status != "ok"; }
  bool operator==(const ResultRow&) const = default;
};

inline nlohmann::json to_json(const ResultRow& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j = {{"experiment_id", r.experiment_id},
                      {"kind", r.kind},
                      {"variant", r.variant},
                      {"dataset_id", r.dataset_id},
                      {"split", r.split},
                      {"wer", opt(r.wer)},
                      {"cer", opt(r.cer)},
                      {"asr_wer", opt(r.asr_wer)},
                      {"bleu", opt(r.bleu)},
                      {"sentences", r.sentences},
                      {"decode", r.decode},
                      {"config_hash", r.config_hash},
                      {"status", r.status}};
  if (r.failed()) {
    j["failed_stage"] = r.failed_stage;
    j["error"] = r.error;
  }
  return j;
}

inline ResultRow result_row_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* k) -> std::optional<double> {
    if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
    return j.at(k).get<double>();
  };
  ResultRow r;
  try {
    r.experiment_id = j.at("experiment_id").get<std::string>();
    r.kind = j.value("kind", "");
    r.variant = j.value("variant", "");
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.split = j.value("split", "");
    r.wer = opt("wer");
    r.cer = opt("cer");
    r.asr_wer = opt("asr_wer");
    r.bleu = opt("bleu");
    r.sentences = j.value("sentences", std::size_t(0));
    r.decode = j.value("decode", nlohmann::json::object());
    r.config_hash = j.value("config_hash", "");
    r.status = j.value("status", "ok");
    r.failed_stage = j.value("failed_stage", "");
    r.error = j.value("error", "");
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad result row: ") + e.what());
  }
  return r;
}

inline std::string format_row(const ResultRow& r) { return to_json(r).dump(); }

/// Directory named by SLT_RESULTS_DIR, or `fallback`.
inline std::string results_dir_from_env(const std::string& fallback = "results") {
  const char* v = std::getenv("SLT_RESULTS_DIR");
  return v && *v ? std::string(v) : fallback;
}

inline std::string results_file(const std::string& dir) { return dir + "/results.jsonl"; }

inline void append_rows(const std::string& path, const std::vector<ResultRow>& rows) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot append to " + path);
  for (const auto& r : rows) out << format_row(r) << '\n';
  out.flush();
  if (!out) throw Error("write failed: " + path);
}

inline std::vector<ResultRow> read_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read results " + path);
  std::vector<ResultRow> rows;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    try {
      rows.push_back(result_row_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(path + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace slt
