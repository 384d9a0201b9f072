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

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "slt/experiment/results.hpp"

namespace slt {

inline constexpr std::array<const char*, 4> kEnsembleVariants = {"stand-alone", "Ens-ASR", "Ens-MT",
                                                                 "Ens-ASR+Ens-MT"};

struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render() const {
    std::vector<std::size_t> width(header.size(), 0);
    auto widen = [&](const std::vector<std::string>& r) {
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    };
    widen(header);
    for (const auto& r : rows) widen(r);
    auto line = [&](const std::vector<std::string>& r) {
      std::string out;
      for (std::size_t c = 0; c < r.size(); ++c) {
        const std::string pad(width[c] - r[c].size(), ' ');
        if (c) out += "  ";
        out += c == 0 ? r[c] + pad : pad + r[c];
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      return out + "\n";
    };
    std::string out = line(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    for (const auto& r : rows) out += line(r);
    return out;
  }

  nlohmann::json to_json() const { return {{"header", header}, {"rows", rows}}; }
};

struct ComparisonReport {
  std::string dataset_id;
  std::vector<std::pair<std::string, TextTable>> tables;  // title, table
  std::vector<std::string> flags;

  std::string text() const {
    std::string out = "dataset " + dataset_id + "\n";
    for (const auto& [title, t] : tables) out += "\n" + title + "\n" + t.render();
    if (!flags.empty()) {
      out += "\n";
      for (const auto& f : flags) out += "FLAG " + f + "\n";
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json tj = nlohmann::json::array();
    for (const auto& [title, t] : tables) {
      auto j = t.to_json();
      j["title"] = title;
      tj.push_back(j);
    }
    return {{"dataset_id", dataset_id}, {"tables", tj}, {"flags", flags}};
  }
};

inline std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Groups rows by (experiment, variant) into one line each with a column
/// per (metric, split). Later rows for the same cell replace earlier ones,
/// so re-runs appended to the file show their latest values. Complete
/// ensemble variant sets also get a table with one column per variant.
inline ComparisonReport compare_report(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw Error("compare_report: no rows");
  ComparisonReport rep;
  rep.dataset_id = rows.front().dataset_id;
  for (const auto& r : rows) {
    if (r.dataset_id != rep.dataset_id) {
      throw Error("compare_report: mixed dataset ids '" + rep.dataset_id + "' and '" + r.dataset_id + "'");
    }
  }

  struct Group {
    std::string id, kind, variant;
    std::map<std::string, ResultRow> by_split;
  };
  std::vector<Group> groups;
  std::vector<std::string> splits;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.id == r.experiment_id && g.variant == r.variant; });
    if (it == groups.end()) {
      groups.push_back({r.experiment_id, r.kind, r.variant, {}});
      it = groups.end() - 1;
    }
    it->kind = r.kind;
    it->by_split[r.split] = r;
    if (std::find(splits.begin(), splits.end(), r.split) == splits.end()) splits.push_back(r.split);
  }

  using Getter = std::function<std::optional<double>(const ResultRow&)>;
  const std::vector<std::pair<std::string, Getter>> metrics = {
      {"WER", [](const ResultRow& r) { return r.wer; }},
      {"CER", [](const ResultRow& r) { return r.cer; }},
      {"ASR-WER", [](const ResultRow& r) { return r.asr_wer; }},
      {"BLEU", [](const ResultRow& r) { return r.bleu; }},
  };
  auto cell = [](const Group& g, const std::string& split, const Getter& get) -> std::string {
    auto it = g.by_split.find(split);
    if (it == g.by_split.end()) return "-";
    if (it->second.failed()) return "FAIL";
    auto v = get(it->second);
    return v ? format_metric(*v) : "-";
  };

  std::map<std::string, std::vector<const Group*>> ensembles;
  for (const auto& g : groups) {
    for (const char* v : kEnsembleVariants)
      if (g.variant == v) ensembles[g.id].push_back(&g);
  }
  for (auto it = ensembles.begin(); it != ensembles.end();) {
    it = it->second.size() == kEnsembleVariants.size() ? std::next(it) : ensembles.erase(it);
  }

  TextTable main;
  main.header = {"experiment", "kind"};
  std::vector<std::pair<const Getter*, std::string>> columns;
  for (const auto& [name, get] : metrics) {
    bool any = false;
    for (const auto& g : groups)
      for (const auto& [s, r] : g.by_split) any |= get(r).has_value();
    if (!any) continue;
    for (const auto& s : splits) {
      main.header.push_back(name + " " + s);
      columns.emplace_back(&get, s);
    }
  }
  if (columns.empty()) {
    main.header.push_back("status");
  }
  for (const auto& g : groups) {
    if (ensembles.count(g.id)) continue;
    std::vector<std::string> line = {g.variant.empty() ? g.id : g.id + " [" + g.variant + "]", g.kind};
    for (const auto& [get, s] : columns) line.push_back(cell(g, s, *get));
    if (columns.empty()) line.push_back(cell(g, splits.front(), [](const ResultRow&) { return std::nullopt; }));
    main.rows.push_back(line);
  }
  if (!main.rows.empty()) rep.tables.emplace_back("results", main);

  for (const auto& [id, members] : ensembles) {
    for (const auto& [name, get] : metrics) {
      bool any = false;
      for (const auto* g : members)
        for (const auto& [s, r] : g->by_split) any |= get(r).has_value();
      if (!any) continue;
      TextTable t;
      t.header = {"split"};
      for (const char* v : kEnsembleVariants) t.header.push_back(v);
      for (const auto& s : splits) {
        std::vector<std::string> line = {s};
        for (const char* v : kEnsembleVariants) {
          const Group* g = *std::find_if(members.begin(), members.end(),
                                         [&](const Group* m) { return m->variant == v; });
          line.push_back(cell(*g, s, get));
        }
        t.rows.push_back(line);
      }
      rep.tables.emplace_back(id + " ensembles, " + name, t);
    }
  }

  // Relational expectations that are reported, not enforced.
  auto first_bleu = [&](const std::string& kind, const std::string& split) -> std::optional<double> {
    for (const auto& g : groups) {
      if (g.kind != kind || !g.variant.empty()) continue;
      auto it = g.by_split.find(split);
      if (it != g.by_split.end() && !it->second.failed() && it->second.bleu) return it->second.bleu;
    }
    return std::nullopt;
  };
  auto expect_at_least = [&](const std::string& hi, const std::string& lo) {
    for (const auto& s : splits) {
      auto a = first_bleu(hi, s), b = first_bleu(lo, s);
      if (a && b && *a < *b) {
        rep.flags.push_back("inversion on " + s + ": " + hi + " BLEU " + format_metric(*a) + " < " + lo + " BLEU " +
                            format_metric(*b));
      }
    }
  };
  expect_at_least("joint", "e2e");
  expect_at_least("cascade_ranked", "cascade_one");
  for (const auto& g : groups)
    for (const auto& [s, r] : g.by_split)
      if (r.failed()) rep.flags.push_back(g.id + " " + s + " failed at stage " + r.failed_stage + ": " + r.error);
  return rep;
}

inline void write_report(const ComparisonReport& rep, const std::string& text_path, const std::string& json_path) {
  for (const auto& [path, body] : {std::pair{text_path, rep.text()}, std::pair{json_path, rep.to_json().dump(2)}}) {
    if (path.empty()) continue;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << body;
    if (body.back() != '\n') out << '\n';
  }
}

}  // namespace slt
