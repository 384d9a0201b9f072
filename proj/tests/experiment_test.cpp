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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "slt/experiment.hpp"

#ifndef SLT_TEST_DATA
#define SLT_TEST_DATA "tests/data"
#endif

namespace slt {
namespace {

namespace fs = std::filesystem;

ExperimentConfig tiny(ExperimentKind kind) {
  auto c = load_experiment_config(std::string(SLT_TEST_DATA) + "/tiny.json");
  c.kind = kind;
  c.id = to_string(kind);
  return c;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("slt_experiment_test_" + name);
  fs::remove_all(p);
  return p;
}

ResultRow make_row(const std::string& id, const std::string& split, std::optional<double> bleu,
                   const std::string& variant = "", const std::string& kind = "mt") {
  ResultRow r;
  r.experiment_id = id;
  r.kind = kind;
  r.variant = variant;
  r.dataset_id = "toy-1";
  r.split = split;
  r.bleu = bleu;
  return r;
}

TEST(ConfigTest, JsonRoundTrip) {
  ExperimentConfig c = ExperimentConfig::full_scale();
  c.kind = ExperimentKind::kPretrainSelfattnFreeze;
  c.connector.kind = ConnectorKind::kSelfAttention;
  c.target_granularity = Granularity::kSubword;
  c.data.corpus.target_letters = "abcdefghijkl";
  auto back = experiment_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(content_hash(to_json(back)), content_hash(to_json(c)));
}

TEST(ConfigTest, FullScaleIsNotTheDefault) {
  const ExperimentConfig d, p = ExperimentConfig::full_scale();
  EXPECT_EQ(p.asr.n_enc_layers, 12);
  EXPECT_EQ(p.asr.n_dec_layers, 6);
  EXPECT_EQ(p.asr.d_model, 256);
  EXPECT_EQ(p.mt.d_model, 512);
  EXPECT_EQ(p.mt.heads, 8);
  EXPECT_EQ(p.train.epochs, 150);
  EXPECT_EQ(p.train.batch_target_units, 7000);
  EXPECT_EQ(p.train.warmup, 25000);
  EXPECT_EQ(p.train.average_last, 10);
  EXPECT_EQ(d.asr.n_enc_layers, 4);
  EXPECT_EQ(d.asr.d_model, 64);
  EXPECT_EQ(d.asr_decode.beam, 10);
  EXPECT_EQ(d.mt_decode.beam, 5);
}

TEST(ConfigTest, RejectsUnknownFieldsAndBadValues) {
  EXPECT_THROW(experiment_config_from_json({{"epochs", 3}}), Error);
  EXPECT_THROW(experiment_config_from_json({{"train", {{"epoch", 3}}}}), Error);
  EXPECT_THROW(experiment_config_from_json({{"kind", "cascade"}}), Error);
  EXPECT_THROW(experiment_config_from_json({{"seed", "one"}}), Error);
  auto c = experiment_config_from_json({{"mt_checkpoint", "/nonexistent/mt.ckpt"}});
  EXPECT_THROW(c.validate(), Error);
  c = experiment_config_from_json({{"asr_decode", {{"beam", 2}, {"n_best", 3}}}});
  EXPECT_THROW(c.validate(), Error);
}

TEST(ConfigTest, PartialJsonKeepsDefaults) {
  auto c = experiment_config_from_json({{"train", {{"epochs", 3}}}});
  EXPECT_EQ(c.train.epochs, 3);
  EXPECT_EQ(c.train.batch_target_units, ExperimentConfig{}.train.batch_target_units);
  EXPECT_EQ(c.asr.d_model, 64);
}

TEST(ConfigTest, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(ConfigTest, DatasetIdTracksDataConfigOnly) {
  ExperimentConfig a, b;
  b.train.epochs = 1;
  b.kind = ExperimentKind::kMt;
  EXPECT_EQ(dataset_id(a.data), dataset_id(b.data));
  b.data.seed = 8;
  EXPECT_NE(dataset_id(a.data), dataset_id(b.data));
}

TEST(ResultsTest, RowRoundTripAndAppend) {
  auto dir = scratch("rows");
  auto a = make_row("x", "dev", 12.5);
  a.wer = 3.0;
  a.decode = {{"mt", {{"beam", 5}}}};
  auto b = make_row("x", "test", std::nullopt);
  b.status = "failed";
  b.failed_stage = "decode:test";
  b.error = "boom";
  EXPECT_EQ(result_row_from_json(to_json(a)), a);
  EXPECT_EQ(result_row_from_json(to_json(b)), b);
  append_rows(results_file(dir.string()), {a});
  append_rows(results_file(dir.string()), {b});
  auto rows = read_rows(results_file(dir.string()));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], a);
  EXPECT_EQ(rows[1], b);
}

TEST(ResultsTest, ResultsDirFromEnvironment) {
  ::setenv("SLT_RESULTS_DIR", "/tmp/somewhere", 1);
  EXPECT_EQ(results_dir_from_env(), "/tmp/somewhere");
  ::unsetenv("SLT_RESULTS_DIR");
  EXPECT_EQ(results_dir_from_env("fallback"), "fallback");
}

TEST(ReportTest, SingleRowGivesSingleRowTable) {
  auto rep = compare_report({make_row("mt", "dev", 40.0)});
  ASSERT_EQ(rep.tables.size(), 1u);
  const auto& t = rep.tables[0].second;
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header, (std::vector<std::string>{"experiment", "kind", "BLEU dev"}));
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"mt", "mt", "40.00"}));
  EXPECT_TRUE(rep.flags.empty());
}

TEST(ReportTest, MissingSplitCellIsDash) {
  auto rep = compare_report({make_row("a", "dev", 1.0), make_row("a", "test", 2.0), make_row("b", "dev", 3.0)});
  const auto& t = rep.tables[0].second;
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"b", "mt", "3.00", "-"}));
  EXPECT_NE(rep.text().find(" -\n"), std::string::npos);
}

TEST(ReportTest, EnsembleVariantsGetFourColumnLayout) {
  std::vector<ResultRow> rows;
  double v = 10.0;
  for (const char* split : {"dev", "test"})
    for (const char* variant : kEnsembleVariants) rows.push_back(make_row("ens", split, v++, variant, "joint_ensemble"));
  auto rep = compare_report(rows);
  ASSERT_EQ(rep.tables.size(), 1u);
  const auto& t = rep.tables[0].second;
  EXPECT_EQ(t.header, (std::vector<std::string>{"split", "stand-alone", "Ens-ASR", "Ens-MT", "Ens-ASR+Ens-MT"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"dev", "10.00", "11.00", "12.00", "13.00"}));
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"test", "14.00", "15.00", "16.00", "17.00"}));
}

TEST(ReportTest, MixedDatasetIdsRejected) {
  auto a = make_row("a", "dev", 1.0), b = make_row("b", "dev", 1.0);
  b.dataset_id = "toy-2";
  EXPECT_THROW(compare_report({a, b}), Error);
  EXPECT_THROW(compare_report({}), Error);
}

TEST(ReportTest, LaterRowsReplaceEarlierOnes) {
  auto rep = compare_report({make_row("a", "dev", 1.0), make_row("a", "dev", 2.0)});
  EXPECT_EQ(rep.tables[0].second.rows.at(0).at(2), "2.00");
}

TEST(ReportTest, InversionIsFlaggedNotFatal) {
  auto rep = compare_report({make_row("j", "test", 20.0, "", "joint"), make_row("e", "test", 30.0, "", "e2e")});
  ASSERT_EQ(rep.flags.size(), 1u);
  EXPECT_NE(rep.flags[0].find("joint BLEU 20.00 < e2e BLEU 30.00"), std::string::npos);
  rep = compare_report({make_row("j", "test", 40.0, "", "joint"), make_row("e", "test", 30.0, "", "e2e")});
  EXPECT_TRUE(rep.flags.empty());
}

TEST(ReportTest, FailedCellsAndMachineReadableOutput) {
  auto f = make_row("a", "test", std::nullopt);
  f.status = "failed";
  f.failed_stage = "decode:test";
  auto rep = compare_report({make_row("a", "dev", 5.0), f});
  EXPECT_EQ(rep.tables[0].second.rows[0].back(), "FAIL");
  auto dir = scratch("report");
  fs::create_directories(dir);
  write_report(rep, (dir / "r.txt").string(), (dir / "r.json").string());
  std::ifstream in(dir / "r.json");
  auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("dataset_id"), "toy-1");
  EXPECT_EQ(j.at("tables").at(0).at("rows").at(0).at(2), "5.00");
}

TEST(DataTest, GenerateWriteReadRoundTrip) {
  auto c = tiny(ExperimentKind::kAsr);
  auto data = generate_data(c.data);
  EXPECT_EQ(data.train.size(), 12u);
  EXPECT_EQ(data.dev.size(), 3u);
  auto dir = scratch("data");
  write_data(dir.string(), data, c.data);
  auto back = read_data(dir.string());
  EXPECT_EQ(back.id, data.id);
  ASSERT_EQ(back.test.size(), data.test.size());
  EXPECT_EQ(back.test[1].target_text, data.test[1].target_text);
  EXPECT_EQ(back.test[1].features->values, data.test[1].features->values);
}

TEST(RunExperimentTest, CascadeRankedRowsReportAsrWerAndBleu) {
  auto c = tiny(ExperimentKind::kCascadeRanked);
  auto rows = run_experiment(c);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.failed());
    EXPECT_TRUE(r.asr_wer.has_value());
    EXPECT_TRUE(r.bleu.has_value());
    EXPECT_EQ(r.sentences, 3u);
    EXPECT_EQ(r.decode.at("asr").at("beam"), 3);
    EXPECT_EQ(r.decode.at("mt").at("beam"), 2);
  }
  EXPECT_EQ(rows[0].split, "dev");
  EXPECT_EQ(rows[1].split, "test");
}

TEST(RunExperimentTest, SameConfigAndSeedGiveIdenticalRows) {
  auto c = tiny(ExperimentKind::kJoint);
  auto dir1 = scratch("det1"), dir2 = scratch("det2");
  RunOptions o1, o2;
  o1.results_dir = dir1.string();
  o2.results_dir = dir2.string();
  o2.cache_models = false;
  run_experiment(c, o1);
  run_experiment(c, o2);
  auto read = [](const fs::path& d) {
    std::ifstream in(results_file(d.string()), std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_FALSE(read(dir1).empty());
  EXPECT_EQ(read(dir1), read(dir2));
  // A cached re-run reproduces the rows as well.
  run_experiment(c, o1);
  auto rows = read_rows(results_file(dir1.string()));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], rows[2]);
  EXPECT_EQ(rows[1], rows[3]);
}

TEST(RunExperimentTest, EveryKindProducesRows) {
  for (const auto& [kind, name] : experiment_kind_names()) {
    auto c = tiny(kind);
    c.train.epochs = 1;
    c.data.dev_size = c.data.test_size = 1;
    auto rows = run_experiment(c);
    std::size_t expected = 2;
    if (kind == ExperimentKind::kJointEnsemble) expected = 8;
    if (kind == ExperimentKind::kAugmented) expected = 4;
    if (kind == ExperimentKind::kEmbAvg) expected = 8;
    EXPECT_EQ(rows.size(), expected) << name;
    for (const auto& r : rows) {
      EXPECT_EQ(r.kind, name);
      EXPECT_FALSE(r.failed()) << name;
      EXPECT_TRUE(r.wer || r.bleu) << name;
    }
  }
}

TEST(RunExperimentTest, FailureFlushesPartialRowsWithMarker) {
  auto c = tiny(ExperimentKind::kAsr);
  c.asr.heads = 3;  // 16 is not divisible by 3
  auto dir = scratch("fail");
  RunOptions o;
  o.results_dir = dir.string();
  try {
    run_experiment(c, o);
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "models");
  }
  auto rows = read_rows(results_file(dir.string()));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].failed());
  EXPECT_EQ(rows[0].failed_stage, "models");
  EXPECT_NE(rows[0].error.find("divisible"), std::string::npos);
}

}  // namespace
}  // namespace slt
