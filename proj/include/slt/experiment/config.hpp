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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "slt/decoding/cascade.hpp"
#include "slt/tasks.hpp"
#include "slt/training.hpp"

namespace slt {

enum class ExperimentKind {
  kAsr,
  kMt,
  kE2e,
  kCascadeOne,
  kCascadeN,
  kCascadeRanked,
  kJoint,
  kJointEnsemble,
  kAugmented,
  kEmbAvg,
  kPretrainLinearFreeze,
  kPretrainLinearFull,
  kPretrainSelfattnFreeze,
  kPretrainSelfattnFull,
};

inline const std::vector<std::pair<ExperimentKind, std::string>>& experiment_kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names = {
      {ExperimentKind::kAsr, "asr"},
      {ExperimentKind::kMt, "mt"},
      {ExperimentKind::kE2e, "e2e"},
      {ExperimentKind::kCascadeOne, "cascade_one"},
      {ExperimentKind::kCascadeN, "cascade_n"},
      {ExperimentKind::kCascadeRanked, "cascade_ranked"},
      {ExperimentKind::kJoint, "joint"},
      {ExperimentKind::kJointEnsemble, "joint_ensemble"},
      {ExperimentKind::kAugmented, "augmented"},
      {ExperimentKind::kEmbAvg, "emb_avg"},
      {ExperimentKind::kPretrainLinearFreeze, "pretrain_linear_freeze"},
      {ExperimentKind::kPretrainLinearFull, "pretrain_linear_full"},
      {ExperimentKind::kPretrainSelfattnFreeze, "pretrain_selfattn_freeze"},
      {ExperimentKind::kPretrainSelfattnFull, "pretrain_selfattn_full"},
  };
  return names;
}

inline std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : experiment_kind_names())
    if (kind == k) return name;
  return "?";
}

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (const auto& [kind, name] : experiment_kind_names())
    if (name == s) return kind;
  throw Error("unknown experiment kind '" + s + "'");
}

struct DataConfig {
  CorpusConfig corpus;
  FeatureConfig features;
  int train_size = 500;
  int dev_size = 50;
  int test_size = 50;
  std::uint64_t seed = 7;
};

/// Everything one experiment needs. Defaults are desk scale; see
/// full_scale() for the large sizes.
struct ExperimentConfig {
  std::string id = "toy";
  ExperimentKind kind = ExperimentKind::kAsr;
  std::uint64_t seed = 1;
  DataConfig data;
  Granularity asr_granularity = Granularity::kChar;
  Granularity mt_source_granularity = Granularity::kChar;
  Granularity target_granularity = Granularity::kChar;
  ModelConfig asr;
  ModelConfig mt;
  ModelConfig e2e;
  ConnectorConfig connector;
  TrainConfig train;
  DecodeConfig asr_decode;
  DecodeConfig mt_decode;
  int ensemble_size = 2;
  double emb_avg_rate = 0.1;
  std::string data_dir;        // train/dev/test.jsonl from `gen`; empty generates in memory
  std::string asr_checkpoint;  // optional pretrained inputs
  std::string mt_checkpoint;

  ExperimentConfig() {
    asr.input_mode = e2e.input_mode = InputMode::kSpeech;
    asr.n_enc_layers = e2e.n_enc_layers = 4;
    asr.n_dec_layers = e2e.n_dec_layers = 2;
    asr.d_model = mt.d_model = e2e.d_model = 64;
    asr.d_ff = mt.d_ff = e2e.d_ff = 256;
    asr.heads = mt.heads = e2e.heads = 4;
    mt.n_enc_layers = mt.n_dec_layers = 2;
    asr_decode.beam = 10;
    asr_decode.n_best = 10;
    mt_decode.beam = 5;
    mt_decode.n_best = 5;
  }

  /// The large model sizes and training schedule.
  static ExperimentConfig full_scale() {
    ExperimentConfig c;
    c.asr = presets::asr(0);
    c.e2e = presets::end_to_end(0);
    c.mt = presets::mt(0, 0);
    c.train.epochs = 150;
    c.train.batch_target_units = 7000;
    c.train.warmup = 25000;
    c.train.k = 1.0;
    c.train.average_last = 10;
    return c;
  }

  void validate() const {
    data.corpus.validate();
    if (data.train_size < 1 || data.dev_size < 1 || data.test_size < 1) throw Error("split sizes must be >= 1");
    if (data.features.frames_per_token < 1) throw Error("frames_per_token must be >= 1");
    train.validate();
    if (ensemble_size < 1) throw Error("ensemble_size must be >= 1");
    if (emb_avg_rate < 0.0 || emb_avg_rate > 1.0) throw Error("emb_avg_rate must lie in [0, 1]");
    for (const auto* d : {&asr_decode, &mt_decode}) {
      if (d->beam < 1 || d->n_best < 1 || d->n_best > d->beam) throw Error("decode beam/n_best invalid");
    }
    if (!data_dir.empty() && !std::ifstream(data_dir + "/train.jsonl")) {
      throw Error("data_dir '" + data_dir + "' has no train.jsonl");
    }
    for (const auto& path : {asr_checkpoint, mt_checkpoint}) {
      if (!path.empty() && !std::ifstream(path)) throw Error("referenced checkpoint '" + path + "' does not exist");
    }
  }
};

// ---- JSON mapping ----

inline nlohmann::json to_json(const ModelConfig& c) {
  return {{"n_enc_layers", c.n_enc_layers}, {"n_dec_layers", c.n_dec_layers}, {"d_model", c.d_model},
          {"d_ff", c.d_ff},                 {"heads", c.heads},               {"vocab_src", c.vocab_src},
          {"vocab_tgt", c.vocab_tgt},       {"input_mode", to_string(c.input_mode)},
          {"feat_dim", c.feat_dim},         {"conv_channels", c.conv_channels}, {"dropout", c.dropout},
          {"label_smoothing", c.label_smoothing}, {"pre_norm", c.pre_norm}};
}

template <class V>
void read_field(const nlohmann::json& j, const char* key, V& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config field '") + key + "': " + e.what());
  }
}

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok |= it.key() == k;
    if (!ok) throw Error("unknown field '" + it.key() + "' in " + where);
  }
}

inline ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig c) {
  check_keys(j, {"n_enc_layers", "n_dec_layers", "d_model", "d_ff", "heads", "vocab_src", "vocab_tgt", "input_mode",
                 "feat_dim", "conv_channels", "dropout", "label_smoothing", "pre_norm"},
             "model config");
  read_field(j, "n_enc_layers", c.n_enc_layers);
  read_field(j, "n_dec_layers", c.n_dec_layers);
  read_field(j, "d_model", c.d_model);
  read_field(j, "d_ff", c.d_ff);
  read_field(j, "heads", c.heads);
  read_field(j, "vocab_src", c.vocab_src);
  read_field(j, "vocab_tgt", c.vocab_tgt);
  if (j.contains("input_mode")) c.input_mode = input_mode_from_string(j.at("input_mode").get<std::string>());
  read_field(j, "feat_dim", c.feat_dim);
  read_field(j, "conv_channels", c.conv_channels);
  read_field(j, "dropout", c.dropout);
  read_field(j, "label_smoothing", c.label_smoothing);
  read_field(j, "pre_norm", c.pre_norm);
  return c;
}

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_target_units", c.batch_target_units},
          {"warmup", c.warmup},
          {"k", c.k},
          {"label_smoothing", c.label_smoothing},
          {"dropout", c.dropout},
          {"seed", c.seed},
          {"average_last", c.average_last},
          {"mt_loss_weight", c.mt_loss_weight},
          {"max_grad_norm", c.max_grad_norm},
          {"embed_avg_rate", c.embed_avg_rate},
          {"embed_avg_encoder", c.embed_avg_encoder},
          {"embed_avg_decoder", c.embed_avg_decoder}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  check_keys(j, {"epochs", "batch_target_units", "warmup", "k", "label_smoothing", "dropout", "seed", "average_last",
                 "mt_loss_weight", "max_grad_norm", "embed_avg_rate", "embed_avg_encoder", "embed_avg_decoder"},
             "train config");
  read_field(j, "epochs", c.epochs);
  read_field(j, "batch_target_units", c.batch_target_units);
  read_field(j, "warmup", c.warmup);
  read_field(j, "k", c.k);
  read_field(j, "label_smoothing", c.label_smoothing);
  read_field(j, "dropout", c.dropout);
  read_field(j, "seed", c.seed);
  read_field(j, "average_last", c.average_last);
  read_field(j, "mt_loss_weight", c.mt_loss_weight);
  read_field(j, "max_grad_norm", c.max_grad_norm);
  read_field(j, "embed_avg_rate", c.embed_avg_rate);
  read_field(j, "embed_avg_encoder", c.embed_avg_encoder);
  read_field(j, "embed_avg_decoder", c.embed_avg_decoder);
  return c;
}

inline nlohmann::json to_json(const DecodeConfig& c) {
  return {{"beam", c.beam},
          {"length_penalty_alpha", c.length_penalty_alpha},
          {"eos_gamma", c.eos_gamma},
          {"max_len", c.max_len},
          {"n_best", c.n_best}};
}

inline DecodeConfig decode_config_from_json(const nlohmann::json& j, DecodeConfig c) {
  check_keys(j, {"beam", "length_penalty_alpha", "eos_gamma", "max_len", "n_best"}, "decode config");
  read_field(j, "beam", c.beam);
  read_field(j, "length_penalty_alpha", c.length_penalty_alpha);
  read_field(j, "eos_gamma", c.eos_gamma);
  read_field(j, "max_len", c.max_len);
  read_field(j, "n_best", c.n_best);
  return c;
}

inline nlohmann::json to_json(const DataConfig& d) {
  return {{"alphabet_size", d.corpus.alphabet_size},
          {"min_words", d.corpus.min_words},
          {"max_words", d.corpus.max_words},
          {"max_word_len", d.corpus.max_word_len},
          {"target_letters", d.corpus.target_letters},
          {"frames_per_token", d.features.frames_per_token},
          {"noise_sd", d.features.noise_sd},
          {"feat_dim", d.features.feat_dim},
          {"train_size", d.train_size},
          {"dev_size", d.dev_size},
          {"test_size", d.test_size},
          {"seed", d.seed}};
}

inline DataConfig data_config_from_json(const nlohmann::json& j, DataConfig d) {
  check_keys(j, {"alphabet_size", "min_words", "max_words", "max_word_len", "target_letters", "frames_per_token",
                 "noise_sd", "feat_dim", "train_size", "dev_size", "test_size", "seed"},
             "data config");
  read_field(j, "alphabet_size", d.corpus.alphabet_size);
  read_field(j, "min_words", d.corpus.min_words);
  read_field(j, "max_words", d.corpus.max_words);
  read_field(j, "max_word_len", d.corpus.max_word_len);
  read_field(j, "target_letters", d.corpus.target_letters);
  read_field(j, "frames_per_token", d.features.frames_per_token);
  read_field(j, "noise_sd", d.features.noise_sd);
  read_field(j, "feat_dim", d.features.feat_dim);
  read_field(j, "train_size", d.train_size);
  read_field(j, "dev_size", d.dev_size);
  read_field(j, "test_size", d.test_size);
  read_field(j, "seed", d.seed);
  return d;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"id", c.id},
          {"kind", to_string(c.kind)},
          {"seed", c.seed},
          {"data", to_json(c.data)},
          {"asr_granularity", to_string(c.asr_granularity)},
          {"mt_source_granularity", to_string(c.mt_source_granularity)},
          {"target_granularity", to_string(c.target_granularity)},
          {"asr", to_json(c.asr)},
          {"mt", to_json(c.mt)},
          {"e2e", to_json(c.e2e)},
          {"connector",
           {{"kind", to_string(c.connector.kind)},
            {"layers", c.connector.layers},
            {"heads", c.connector.heads},
            {"d_ff", c.connector.d_ff}}},
          {"train", to_json(c.train)},
          {"asr_decode", to_json(c.asr_decode)},
          {"mt_decode", to_json(c.mt_decode)},
          {"ensemble_size", c.ensemble_size},
          {"emb_avg_rate", c.emb_avg_rate},
          {"data_dir", c.data_dir},
          {"asr_checkpoint", c.asr_checkpoint},
          {"mt_checkpoint", c.mt_checkpoint}};
}

/// Fields absent from `j` keep the values of `base`; unknown fields are errors.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig c = {}) {
  check_keys(j, {"id", "kind", "seed", "data", "asr_granularity", "mt_source_granularity", "target_granularity", "asr",
                 "mt", "e2e", "connector", "train", "asr_decode", "mt_decode", "ensemble_size", "emb_avg_rate",
                 "data_dir", "asr_checkpoint", "mt_checkpoint"},
             "experiment config");
  read_field(j, "id", c.id);
  if (j.contains("kind")) c.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
  read_field(j, "seed", c.seed);
  if (j.contains("data")) c.data = data_config_from_json(j.at("data"), c.data);
  if (j.contains("asr_granularity")) c.asr_granularity = granularity_from_string(j.at("asr_granularity"));
  if (j.contains("mt_source_granularity")) {
    c.mt_source_granularity = granularity_from_string(j.at("mt_source_granularity"));
  }
  if (j.contains("target_granularity")) c.target_granularity = granularity_from_string(j.at("target_granularity"));
  if (j.contains("asr")) c.asr = model_config_from_json(j.at("asr"), c.asr);
  if (j.contains("mt")) c.mt = model_config_from_json(j.at("mt"), c.mt);
  if (j.contains("e2e")) c.e2e = model_config_from_json(j.at("e2e"), c.e2e);
  if (j.contains("connector")) {
    const auto& cj = j.at("connector");
    check_keys(cj, {"kind", "layers", "heads", "d_ff"}, "connector config");
    if (cj.contains("kind")) c.connector.kind = connector_kind_from_string(cj.at("kind"));
    read_field(cj, "layers", c.connector.layers);
    read_field(cj, "heads", c.connector.heads);
    read_field(cj, "d_ff", c.connector.d_ff);
  }
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"), c.train);
  if (j.contains("asr_decode")) c.asr_decode = decode_config_from_json(j.at("asr_decode"), c.asr_decode);
  if (j.contains("mt_decode")) c.mt_decode = decode_config_from_json(j.at("mt_decode"), c.mt_decode);
  read_field(j, "ensemble_size", c.ensemble_size);
  read_field(j, "emb_avg_rate", c.emb_avg_rate);
  read_field(j, "data_dir", c.data_dir);
  read_field(j, "asr_checkpoint", c.asr_checkpoint);
  read_field(j, "mt_checkpoint", c.mt_checkpoint);
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Hash of the canonical (sorted-key, compact) JSON rendering.
inline std::string content_hash(const nlohmann::json& j) { return fnv1a_hex(j.dump()); }

inline std::string dataset_id(const DataConfig& d) { return "toy-" + content_hash(to_json(d)).substr(0, 8); }

}  // namespace slt
