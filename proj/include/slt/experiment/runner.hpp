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

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "slt/decoding.hpp"
#include "slt/experiment/config.hpp"
#include "slt/experiment/report.hpp"
#include "slt/experiment/results.hpp"
#include "slt/metrics.hpp"

namespace slt {

/// Failure inside a named pipeline stage ("data", "train:asr", "decode:dev", ...).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// ---- data ----

struct ExperimentData {
  std::string id;
  Dataset train, dev, test;

  const Dataset& split(const std::string& name) const {
    if (name == "train") return train;
    if (name == "dev") return dev;
    if (name == "test") return test;
    throw Error("unknown split '" + name + "'");
  }
};

inline ExperimentData generate_data(const DataConfig& d) {
  d.corpus.validate();
  ExperimentData out;
  out.id = dataset_id(d);
  auto make = [&](std::uint64_t stream, int n) {
    return make_dataset(gen_toy_corpus(detail::derive_seed(d.seed, stream), n, d.corpus),
                        detail::derive_seed(d.seed, stream + 10), d.corpus, d.features);
  };
  out.train = make(11, d.train_size);
  out.dev = make(12, d.dev_size);
  out.test = make(13, d.test_size);
  return out;
}

/// Writes train/dev/test.jsonl and data.json (the generating config plus id).
inline void write_data(const std::string& dir, const ExperimentData& data, const DataConfig& cfg) {
  std::filesystem::create_directories(dir);
  write_dataset(dir + "/train.jsonl", data.train);
  write_dataset(dir + "/dev.jsonl", data.dev);
  write_dataset(dir + "/test.jsonl", data.test);
  std::ofstream meta(dir + "/data.json");
  if (!meta) throw Error("cannot write " + dir + "/data.json");
  meta << nlohmann::json{{"dataset_id", data.id}, {"config", to_json(cfg)}}.dump(2) << '\n';
}

inline ExperimentData read_data(const std::string& dir) {
  ExperimentData out;
  out.train = read_dataset(dir + "/train.jsonl");
  out.dev = read_dataset(dir + "/dev.jsonl");
  out.test = read_dataset(dir + "/test.jsonl");
  std::ifstream meta(dir + "/data.json");
  if (meta) {
    out.id = nlohmann::json::parse(meta).at("dataset_id").get<std::string>();
  } else {
    std::string all;
    for (const char* f : {"/train.jsonl", "/dev.jsonl", "/test.jsonl"}) {
      std::ifstream in(dir + f, std::ios::binary);
      all += std::string(std::istreambuf_iterator<char>(in), {});
    }
    out.id = "dir-" + fnv1a_hex(all).substr(0, 8);
  }
  return out;
}

// ---- runner ----

struct RunOptions {
  std::string results_dir;  // empty: rows are returned, nothing is written
  bool cache_models = true;  // reuse trained checkpoints under <results_dir>/cache
  std::function<void(const std::string&)> log;
};

struct Vocabularies {
  Vocabulary asr, mt_source, target;

  explicit Vocabularies(const ExperimentConfig& c)
      : asr(build_vocabulary(c.data.corpus.source_alphabet(), c.asr_granularity)),
        mt_source(build_vocabulary(c.data.corpus.source_alphabet(), c.mt_source_granularity)),
        target(build_vocabulary(c.data.corpus.target_alphabet(), c.target_granularity)) {}
};

/// Model configs with vocabulary sizes and input modes filled in.
struct ResolvedModels {
  ModelConfig asr, mt, e2e;

  ResolvedModels(const ExperimentConfig& c, const Vocabularies& v) : asr(c.asr), mt(c.mt), e2e(c.e2e) {
    asr.input_mode = e2e.input_mode = InputMode::kSpeech;
    asr.feat_dim = e2e.feat_dim = c.data.features.feat_dim;
    asr.vocab_tgt = int(v.asr.size());
    e2e.vocab_tgt = mt.vocab_tgt = int(v.target.size());
    mt.input_mode = InputMode::kText;
    mt.vocab_src = int(v.mt_source.size());
    asr.validate();
    mt.validate();
    e2e.validate();
  }
};

class ExperimentRunner {
 public:
  using Model = SeqModel<float>;
  using Joint = JointModel<float>;

  ExperimentRunner(ExperimentConfig cfg, RunOptions opt) : cfg_(std::move(cfg)), opt_(std::move(opt)) {}

  /// Runs the configured kind and appends its rows. On failure the rows
  /// finished so far plus a failure row are appended, then StageError is
  /// thrown.
  std::vector<ResultRow> run() {
    try {
      prepare();
      dispatch();
      stage_ = "persist";
      persist(rows_);
      return rows_;
    } catch (const std::exception& e) {
      ResultRow fail = row(stage_.rfind("decode:", 0) == 0 ? stage_.substr(7) : "", "");
      fail.status = "failed";
      fail.failed_stage = stage_;
      fail.error = e.what();
      rows_.push_back(fail);
      if (stage_ != "persist") {
        try {
          persist(rows_);
        } catch (const std::exception&) {
        }
      }
      throw StageError(stage_, e.what());
    }
  }

  /// Validates the config and loads data and vocabularies.
  void prepare() {
    stage_ = "validate";
    cfg_.validate();
    hash_ = content_hash(to_json(cfg_));
    stage_ = "data";
    data_ = cfg_.data_dir.empty() ? generate_data(cfg_.data) : read_data(cfg_.data_dir);
    stage_ = "models";
    vocab_ = std::make_unique<Vocabularies>(cfg_);
    models_ = std::make_unique<ResolvedModels>(cfg_, *vocab_);
  }

  const std::vector<ResultRow>& rows() const { return rows_; }
  const ExperimentData& data() const { return data_; }
  const Vocabularies& vocabularies() const { return *vocab_; }
  const ResolvedModels& models() const { return *models_; }
  const ExperimentConfig& config() const { return cfg_; }

  /// Training examples for "asr", "mt", "e2e" or "joint".
  std::vector<TrainExample> examples(const std::string& role) const {
    if (role == "asr") return asr_examples();
    if (role == "mt") return mt_examples(gold_pairs());
    if (role == "e2e") return e2e_examples();
    if (role == "joint") return joint_examples();
    throw Error("unknown role '" + role + "'");
  }

  DecodeConfig asr_config(const FeatureSequence& x) const {
    DecodeConfig d = cfg_.asr_decode;
    d.suppress = model_suppress();
    if (d.max_len == 0) d.max_len = asr_max_len(x, cfg_.data.features.frames_per_token);
    return d;
  }

  DecodeConfig mt_config() const {
    DecodeConfig d = cfg_.mt_decode;
    d.suppress = model_suppress();
    return d;
  }

 private:
  ExperimentConfig cfg_;
  RunOptions opt_;
  std::string stage_, hash_;
  ExperimentData data_;
  std::unique_ptr<Vocabularies> vocab_;
  std::unique_ptr<ResolvedModels> models_;
  std::vector<ResultRow> rows_;

  void log(const std::string& msg) const {
    if (opt_.log) opt_.log(cfg_.id + ": " + msg);
  }

  void persist(const std::vector<ResultRow>& rows) const {
    if (!opt_.results_dir.empty()) append_rows(results_file(opt_.results_dir), rows);
  }

  ResultRow row(const std::string& split, const std::string& variant) const {
    ResultRow r;
    r.experiment_id = cfg_.id;
    r.kind = to_string(cfg_.kind);
    r.variant = variant;
    r.dataset_id = data_.id.empty() ? dataset_id(cfg_.data) : data_.id;
    r.split = split;
    r.config_hash = hash_;
    return r;
  }

  static nlohmann::json decode_settings(const DecodeConfig& d) {
    return {{"beam", d.beam}, {"alpha", d.length_penalty_alpha}, {"gamma", d.eos_gamma}, {"n_best", d.n_best}};
  }

  // ---- examples ----

  std::vector<TrainExample> asr_examples() const {
    std::vector<TrainExample> out;
    for (const auto& ex : data_.train)
      out.push_back({ex.features, {}, tokenize(ex.source_text, cfg_.asr_granularity, vocab_->asr)});
    return out;
  }

  std::vector<TrainExample> mt_examples(const std::vector<TextPair>& pairs) const {
    std::vector<TrainExample> out;
    for (const auto& p : pairs) {
      out.push_back({std::nullopt, tokenize(p.source, cfg_.mt_source_granularity, vocab_->mt_source),
                     tokenize(p.target, cfg_.target_granularity, vocab_->target)});
    }
    return out;
  }

  std::vector<TextPair> gold_pairs() const {
    std::vector<TextPair> out;
    for (const auto& ex : data_.train) out.push_back({ex.source_text, ex.target_text});
    return out;
  }

  std::vector<TrainExample> e2e_examples() const {
    std::vector<TrainExample> out;
    for (const auto& ex : data_.train)
      out.push_back({ex.features, {}, tokenize(ex.target_text, cfg_.target_granularity, vocab_->target)});
    return out;
  }

  std::vector<TrainExample> joint_examples() const {
    std::vector<TrainExample> out;
    for (const auto& ex : data_.train) {
      out.push_back({ex.features, tokenize(ex.source_text, cfg_.asr_granularity, vocab_->asr),
                     tokenize(ex.target_text, cfg_.target_granularity, vocab_->target)});
    }
    return out;
  }

  // ---- training with a checkpoint cache ----

  std::string cache_path(const std::string& role, const nlohmann::json& key) const {
    if (opt_.results_dir.empty() || !opt_.cache_models) return "";
    return opt_.results_dir + "/cache/" + role + "-" + content_hash(key) + ".ckpt";
  }

  TrainConfig train_config(int member) const {
    TrainConfig tc = cfg_.train;
    tc.seed = cfg_.seed + std::uint64_t(member);
    return tc;
  }

  nlohmann::json base_key(const std::string& role, const TrainConfig& tc) const {
    return {{"role", role},
            {"dataset", data_.id},
            {"train", to_json(tc)},
            {"asr_granularity", to_string(cfg_.asr_granularity)},
            {"mt_source_granularity", to_string(cfg_.mt_source_granularity)},
            {"target_granularity", to_string(cfg_.target_granularity)}};
  }

  template <class Params, class Train>
  void train_cached(const std::string& role, const nlohmann::json& key, const Params& params, Train&& fit,
                    int average_last) {
    stage_ = "train:" + role;
    const std::string path = cache_path(role, key);
    if (!path.empty() && std::filesystem::exists(path)) {
      log("loading cached " + role + " " + path);
      load_parameters(params, load_checkpoint(path));
      return;
    }
    log("training " + role);
    TrainResult res = fit();
    if (res.checkpoints.empty()) throw Error("training produced no checkpoints");
    load_parameters(params, res.averaged(average_last));
    log(role + " final epoch loss " + std::to_string(res.epoch_loss.back()));
    if (!path.empty()) {
      std::filesystem::create_directories(std::filesystem::path(path).parent_path());
      save_checkpoint(path, snapshot(params));
      std::ofstream(path.substr(0, path.size() - 5) + ".loss.csv") << loss_curve_csv(res.curve);
    }
  }

  std::unique_ptr<Model> train_seq(const std::string& role, const ModelConfig& mc,
                                   const std::vector<TrainExample>& ex, const TrainConfig& tc,
                                   const std::string& external = "") {
    Rng init(detail::derive_seed(tc.seed, 100 + fnv_stream(role)));
    auto m = std::make_unique<Model>(mc, init);
    if (!external.empty()) {
      stage_ = "load:" + role;
      load_parameters(m->named_parameters(), load_checkpoint(external));
      return m;
    }
    auto key = base_key(role, tc);
    key["model"] = to_json(mc);
    key["examples"] = examples_hash(ex);
    train_cached(role, key, m->named_parameters(), [&] { return train(*m, ex, tc); }, tc.average_last);
    return m;
  }

  std::unique_ptr<Joint> train_joint_model(const std::string& role, const TrainConfig& tc,
                                           const Model* asr_init = nullptr, const Model* mt_init = nullptr,
                                           FreezeMode freeze = FreezeMode::kFull) {
    Rng init(detail::derive_seed(tc.seed, 100 + fnv_stream(role)));
    std::unique_ptr<Joint> jm;
    auto key = base_key(role, tc);
    key["asr"] = to_json(models_->asr);
    key["mt"] = to_json(models_->mt);
    key["connector"] = {{"kind", to_string(cfg_.connector.kind)},
                        {"layers", cfg_.connector.layers},
                        {"heads", cfg_.connector.heads},
                        {"d_ff", cfg_.connector.d_ff}};
    key["freeze"] = to_string(freeze);
    if (asr_init && mt_init) {
      const auto a = snapshot(asr_init->named_parameters()), m = snapshot(mt_init->named_parameters());
      jm = std::make_unique<Joint>(init_joint_from_pretrained<float>(a, models_->asr, m, models_->mt,
                                                                     cfg_.connector, init));
      key["init"] = fnv1a_hex(serialize_checkpoint(a)) + fnv1a_hex(serialize_checkpoint(m));
    } else {
      jm = std::make_unique<Joint>(models_->asr, models_->mt, cfg_.connector, init);
    }
    jm->freeze = freeze;
    train_cached(role, key, jm->named_parameters(), [&] { return train_joint(*jm, joint_examples(), tc); },
                 tc.average_last);
    return jm;
  }

  static std::string examples_hash(const std::vector<TrainExample>& ex) {
    std::string bytes;
    for (const auto& e : ex) {
      for (int id : e.source_ids) bytes += std::to_string(id) + ",";
      bytes += "|";
      for (int id : e.target_ids) bytes += std::to_string(id) + ",";
      bytes += "\n";
    }
    return fnv1a_hex(bytes);
  }

  static std::uint64_t fnv_stream(const std::string& role) {
    return std::stoull(fnv1a_hex(role).substr(0, 8), nullptr, 16);
  }

  // ---- decoding ----

  static std::string text_of(const std::vector<int>& ids, const Vocabulary& v) {
    return normalize_text(detokenize(ids, v));
  }

  std::vector<std::string> refs(const Dataset& ds, bool source) const {
    std::vector<std::string> out;
    for (const auto& ex : ds) out.push_back(normalize_text(source ? ex.source_text : ex.target_text));
    return out;
  }

  static const FeatureSequence& features_of(const ParallelExample& ex) {
    if (!ex.features) throw Error("example " + ex.id + " has no features");
    return *ex.features;
  }

  /// Best hypothesis of a speech model, as text in `vocab`.
  std::vector<std::string> decode_speech(const Model& m, const Dataset& ds, const Vocabulary& vocab) const {
    std::vector<std::string> hyps;
    for (const auto& ex : ds) {
      const auto& x = features_of(ex);
      auto best = beam_search(speech_scorer<float>({&m}, x), asr_config(x)).front();
      hyps.push_back(text_of(best.tokens, vocab));
    }
    return hyps;
  }

  /// MT over given source texts (oracle or recognized).
  std::vector<std::string> decode_text(const Model& mt, const std::vector<std::string>& sources) const {
    std::vector<std::string> hyps;
    for (const auto& s : sources) {
      if (s.empty()) {
        hyps.emplace_back();
        continue;
      }
      auto ids = tokenize(s, cfg_.mt_source_granularity, vocab_->mt_source);
      DecodeConfig d = mt_config();
      if (d.max_len == 0) d.max_len = mt_max_len(ids);
      auto best = beam_search(text_scorer<float>({&mt}, ids), d).front();
      hyps.push_back(text_of(best.tokens, vocab_->target));
    }
    return hyps;
  }

  struct PairHyps {
    std::vector<std::string> asr, mt;
  };

  PairHyps decode_cascade(const Model& asr, const Model& mt, const Dataset& ds, CascadeMode mode) const {
    TextBridge bridge{&vocab_->asr, &vocab_->mt_source, cfg_.mt_source_granularity};
    PairHyps out;
    for (const auto& ex : ds) {
      const auto& x = features_of(ex);
      auto res = cascade_decode<float>(asr, mt, bridge, x, mode, asr_config(x), mt_config());
      out.asr.push_back(text_of(res.best.asr.tokens, vocab_->asr));
      out.mt.push_back(text_of(res.best.mt.tokens, vocab_->target));
    }
    return out;
  }

  PairHyps decode_joint(const std::vector<const Joint*>& asr_members, const std::vector<const Joint*>& mt_members,
                        const Dataset& ds) const {
    PairHyps out;
    for (const auto& ex : ds) {
      const auto& x = features_of(ex);
      auto res = joint_decode<float>(asr_members, mt_members, x, asr_config(x), mt_config());
      out.asr.push_back(text_of(res.best.asr.tokens, vocab_->asr));
      out.mt.push_back(text_of(res.best.mt.tokens, vocab_->target));
    }
    return out;
  }

  // ---- rows ----

  static constexpr const char* kSplits[] = {"dev", "test"};

  template <class Fn>
  void for_splits(Fn&& fn) {
    for (const char* s : kSplits) {
      stage_ = std::string("decode:") + s;
      log("decoding " + std::string(s));
      fn(std::string(s), data_.split(s));
    }
  }

  void add_recognition_row(const std::string& split, const Dataset& ds, const std::vector<std::string>& hyps) {
    stage_ = "evaluate";
    auto e = evaluate(refs(ds, true), hyps);
    auto r = row(split, "");
    r.wer = e.wer;
    r.cer = e.cer;
    r.sentences = e.n_sentences;
    r.decode = {{"asr", decode_settings(cfg_.asr_decode)}};
    rows_.push_back(r);
  }

  void add_translation_row(const std::string& split, const std::string& variant, const Dataset& ds,
                           const std::vector<std::string>& hyps, const std::vector<std::string>* asr_hyps,
                           nlohmann::json decode) {
    stage_ = "evaluate";
    auto r = row(split, variant);
    r.bleu = evaluate(refs(ds, false), hyps).bleu;
    if (asr_hyps) r.asr_wer = evaluate(refs(ds, true), *asr_hyps).wer;
    r.sentences = ds.size();
    r.decode = std::move(decode);
    rows_.push_back(r);
  }

  nlohmann::json both_decodes() const {
    return {{"asr", decode_settings(cfg_.asr_decode)}, {"mt", decode_settings(cfg_.mt_decode)}};
  }

  // ---- kinds ----

  std::unique_ptr<Model> asr_model() {
    return train_seq("asr", models_->asr, asr_examples(), train_config(0), cfg_.asr_checkpoint);
  }

  std::unique_ptr<Model> mt_model(const std::string& role = "mt", TrainConfig tc = {}, bool custom = false,
                                  const std::vector<TextPair>* pairs = nullptr) {
    if (!custom) tc = train_config(0);
    const auto gold = gold_pairs();
    const std::string external = custom ? "" : cfg_.mt_checkpoint;
    return train_seq(role, models_->mt, mt_examples(pairs ? *pairs : gold), tc, external);
  }

  void dispatch() {
    switch (cfg_.kind) {
      case ExperimentKind::kAsr: {
        auto asr = asr_model();
        for_splits([&](const std::string& s, const Dataset& ds) {
          add_recognition_row(s, ds, decode_speech(*asr, ds, vocab_->asr));
        });
        break;
      }
      case ExperimentKind::kMt: {
        auto mt = mt_model();
        for_splits([&](const std::string& s, const Dataset& ds) {
          add_translation_row(s, "", ds, decode_text(*mt, refs(ds, true)), nullptr,
                              {{"mt", decode_settings(cfg_.mt_decode)}});
        });
        break;
      }
      case ExperimentKind::kE2e: {
        auto e2e = train_seq("e2e", models_->e2e, e2e_examples(), train_config(0));
        for_splits([&](const std::string& s, const Dataset& ds) {
          add_translation_row(s, "", ds, decode_speech(*e2e, ds, vocab_->target), nullptr,
                              {{"asr", decode_settings(cfg_.asr_decode)}});
        });
        break;
      }
      case ExperimentKind::kCascadeOne:
      case ExperimentKind::kCascadeN:
      case ExperimentKind::kCascadeRanked: {
        const CascadeMode mode = cfg_.kind == ExperimentKind::kCascadeOne ? CascadeMode::kOneBest
                                 : cfg_.kind == ExperimentKind::kCascadeN ? CascadeMode::kNBest
                                                                          : CascadeMode::kRankedNBest;
        auto asr = asr_model();
        auto mt = mt_model();
        for_splits([&](const std::string& s, const Dataset& ds) {
          auto h = decode_cascade(*asr, *mt, ds, mode);
          add_translation_row(s, "", ds, h.mt, &h.asr, both_decodes());
        });
        break;
      }
      case ExperimentKind::kJoint: {
        auto jm = train_joint_model("joint", train_config(0));
        for_splits([&](const std::string& s, const Dataset& ds) {
          auto h = decode_joint({jm.get()}, {jm.get()}, ds);
          add_translation_row(s, "", ds, h.mt, &h.asr, both_decodes());
        });
        break;
      }
      case ExperimentKind::kJointEnsemble: {
        std::vector<std::unique_ptr<Joint>> members;
        std::vector<const Joint*> all;
        for (int m = 0; m < cfg_.ensemble_size; ++m) {
          members.push_back(train_joint_model("joint", train_config(m)));
          all.push_back(members.back().get());
        }
        const std::vector<const Joint*> first = {all.front()};
        const std::pair<std::vector<const Joint*>, std::vector<const Joint*>> sets[] = {
            {first, first}, {all, first}, {first, all}, {all, all}};
        for_splits([&](const std::string& s, const Dataset& ds) {
          for (std::size_t v = 0; v < kEnsembleVariants.size(); ++v) {
            auto h = decode_joint(sets[v].first, sets[v].second, ds);
            auto dec = both_decodes();
            dec["asr_members"] = sets[v].first.size();
            dec["mt_members"] = sets[v].second.size();
            add_translation_row(s, kEnsembleVariants[v], ds, h.mt, &h.asr, dec);
          }
        });
        break;
      }
      case ExperimentKind::kAugmented: {
        auto asr = asr_model();
        stage_ = "augment";
        auto aug = augment_with_hypotheses(
            data_.train, asr_recognizer<float>(*asr, vocab_->asr, cfg_.asr_decode.beam,
                                               cfg_.data.features.frames_per_token,
                                               cfg_.asr_decode.length_penalty_alpha));
        log("augmented corpus " + std::to_string(aug.pairs.size()) + " pairs, " + std::to_string(aug.skipped) +
            " skipped");
        auto mt = mt_model("mt_augmented", train_config(0), true, &aug.pairs);
        oracle_and_asr_rows(*asr, *mt, "");
        break;
      }
      case ExperimentKind::kEmbAvg: {
        auto asr = asr_model();
        for (const bool encoder : {true, false}) {
          TrainConfig tc = train_config(0);
          tc.embed_avg_rate = cfg_.emb_avg_rate;
          tc.embed_avg_encoder = encoder;
          tc.embed_avg_decoder = !encoder;
          const std::string side = encoder ? "encoder" : "decoder";
          auto mt = mt_model("mt_embavg_" + side, tc, true);
          oracle_and_asr_rows(*asr, *mt, side + "/");
        }
        break;
      }
      case ExperimentKind::kPretrainLinearFreeze:
      case ExperimentKind::kPretrainLinearFull:
      case ExperimentKind::kPretrainSelfattnFreeze:
      case ExperimentKind::kPretrainSelfattnFull: {
        const bool linear = cfg_.kind == ExperimentKind::kPretrainLinearFreeze ||
                            cfg_.kind == ExperimentKind::kPretrainLinearFull;
        const bool freeze = cfg_.kind == ExperimentKind::kPretrainLinearFreeze ||
                            cfg_.kind == ExperimentKind::kPretrainSelfattnFreeze;
        cfg_.connector.kind = linear ? ConnectorKind::kLinear : ConnectorKind::kSelfAttention;
        auto asr = asr_model();
        auto mt = mt_model();
        auto jm = train_joint_model(to_string(cfg_.kind), train_config(0), asr.get(), mt.get(),
                                    freeze ? FreezeMode::kConnectorOnly : FreezeMode::kFull);
        for_splits([&](const std::string& s, const Dataset& ds) {
          auto h = decode_joint({jm.get()}, {jm.get()}, ds);
          add_translation_row(s, "", ds, h.mt, &h.asr, both_decodes());
        });
        break;
      }
    }
  }

  /// MT fed with reference text ("oracle") and with the ASR 1-best ("asr").
  void oracle_and_asr_rows(const Model& asr, const Model& mt, const std::string& prefix) {
    for_splits([&](const std::string& s, const Dataset& ds) {
      add_translation_row(s, prefix + "oracle", ds, decode_text(mt, refs(ds, true)), nullptr,
                          {{"mt", decode_settings(cfg_.mt_decode)}});
      auto h = decode_cascade(asr, mt, ds, CascadeMode::kOneBest);
      add_translation_row(s, prefix + "asr", ds, h.mt, &h.asr, both_decodes());
    });
  }

};

/// Runs one experiment; see ExperimentRunner::run.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  return ExperimentRunner(cfg, opt).run();
}

/// The default grid: one config per kind, sharing data and seed.
inline std::vector<ExperimentConfig> default_grid(const ExperimentConfig& base = {}) {
  std::vector<ExperimentConfig> grid;
  for (const auto& [kind, name] : experiment_kind_names()) {
    ExperimentConfig c = base;
    c.kind = kind;
    c.id = name;
    grid.push_back(c);
  }
  return grid;
}

}  // namespace slt
