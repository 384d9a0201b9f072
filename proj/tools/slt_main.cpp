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

// Command-line front end: data generation, training, decoding, evaluation
// and the experiment grid.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slt/experiment.hpp"

namespace {

using slt::Error;
using Model = slt::SeqModel<float>;
using Joint = slt::JointModel<float>;

/// Error raised by a subcommand, carrying the stage that failed.
struct CliFailure {
  std::string stage;
  std::string what;
};

template <class Fn>
auto in_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const slt::StageError& e) {
    throw CliFailure{e.stage(), e.what()};
  } catch (const std::exception& e) {
    throw CliFailure{stage, e.what()};
  }
}

slt::ExperimentConfig load_config(const std::string& path) {
  return path.empty() ? slt::ExperimentConfig{} : slt::load_experiment_config(path);
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

slt::ModelConfig role_config(const slt::ExperimentRunner& r, const std::string& role) {
  if (role == "asr") return r.models().asr;
  if (role == "mt") return r.models().mt;
  if (role == "e2e") return r.models().e2e;
  throw Error("unknown role '" + role + "' (expected asr, mt or e2e)");
}

const slt::Vocabulary& output_vocab(const slt::ExperimentRunner& r, const std::string& role) {
  return role == "asr" ? r.vocabularies().asr : r.vocabularies().target;
}

std::unique_ptr<Model> load_model(const slt::ExperimentRunner& r, const std::string& role, const std::string& path) {
  slt::Rng rng(0);
  auto m = std::make_unique<Model>(role_config(r, role), rng);
  slt::load_parameters(m->named_parameters(), slt::load_checkpoint(path));
  return m;
}

nlohmann::json hyp_json(const slt::Hypothesis& h, const slt::Vocabulary& v, double alpha) {
  return {{"text", slt::normalize_text(slt::detokenize(h.tokens, v))},
          {"tokens", h.tokens},
          {"logprob", h.logprob},
          {"norm", slt::normalized_score(h, alpha)}};
}

// ---- subcommands ----

struct Common {
  std::string config;
};

int cmd_gen(const Common& c, const std::string& out_dir) {
  auto cfg = in_stage("config", [&] { return load_config(c.config); });
  auto data = in_stage("gen", [&] { return slt::generate_data(cfg.data); });
  in_stage("write", [&] {
    slt::write_data(out_dir, data, cfg.data);
    return 0;
  });
  std::cout << "dataset " << data.id << ": " << data.train.size() << " train, " << data.dev.size() << " dev, "
            << data.test.size() << " test -> " << out_dir << "\n";
  return 0;
}

int cmd_train(const Common& c, const std::string& role, const std::string& out_dir) {
  slt::ExperimentRunner r(load_config(c.config), {});
  in_stage("prepare", [&] {
    r.prepare();
    return 0;
  });
  const auto& cfg = r.config();
  std::filesystem::create_directories(out_dir);
  auto save_epoch = [&](int epoch, const slt::TrainResult& res) {
    slt::save_checkpoint(out_dir + "/epoch" + std::to_string(epoch + 1) + ".ckpt", res.checkpoints.back());
    std::cerr << role << " epoch " << epoch + 1 << " loss " << res.epoch_loss.back() << "\n";
  };
  slt::TrainResult res = in_stage("train", [&] {
    slt::Rng rng(slt::detail::derive_seed(cfg.seed, 100));
    auto data = r.examples(role);
    slt::TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    if (role == "joint") {
      Joint jm(r.models().asr, r.models().mt, cfg.connector, rng);
      return slt::train_joint(jm, data, tc, save_epoch);
    }
    Model m(role_config(r, role), rng);
    return slt::train(m, data, tc, save_epoch);
  });
  in_stage("average", [&] {
    slt::save_checkpoint(out_dir + "/averaged.ckpt", res.averaged(cfg.train.average_last));
    open_out(out_dir + "/loss.csv") << slt::loss_curve_csv(res.curve);
    return 0;
  });
  for (const auto& issue : res.issues)
    std::cerr << "warning: epoch " << issue.epoch << " batch " << issue.batch << ": " << issue.what << "\n";
  std::cout << role << ": " << res.checkpoints.size() << " epochs, " << res.steps << " steps, averaged last "
            << std::min<std::size_t>(std::size_t(cfg.train.average_last), res.checkpoints.size()) << " -> "
            << out_dir << "/averaged.ckpt\n";
  return 0;
}

int cmd_average(const std::vector<std::string>& inputs, const std::string& out) {
  auto avg = in_stage("average", [&] {
    std::vector<slt::Checkpoint> ckpts;
    for (const auto& p : inputs) ckpts.push_back(slt::load_checkpoint(p));
    return slt::average_checkpoints(ckpts);
  });
  in_stage("write", [&] {
    slt::save_checkpoint(out, avg);
    return 0;
  });
  std::cout << "averaged " << inputs.size() << " checkpoints -> " << out << "\n";
  return 0;
}

int cmd_decode(const Common& c, const std::string& role, const std::string& ckpt, const std::string& split,
               const std::string& out, const std::string& nbest) {
  slt::ExperimentRunner r(load_config(c.config), {});
  in_stage("prepare", [&] {
    r.prepare();
    return 0;
  });
  auto model = in_stage("load", [&] { return load_model(r, role, ckpt); });
  const auto& vocab = output_vocab(r, role);
  in_stage("decode", [&] {
    auto tsv = open_out(out);
    std::ofstream nb;
    if (!nbest.empty()) nb = open_out(nbest);
    for (const auto& ex : r.data().split(split)) {
      slt::Scorer scorer;
      slt::DecodeConfig d;
      std::vector<int> ids;
      if (role == "mt") {
        ids = slt::tokenize(ex.source_text, r.config().mt_source_granularity, r.vocabularies().mt_source);
        d = r.mt_config();
        if (d.max_len == 0) d.max_len = slt::mt_max_len(ids);
        scorer = slt::text_scorer<float>({model.get()}, ids);
      } else {
        if (!ex.features) throw Error("example " + ex.id + " has no features");
        d = r.asr_config(*ex.features);
        scorer = slt::speech_scorer<float>({model.get()}, *ex.features);
      }
      auto hyps = slt::beam_search(scorer, d);
      const auto& best = hyps.front();
      tsv << ex.id << '\t' << slt::normalize_text(slt::detokenize(best.tokens, vocab)) << '\t' << best.logprob
          << '\t' << slt::normalized_score(best, d.length_penalty_alpha) << '\n';
      if (nb) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& h : hyps) list.push_back(hyp_json(h, vocab, d.length_penalty_alpha));
        nb << nlohmann::json{{"id", ex.id}, {"nbest", list}}.dump() << '\n';
      }
    }
    return 0;
  });
  std::cout << "decoded " << r.data().split(split).size() << " " << split << " utterances -> " << out << "\n";
  return 0;
}

int cmd_cascade(const Common& c, const std::string& asr_ckpt, const std::string& mt_ckpt, const std::string& mode_s,
                const std::string& split, const std::string& out, const std::string& nbest) {
  slt::ExperimentRunner r(load_config(c.config), {});
  in_stage("prepare", [&] {
    r.prepare();
    return 0;
  });
  const auto mode = in_stage("config", [&] { return slt::cascade_mode_from_string(mode_s); });
  auto asr = in_stage("load", [&] { return load_model(r, "asr", asr_ckpt); });
  auto mt = in_stage("load", [&] { return load_model(r, "mt", mt_ckpt); });
  const auto& v = r.vocabularies();
  slt::TextBridge bridge{&v.asr, &v.mt_source, r.config().mt_source_granularity};
  in_stage("decode", [&] {
    auto tsv = open_out(out);
    std::ofstream nb;
    if (!nbest.empty()) nb = open_out(nbest);
    const double alpha = r.config().mt_decode.length_penalty_alpha;
    for (const auto& ex : r.data().split(split)) {
      if (!ex.features) throw Error("example " + ex.id + " has no features");
      auto res = slt::cascade_decode<float>(*asr, *mt, bridge, *ex.features, mode, r.asr_config(*ex.features),
                                            r.mt_config());
      tsv << ex.id << '\t' << slt::normalize_text(slt::detokenize(res.best.mt.tokens, v.target)) << '\t'
          << res.best.asr.logprob + res.best.mt.logprob << '\t' << res.best.score << '\n';
      if (nb) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& p : res.pairs) {
          list.push_back({{"asr", hyp_json(p.asr, v.asr, r.config().asr_decode.length_penalty_alpha)},
                          {"mt", hyp_json(p.mt, v.target, alpha)},
                          {"score", p.score}});
        }
        nb << nlohmann::json{{"id", ex.id}, {"pairs", list}, {"skipped", res.skipped}}.dump() << '\n';
      }
    }
    return 0;
  });
  std::cout << "cascade (" << mode_s << ") decoded " << split << " -> " << out << "\n";
  return 0;
}

/// Reads `id \t text ...` lines.
std::map<std::string, std::string> read_hyps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::map<std::string, std::string> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(path + " line " + std::to_string(n) + ": expected id<TAB>text");
    const auto end = line.find('\t', tab + 1);
    out[line.substr(0, tab)] = line.substr(tab + 1, end == std::string::npos ? std::string::npos : end - tab - 1);
  }
  return out;
}

int cmd_evaluate(const std::string& data_path, const std::string& side, const std::string& hyps_path,
                 const std::string& out) {
  auto [refs, hyps] = in_stage("load", [&] {
    const auto data = slt::read_dataset(data_path);
    const auto byid = read_hyps(hyps_path);
    std::vector<std::string> refs, hyps;
    for (const auto& ex : data) {
      auto it = byid.find(ex.id);
      if (it == byid.end()) throw Error("no hypothesis for " + ex.id);
      refs.push_back(slt::normalize_text(side == "source" ? ex.source_text : ex.target_text));
      hyps.push_back(it->second);
    }
    return std::pair{refs, hyps};
  });
  auto rep = in_stage("evaluate", [&] { return slt::evaluate(refs, hyps); });
  const auto& b = rep.bleu_components;
  nlohmann::json j = {{"wer", rep.wer},
                      {"cer", rep.cer},
                      {"bleu", rep.bleu},
                      {"sentences", rep.n_sentences},
                      {"reference_words", rep.reference_words},
                      {"substitutions", rep.word_counts.substitutions},
                      {"insertions", rep.word_counts.insertions},
                      {"deletions", rep.word_counts.deletions},
                      {"bleu_matches", b.matches},
                      {"bleu_totals", b.totals},
                      {"hyp_len", b.hyp_len},
                      {"ref_len", b.ref_len}};
  if (!out.empty()) {
    in_stage("write", [&] {
      open_out(out) << j.dump(2) << '\n';
      return 0;
    });
  }
  std::printf("WER %.2f CER %.2f BLEU %.2f (%zu sentences)\n", rep.wer, rep.cer, rep.bleu, rep.n_sentences);
  return 0;
}

int cmd_experiment(const Common& c, const std::vector<std::string>& kinds, bool grid, const std::string& results,
                   bool no_cache) {
  auto base = in_stage("config", [&] { return load_config(c.config); });
  std::vector<slt::ExperimentConfig> configs;
  if (grid) {
    configs = slt::default_grid(base);
  } else if (!kinds.empty()) {
    for (const auto& k : kinds) {
      auto cfg = base;
      cfg.kind = in_stage("config", [&] { return slt::experiment_kind_from_string(k); });
      if (c.config.empty() || kinds.size() > 1) cfg.id = k;
      configs.push_back(cfg);
    }
  } else {
    configs.push_back(base);
  }
  slt::RunOptions opt;
  opt.results_dir = results;
  opt.cache_models = !no_cache;
  opt.log = [](const std::string& m) { std::cerr << m << std::endl; };
  for (const auto& cfg : configs) {
    auto rows = in_stage("experiment", [&] { return slt::run_experiment(cfg, opt); });
    for (const auto& row : rows) std::cout << slt::format_row(row) << "\n";
  }
  return 0;
}

int cmd_report(const std::string& results, const std::string& dataset, const std::string& out,
               const std::string& json_out) {
  auto rows = in_stage("load", [&] { return slt::read_rows(slt::results_file(results)); });
  if (!dataset.empty()) std::erase_if(rows, [&](const slt::ResultRow& r) { return r.dataset_id != dataset; });
  auto rep = in_stage("report", [&] { return slt::compare_report(rows); });
  in_stage("write", [&] {
    slt::write_report(rep, out, json_out);
    return 0;
  });
  std::cout << rep.text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech translation toolkit: cascade, end-to-end and joint models on a synthetic task"};
  app.require_subcommand(1);
  Common common;
  const std::string results_default = slt::results_dir_from_env();

  auto* gen = app.add_subcommand("gen", "Generate the synthetic corpus with features");
  std::string gen_out = "data";
  gen->add_option("-c,--config", common.config, "Experiment config (JSON)");
  gen->add_option("-o,--out", gen_out, "Output directory")->capture_default_str();

  auto* tr = app.add_subcommand("train", "Train one model; writes per-epoch and averaged checkpoints");
  std::string role = "asr", train_out = "model";
  tr->add_option("-c,--config", common.config, "Experiment config (JSON)");
  tr->add_option("-r,--role", role, "asr | mt | e2e | joint")->capture_default_str();
  tr->add_option("-o,--out", train_out, "Output directory")->capture_default_str();

  auto* av = app.add_subcommand("average", "Average checkpoints elementwise");
  std::vector<std::string> av_in;
  std::string av_out;
  av->add_option("inputs", av_in, "Checkpoints")->required();
  av->add_option("-o,--out", av_out, "Output checkpoint")->required();

  auto* dec = app.add_subcommand("decode", "Beam-search decode a split with one model");
  std::string ckpt, split = "dev", dec_out = "hyps.tsv", nbest;
  dec->add_option("-c,--config", common.config, "Experiment config (JSON)");
  dec->add_option("-r,--role", role, "asr | mt | e2e")->capture_default_str();
  dec->add_option("-m,--checkpoint", ckpt, "Model checkpoint")->required();
  dec->add_option("-s,--split", split, "dev | test | train")->capture_default_str();
  dec->add_option("-o,--out", dec_out, "TSV: id, hypothesis, logprob, normalized score")->capture_default_str();
  dec->add_option("--nbest", nbest, "Optional n-best JSONL");

  auto* cas = app.add_subcommand("cascade", "Cascade ASR -> MT decoding");
  std::string asr_ckpt, mt_ckpt, mode = "ranked_n_best";
  cas->add_option("-c,--config", common.config, "Experiment config (JSON)");
  cas->add_option("--asr", asr_ckpt, "ASR checkpoint")->required();
  cas->add_option("--mt", mt_ckpt, "MT checkpoint")->required();
  cas->add_option("--mode", mode, "one_best | n_best | ranked_n_best")->capture_default_str();
  cas->add_option("-s,--split", split, "dev | test | train")->capture_default_str();
  cas->add_option("-o,--out", dec_out, "TSV output")->capture_default_str();
  cas->add_option("--nbest", nbest, "Optional JSONL of all scored pairs");

  auto* ev = app.add_subcommand("evaluate", "Score hypotheses against a dataset");
  std::string ev_data, side = "target", ev_hyps, ev_out;
  ev->add_option("-d,--data", ev_data, "Dataset JSONL")->required();
  ev->add_option("--side", side, "source | target")->check(CLI::IsMember({"source", "target"}))->capture_default_str();
  ev->add_option("--hyps", ev_hyps, "Hypothesis TSV (id<TAB>text...)")->required();
  ev->add_option("-o,--out", ev_out, "Report JSON");

  auto* ex = app.add_subcommand("experiment", "Run experiments and append result rows");
  std::vector<std::string> kinds;
  bool grid = false, no_cache = false;
  std::string results = results_default;
  ex->add_option("-c,--config", common.config, "Experiment config (JSON)");
  ex->add_option("-k,--kind", kinds, "Experiment kind(s), overriding the config");
  ex->add_flag("--grid", grid, "Run every kind");
  ex->add_flag("--no-cache", no_cache, "Retrain instead of reusing cached checkpoints");
  ex->add_option("--results", results, "Results directory (default $SLT_RESULTS_DIR or ./results)");

  auto* rp = app.add_subcommand("report", "Comparison tables from the results file");
  std::string dataset, rp_out, rp_json;
  rp->add_option("--results", results, "Results directory (default $SLT_RESULTS_DIR or ./results)");
  rp->add_option("--dataset", dataset, "Only rows of this dataset id");
  rp->add_option("-o,--out", rp_out, "Text table output");
  rp->add_option("--json", rp_json, "Machine-readable output");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(common, gen_out);
    if (*tr) return cmd_train(common, role, train_out);
    if (*av) return cmd_average(av_in, av_out);
    if (*dec) return cmd_decode(common, role, ckpt, split, dec_out, nbest);
    if (*cas) return cmd_cascade(common, asr_ckpt, mt_ckpt, mode, split, dec_out, nbest);
    if (*ev) return cmd_evaluate(ev_data, side, ev_hyps, ev_out);
    if (*ex) return cmd_experiment(common, kinds, grid, results, no_cache);
    if (*rp) return cmd_report(results, dataset, rp_out, rp_json);
  } catch (const CliFailure& f) {
    std::cerr << "error [" << f.stage << "]: " << f.what << "\n";
    return 1;
  }
  return 0;
}
