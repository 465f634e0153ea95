// Copyright (c) 2026 Homosmooth Authors
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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "homosmooth/config.hpp"
#include "homosmooth/edit_distance.hpp"
#include "homosmooth/experiment.hpp"
#include "homosmooth/gradcheck.hpp"
#include "homosmooth/homophone_index.hpp"
#include "homosmooth/lexicon.hpp"
#include "homosmooth/ngram_lm.hpp"
#include "homosmooth/prior.hpp"
#include "homosmooth/utf8.hpp"
#include "homosmooth/vocabulary.hpp"

namespace hs = homosmooth;
namespace fs = std::filesystem;

namespace {

// Config file first, then --key value overrides for any config key. The
// --config flag is accepted before or after the subcommand.
hs::ExperimentConfig make_config(std::string config_path,
                                 const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (size_t i = 0; i < extras.size();) {
    const std::string& flag = extras[i];
    if (flag.rfind("--", 0) != 0 || i + 1 >= extras.size()) {
      throw std::invalid_argument("expected --key value override, got: " + flag);
    }
    std::string key = flag.substr(2);
    if (key == "config") {
      config_path = extras[i + 1];
    } else if (hs::ExperimentConfig::known_keys().count(key)) {
      overrides.emplace_back(key, extras[i + 1]);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
    i += 2;
  }
  hs::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = hs::ExperimentConfig::load_file(config_path);
  for (const auto& [key, value] : overrides) {
    nlohmann::json v = nlohmann::json::parse(value, nullptr, false);
    if (v.is_discarded()) v = value;
    cfg.apply_one(key, v);
  }
  cfg.apply_seed_env();
  cfg.validate();
  return cfg;
}

hs::Vocabulary load_or_build_vocab(const hs::ExperimentConfig& cfg) {
  if (!cfg.vocab.empty()) {
    std::ifstream is(cfg.vocab);
    if (!is) throw std::runtime_error("cannot open vocabulary file: " + cfg.vocab);
    return hs::Vocabulary::load(is);
  }
  if (!cfg.corpus.empty()) {
    return hs::build_vocabulary(hs::read_lines(cfg.corpus), cfg.min_count);
  }
  throw std::invalid_argument("either \"vocab\" or \"corpus\" must be set");
}

int cmd_build_homophones(const hs::ExperimentConfig& cfg) {
  if (cfg.lexicon.empty()) throw std::invalid_argument("\"lexicon\" path is required");
  hs::Vocabulary vocab = load_or_build_vocab(cfg);
  hs::Lexicon lexicon = hs::parse_lexicon_file(cfg.lexicon, vocab);
  hs::HomophoneIndex index =
      hs::build_homophone_index(lexicon, vocab, hs::parse_tone_mode(cfg.tone_mode));
  hs::FuzzyRules rules = cfg.fuzzy_rules.empty() ? hs::FuzzyRules{}
                                                 : hs::parse_fuzzy_rules_file(cfg.fuzzy_rules);
  nlohmann::json report = hs::homophone_report(vocab, lexicon, index, rules);
  fs::create_directories(cfg.output_dir);
  hs::write_file(fs::path(cfg.output_dir) / "homophones.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_train_lm(const hs::ExperimentConfig& cfg) {
  if (cfg.corpus.empty()) throw std::invalid_argument("\"corpus\" path is required");
  hs::Vocabulary vocab = load_or_build_vocab(cfg);
  hs::BigramLM lm = hs::train_bigram(hs::read_lines(cfg.corpus), vocab, cfg.bigram_smoothing());
  fs::create_directories(cfg.output_dir);
  fs::path out = fs::path(cfg.output_dir) / "lm.arpa";
  std::ofstream os(out, std::ios::binary);
  hs::export_arpa(lm, vocab, os);
  std::cout << "wrote " << out.string() << " (K=" << vocab.size() << ")\n";
  return 0;
}

int cmd_build_priors(const hs::ExperimentConfig& cfg) {
  if (cfg.corpus.empty()) throw std::invalid_argument("\"corpus\" path is required");
  if (cfg.lexicon.empty()) throw std::invalid_argument("\"lexicon\" path is required");
  if (cfg.strategy == "non_ls") {
    throw std::invalid_argument("non_ls has no prior table; pick a smoothing strategy");
  }
  hs::Vocabulary vocab = load_or_build_vocab(cfg);
  hs::Lexicon lexicon = hs::parse_lexicon_file(cfg.lexicon, vocab);
  std::vector<std::string> lines = hs::read_lines(cfg.corpus);

  hs::StrategyConfig sc;
  sc.kind = hs::parse_strategy(cfg.strategy);
  sc.k = vocab.size();
  sc.homo_masses = cfg.homo_masses();
  sc.fuzzy_masses = cfg.fuzzy_masses();
  sc.unigram_floor = cfg.unigram_floor;
  hs::UnigramDistribution unigram = hs::count_unigrams(lines, vocab);
  sc.unigram = &unigram;
  hs::HomophoneIndex index =
      hs::build_homophone_index(lexicon, vocab, hs::parse_tone_mode(cfg.tone_mode));
  sc.index = &index;
  hs::BigramLM lm;
  if (sc.kind == hs::Strategy::homo_ngram) {
    lm = cfg.arpa.empty() ? hs::train_bigram(lines, vocab, cfg.bigram_smoothing())
                          : hs::import_arpa_file(cfg.arpa, vocab);
    sc.bigram = &lm;
  }
  hs::FuzzyRules rules;
  if (sc.kind == hs::Strategy::homo_fuzzy) {
    rules = cfg.fuzzy_rules.empty() ? hs::default_fuzzy_rules()
                                    : hs::parse_fuzzy_rules_file(cfg.fuzzy_rules);
    sc.rules = &rules;
  }
  sc.validate();

  fs::create_directories(cfg.output_dir);
  fs::path out = fs::path(cfg.output_dir) / "priors.jsonl";
  std::ofstream os(out, std::ios::binary);
  size_t positions = 0;
  for (const auto& line : lines) {
    auto priors = hs::build_sequence_priors(hs::utf8::split(line), vocab, lexicon, sc);
    hs::export_priors(priors, os);
    positions += priors.size();
  }
  std::cout << "wrote " << out.string() << " (" << positions << " positions, strategy "
            << cfg.strategy << ")\n";
  return 0;
}

int cmd_gradcheck(const hs::ExperimentConfig& cfg) {
  uint64_t seed = cfg.require_seed();
  bool all_pass = true;
  auto report = [&](const std::vector<hs::GradCheckResult>& results) {
    for (const auto& r : results) {
      std::printf("%s %-24s rel_err=%.3e\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                  r.rel_error);
      all_pass = all_pass && r.pass;
    }
  };
  report(hs::run_op_gradchecks(seed));
  report(hs::run_model_gradcheck(seed));
  std::printf("%s\n", all_pass ? "all gradient checks passed" : "gradient checks FAILED");
  return all_pass ? 0 : 1;
}

int cmd_gen_toy(const hs::ExperimentConfig& cfg) {
  hs::ToyData toy = hs::run_gen_toy(cfg);
  std::cout << "generated " << toy.train.size() << " train / " << toy.heldout.size()
            << " heldout utterances, K=" << toy.vocab.size() << " into " << cfg.output_dir
            << "\n";
  return 0;
}

int cmd_train_toy(const hs::ExperimentConfig& cfg) {
  hs::ToyData toy = hs::load_toy_dir(cfg.output_dir);
  hs::TrainOutcome outcome = hs::run_train_strategy(cfg, toy, cfg.strategy, &std::cout);
  std::cout << "strategy " << outcome.label << ": final heldout CER " << outcome.final_cer
            << "%, homophone mass mean " << outcome.probe.homo_mass_mean
            << ", median log gap " << outcome.probe.log_gap_median << "\n";
  return 0;
}

int cmd_decode_toy(const hs::ExperimentConfig& cfg, const std::string& checkpoint,
                   const std::string& input, const std::string& output) {
  fs::path dir(cfg.output_dir);
  std::string ckpt = checkpoint.empty()
                         ? (dir / ("checkpoint_" + cfg.strategy + ".json")).string()
                         : checkpoint;
  std::ifstream cis(ckpt);
  if (!cis) throw std::runtime_error("cannot open checkpoint: " + ckpt);
  hs::ToyModelParams params = hs::load_checkpoint(cis);

  std::string in_path = input.empty() ? (dir / "heldout.jsonl").string() : input;
  std::ifstream iis(in_path);
  if (!iis) throw std::runtime_error("cannot open dataset: " + in_path);
  std::vector<hs::Utterance> utts = hs::read_utterances(iis);

  std::ifstream vis((dir / "vocab.txt").string());
  if (!vis) throw std::runtime_error("missing vocab.txt in " + cfg.output_dir);
  hs::Vocabulary vocab = hs::Vocabulary::load(vis);

  std::string out_path = output.empty() ? (dir / ("hyp_" + cfg.strategy + ".txt")).string()
                                        : output;
  std::ostringstream hyp;
  for (const auto& utt : utts) {
    std::vector<int> decoded = hs::greedy_decode(params, utt.frames, cfg.max_decode_len,
                                                 vocab.sos(), vocab.eos());
    hyp << vocab.decode_line(decoded) << "\n";
  }
  hs::write_file(out_path, hyp.str());
  std::cout << "decoded " << utts.size() << " utterances into " << out_path << "\n";
  return 0;
}

double file_cer(const std::string& ref_path, const std::string& hyp_path) {
  std::vector<std::string> ref_lines = hs::read_lines(ref_path);
  std::vector<std::string> hyp_lines = hs::read_lines(hyp_path);
  while (!ref_lines.empty() && ref_lines.back().empty()) ref_lines.pop_back();
  while (!hyp_lines.empty() && hyp_lines.back().empty()) hyp_lines.pop_back();
  std::vector<std::vector<std::string>> refs, hyps;
  for (const auto& l : ref_lines) refs.push_back(hs::utf8::split(l));
  for (const auto& l : hyp_lines) hyps.push_back(hs::utf8::split(l));
  return hs::corpus_cer(refs, hyps);
}

int cmd_eval_cer(const hs::ExperimentConfig& cfg, const std::string& ref,
                 const std::string& hyp, const std::string& sweep_dir) {
  if (!sweep_dir.empty()) {
    fs::path dir(sweep_dir);
    std::string ref_path = (dir / "ref.txt").string();
    std::printf("strategy        heldout_cer%%\n");
    for (const auto& label : cfg.strategies) {
      fs::path hyp_path = dir / ("hyp_" + label + ".txt");
      if (!fs::exists(hyp_path)) continue;
      std::printf("%-15s %.4f\n", label.c_str(), file_cer(ref_path, hyp_path.string()));
    }
    return 0;
  }
  if (ref.empty() || hyp.empty()) {
    throw std::invalid_argument("eval-cer needs --ref and --hyp (or --sweep-dir)");
  }
  std::printf("CER: %.4f%%\n", file_cer(ref, hyp));
  return 0;
}

int cmd_sweep(const hs::ExperimentConfig& cfg) {
  std::vector<hs::SweepRow> rows = hs::run_sweep(cfg, &std::cout);
  std::cout << "\n" << hs::sweep_table_text(rows);
  std::cout << "table written to " << (fs::path(cfg.output_dir) / "cer_table.txt").string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homophone-based label smoothing toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flat schema, see README)");

  std::string decode_checkpoint, decode_input, decode_output;
  std::string cer_ref, cer_hyp, cer_sweep_dir;

  auto add_sub = [&](const char* name, const char* desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->allow_extras();
    return sub;
  };
  CLI::App* s_homophones = add_sub("build-homophones", "Build vocabulary, lexicon and homophone index; write a stats report");
  CLI::App* s_train_lm = add_sub("train-lm", "Train a bigram LM on a corpus and export it as ARPA");
  CLI::App* s_priors = add_sub("build-priors", "Build per-position smoothing priors for a corpus");
  CLI::App* s_gradcheck = add_sub("gradcheck", "Check analytic gradients against finite differences");
  CLI::App* s_gen = add_sub("gen-toy", "Generate the synthetic homophone language dataset");
  CLI::App* s_train = add_sub("train-toy", "Train the toy model with the configured strategy");
  CLI::App* s_decode = add_sub("decode-toy", "Greedy-decode a dataset with a trained checkpoint");
  s_decode->add_option("--checkpoint", decode_checkpoint, "checkpoint file (default: per strategy)");
  s_decode->add_option("--input", decode_input, "dataset JSONL (default: heldout.jsonl)");
  s_decode->add_option("--output", decode_output, "hypothesis text output");
  CLI::App* s_cer = add_sub("eval-cer", "Pooled character error rate of hypothesis vs reference");
  s_cer->add_option("--ref", cer_ref, "reference text, one utterance per line");
  s_cer->add_option("--hyp", cer_hyp, "hypothesis text, line-aligned with --ref");
  s_cer->add_option("--sweep-dir", cer_sweep_dir, "print the CER table for a sweep directory");
  CLI::App* s_sweep = add_sub("sweep", "Generate data and train every configured strategy");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    hs::ExperimentConfig cfg = make_config(config_path, sub->remaining());
    if (sub == s_homophones) return cmd_build_homophones(cfg);
    if (sub == s_train_lm) return cmd_train_lm(cfg);
    if (sub == s_priors) return cmd_build_priors(cfg);
    if (sub == s_gradcheck) return cmd_gradcheck(cfg);
    if (sub == s_gen) return cmd_gen_toy(cfg);
    if (sub == s_train) return cmd_train_toy(cfg);
    if (sub == s_decode) return cmd_decode_toy(cfg, decode_checkpoint, decode_input, decode_output);
    if (sub == s_cer) return cmd_eval_cer(cfg, cer_ref, cer_hyp, cer_sweep_dir);
    if (sub == s_sweep) return cmd_sweep(cfg);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
