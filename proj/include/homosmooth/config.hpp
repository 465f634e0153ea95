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

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "homosmooth/ngram_lm.hpp"
#include "homosmooth/prior.hpp"
#include "homosmooth/synthetic.hpp"
#include "homosmooth/toy_model.hpp"
#include "homosmooth/train.hpp"

namespace homosmooth {

// Flat experiment configuration. Every key can come from the JSON config
// file or be overridden by a --key value command-line flag; unknown keys
// are rejected so typos fail loudly.
struct ExperimentConfig {
  // paths
  std::string output_dir = ".";
  std::string corpus;
  std::string lexicon;
  std::string fuzzy_rules;
  std::string arpa;
  std::string vocab;

  std::optional<uint64_t> seed;

  // vocabulary
  int min_count = 1;

  // smoothing strategy
  std::string strategy = "homo_unigram";  // non_ls | uniform | unigram | homo_unigram | homo_ngram | homo_fuzzy
  std::string tone_mode = "sensitive";
  double truth_mass = 0.6;
  double homo_mass = 0.3;
  double other_mass = 0.1;
  double fuzzy_truth_mass = 0.6;
  double fuzzy_homo_mass = 0.15;
  double fuzzy_simi_mass = 0.15;
  double fuzzy_other_mass = 0.1;
  double unigram_floor = 1e-8;

  // loss
  double beta = 0.4;

  // language model
  std::string lm_smoothing = "add_k";  // add_k | interpolated
  double lm_add_k = 0.01;
  double lm_lambda = 0.9;

  // toy model
  int frame_dim = 8;
  int embed_dim = 8;
  int hidden_dim = 32;
  int attn_dim = 32;

  // optimizer
  double learning_rate = 0.05;
  double momentum = 0.8;
  double clip_norm = 5.0;
  int batch_size = 16;
  int epochs = 12;
  int ls_start_epoch = 0;
  int max_decode_len = 32;

  // synthetic language
  int num_classes = 20;
  std::vector<double> size_weights = {0.1, 0.3, 0.35, 0.25};
  int frames_min = 2;
  int frames_max = 3;
  double noise_sigma = 0.3;
  double transition_temperature = 1.0;
  double skew = 0.99;
  int len_min = 3;
  int len_max = 8;
  int train_sentences = 2000;
  int heldout_sentences = 300;

  // sweep
  std::vector<std::string> strategies = {"non_ls", "uniform", "unigram", "homo_unigram",
                                         "homo_ngram"};

  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "output_dir", "corpus", "lexicon", "fuzzy_rules", "arpa", "vocab", "seed",
        "min_count", "strategy", "tone_mode", "truth_mass", "homo_mass", "other_mass",
        "fuzzy_truth_mass", "fuzzy_homo_mass", "fuzzy_simi_mass", "fuzzy_other_mass",
        "unigram_floor", "beta", "lm_smoothing", "lm_add_k", "lm_lambda", "frame_dim",
        "embed_dim", "hidden_dim", "attn_dim", "learning_rate", "momentum", "clip_norm",
        "batch_size", "epochs", "ls_start_epoch", "max_decode_len", "num_classes",
        "size_weights", "frames_min", "frames_max", "noise_sigma",
        "transition_temperature", "skew", "len_min", "len_max", "train_sentences",
        "heldout_sentences", "strategies"};
    return keys;
  }

  void apply_json(const nlohmann::json& j) {
    for (const auto& [key, value] : j.items()) {
      if (!known_keys().count(key)) {
        throw std::invalid_argument("unknown config key: " + key);
      }
      apply_one(key, value);
    }
  }

  void apply_one(const std::string& key, const nlohmann::json& v) {
    auto s = [&] { return v.is_string() ? v.get<std::string>() : v.dump(); };
    auto d = [&] {
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return std::stod(v.get<std::string>());
      throw std::invalid_argument("config key '" + key + "' expects a number");
    };
    auto i = [&] {
      if (v.is_number_integer()) return v.get<int>();
      if (v.is_string()) return std::stoi(v.get<std::string>());
      throw std::invalid_argument("config key '" + key + "' expects an integer");
    };
    if (key == "output_dir") output_dir = s();
    else if (key == "corpus") corpus = s();
    else if (key == "lexicon") lexicon = s();
    else if (key == "fuzzy_rules") fuzzy_rules = s();
    else if (key == "arpa") arpa = s();
    else if (key == "vocab") vocab = s();
    else if (key == "seed") seed = static_cast<uint64_t>(v.is_string() ? std::stoull(s()) : v.get<uint64_t>());
    else if (key == "min_count") min_count = i();
    else if (key == "strategy") strategy = s();
    else if (key == "tone_mode") tone_mode = s();
    else if (key == "truth_mass") truth_mass = d();
    else if (key == "homo_mass") homo_mass = d();
    else if (key == "other_mass") other_mass = d();
    else if (key == "fuzzy_truth_mass") fuzzy_truth_mass = d();
    else if (key == "fuzzy_homo_mass") fuzzy_homo_mass = d();
    else if (key == "fuzzy_simi_mass") fuzzy_simi_mass = d();
    else if (key == "fuzzy_other_mass") fuzzy_other_mass = d();
    else if (key == "unigram_floor") unigram_floor = d();
    else if (key == "beta") beta = d();
    else if (key == "lm_smoothing") lm_smoothing = s();
    else if (key == "lm_add_k") lm_add_k = d();
    else if (key == "lm_lambda") lm_lambda = d();
    else if (key == "frame_dim") frame_dim = i();
    else if (key == "embed_dim") embed_dim = i();
    else if (key == "hidden_dim") hidden_dim = i();
    else if (key == "attn_dim") attn_dim = i();
    else if (key == "learning_rate") learning_rate = d();
    else if (key == "momentum") momentum = d();
    else if (key == "clip_norm") clip_norm = d();
    else if (key == "batch_size") batch_size = i();
    else if (key == "epochs") epochs = i();
    else if (key == "ls_start_epoch") ls_start_epoch = i();
    else if (key == "max_decode_len") max_decode_len = i();
    else if (key == "num_classes") num_classes = i();
    else if (key == "size_weights") {
      if (v.is_array()) size_weights = v.get<std::vector<double>>();
      else size_weights = nlohmann::json::parse(v.get<std::string>()).get<std::vector<double>>();
    } else if (key == "frames_min") frames_min = i();
    else if (key == "frames_max") frames_max = i();
    else if (key == "noise_sigma") noise_sigma = d();
    else if (key == "transition_temperature") transition_temperature = d();
    else if (key == "skew") skew = d();
    else if (key == "len_min") len_min = i();
    else if (key == "len_max") len_max = i();
    else if (key == "train_sentences") train_sentences = i();
    else if (key == "heldout_sentences") heldout_sentences = i();
    else if (key == "strategies") {
      if (v.is_array()) strategies = v.get<std::vector<std::string>>();
      else strategies = nlohmann::json::parse(v.get<std::string>()).get<std::vector<std::string>>();
    }
  }

  static ExperimentConfig load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config file is not valid JSON: " + std::string(e.what()));
    }
    ExperimentConfig cfg;
    cfg.apply_json(j);
    return cfg;
  }

  // Fills the seed from HOMOSMOOTH_SEED when the config leaves it unset.
  void apply_seed_env() {
    if (seed) return;
    const char* env = std::getenv("HOMOSMOOTH_SEED");
    if (env != nullptr && *env != '\0') seed = std::stoull(env);
  }

  uint64_t require_seed() const {
    if (!seed) {
      throw std::invalid_argument("seed is required (set \"seed\" or HOMOSMOOTH_SEED)");
    }
    return *seed;
  }

  void validate() const {
    if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must lie in [0, 1]");
    homo_masses().validate();
    fuzzy_masses().validate();
    static const std::set<std::string> known_strategies = {
        "non_ls", "uniform", "unigram", "homo_unigram", "homo_ngram", "homo_fuzzy"};
    if (!known_strategies.count(strategy)) {
      throw std::invalid_argument("unknown smoothing strategy: " + strategy);
    }
    for (const auto& st : strategies) {
      if (!known_strategies.count(st)) {
        throw std::invalid_argument("unknown smoothing strategy in sweep list: " + st);
      }
    }
    parse_tone_mode(tone_mode);
    if (lm_smoothing != "add_k" && lm_smoothing != "interpolated") {
      throw std::invalid_argument("lm_smoothing must be add_k or interpolated");
    }
    bigram_smoothing().validate();
    optimizer().validate();
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    if (max_decode_len < 0) throw std::invalid_argument("max_decode_len must be >= 0");
    if (frame_dim < 1 || embed_dim < 1 || hidden_dim < 1 || attn_dim < 1) {
      throw std::invalid_argument("model dimensions must be >= 1");
    }
  }

  HomoMasses homo_masses() const { return {truth_mass, homo_mass, other_mass}; }
  FuzzyMasses fuzzy_masses() const {
    return {fuzzy_truth_mass, fuzzy_homo_mass, fuzzy_simi_mass, fuzzy_other_mass};
  }

  BigramSmoothing bigram_smoothing() const {
    BigramSmoothing s;
    s.kind = lm_smoothing == "add_k" ? SmoothingKind::add_k : SmoothingKind::interpolated;
    s.add_k = lm_add_k;
    s.lambda = lm_lambda;
    return s;
  }

  ModelConfig model() const { return {frame_dim, embed_dim, hidden_dim, attn_dim}; }

  OptimizerConfig optimizer() const {
    OptimizerConfig o;
    o.learning_rate = learning_rate;
    o.momentum = momentum;
    o.clip_norm = clip_norm;
    o.batch_size = batch_size;
    o.epochs = epochs;
    o.ls_start_epoch = ls_start_epoch;
    return o;
  }

  SyntheticLanguageConfig synthetic() const {
    SyntheticLanguageConfig s;
    s.num_classes = num_classes;
    s.size_weights = size_weights;
    s.frame_dim = frame_dim;
    s.frames_min = frames_min;
    s.frames_max = frames_max;
    s.noise_sigma = noise_sigma;
    s.transition_temperature = transition_temperature;
    s.skew = skew;
    s.len_min = len_min;
    s.len_max = len_max;
    s.train_sentences = train_sentences;
    s.heldout_sentences = heldout_sentences;
    s.seed = require_seed();
    return s;
  }
};

}  // namespace homosmooth
