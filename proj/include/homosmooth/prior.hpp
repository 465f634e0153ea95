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
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "homosmooth/distribution.hpp"
#include "homosmooth/homophone_index.hpp"
#include "homosmooth/lexicon.hpp"
#include "homosmooth/ngram_lm.hpp"
#include "homosmooth/syllable.hpp"
#include "homosmooth/vocabulary.hpp"

namespace homosmooth {

// Mass split for the homophone prior: truth character, homophone set,
// everything else.
struct HomoMasses {
  double truth = 0.6;
  double homo = 0.3;
  double other = 0.1;

  void validate() const {
    for (double m : {truth, homo, other}) {
      if (m < 0.0 || m > 1.0) throw std::invalid_argument("mass parameter outside [0, 1]");
    }
    if (std::abs(truth + homo + other - 1.0) > 1e-12) {
      throw std::invalid_argument("homophone masses must sum to 1");
    }
  }
};

// Extended split with a share for fuzzy-pronunciation neighbours.
struct FuzzyMasses {
  double truth = 0.6;
  double homo = 0.15;
  double simi = 0.15;
  double other = 0.1;

  void validate() const {
    for (double m : {truth, homo, simi, other}) {
      if (m < 0.0 || m > 1.0) throw std::invalid_argument("mass parameter outside [0, 1]");
    }
    if (std::abs(truth + homo + simi + other - 1.0) > 1e-12) {
      throw std::invalid_argument("fuzzy masses must sum to 1");
    }
  }
};

inline SmoothingDistribution uniform_prior(int k) { return SmoothingDistribution::uniform(k); }

// Unigram prior with a small floor so no character ends up with exactly
// zero mass: p'(i) = (p(i) + eps) / (1 + K * eps). Zero-count characters
// all share the floor value, which becomes the tail.
inline SmoothingDistribution unigram_prior(const UnigramDistribution& unigram,
                                           double floor_eps = 1e-8) {
  int k = unigram.k();
  double denom = 1.0 + static_cast<double>(k) * floor_eps;
  std::vector<std::pair<int, double>> entries;
  for (int i = 0; i < k; ++i) {
    double p = unigram.probs[static_cast<size_t>(i)];
    if (p > 0.0) entries.emplace_back(i, (p + floor_eps) / denom);
  }
  return SmoothingDistribution(k, std::move(entries), floor_eps / denom);
}

// The homophone-based prior: `truth` on the ground-truth index, `homo`
// shared equally by the N homophones, `other` spread uniformly over the
// remaining K-(N+1) characters.
inline SmoothingDistribution homophone_prior(int k0, const std::vector<int>& homo, int k,
                                             const HomoMasses& masses = {}) {
  masses.validate();
  int n = static_cast<int>(homo.size());
  if (n == 0) throw std::invalid_argument("no homophones; use dispatch");
  if (k <= n + 1) throw std::invalid_argument("degenerate vocabulary: K <= N+1");
  std::vector<std::pair<int, double>> entries;
  entries.reserve(homo.size() + 1);
  entries.emplace_back(k0, masses.truth);
  double share = masses.homo / static_cast<double>(n);
  for (int h : homo) {
    if (h == k0) throw std::invalid_argument("homophone set contains the character itself");
    entries.emplace_back(h, share);
  }
  double tail = masses.other / static_cast<double>(k - (n + 1));
  return SmoothingDistribution(k, std::move(entries), tail);
}

// Fuzzy extension: separate shares for exact homophones and fuzzy
// neighbours. When exactly one of the sets is empty its share moves to
// the other, so the single-set case reduces to the plain homophone prior.
inline SmoothingDistribution fuzzy_homophone_prior(int k0, const std::vector<int>& homo,
                                                   const std::vector<int>& simi, int k,
                                                   const FuzzyMasses& masses = {}) {
  masses.validate();
  int n = static_cast<int>(homo.size());
  int m = static_cast<int>(simi.size());
  if (n == 0 && m == 0) throw std::invalid_argument("no homophones or fuzzy neighbours; use dispatch");
  if (k <= n + m + 1) throw std::invalid_argument("degenerate vocabulary: K <= N+M+1");
  std::vector<std::pair<int, double>> entries;
  entries.reserve(static_cast<size_t>(n + m) + 1);
  entries.emplace_back(k0, masses.truth);
  if (n > 0) {
    double share = (m > 0 ? masses.homo : masses.homo + masses.simi) / static_cast<double>(n);
    for (int h : homo) entries.emplace_back(h, share);
  }
  if (m > 0) {
    double share = (n > 0 ? masses.simi : masses.simi + masses.homo) / static_cast<double>(m);
    for (int s : simi) entries.emplace_back(s, share);
  }
  double tail = masses.other / static_cast<double>(k - (n + m + 1));
  return SmoothingDistribution(k, std::move(entries), tail);
}

enum class Strategy { uniform, unigram, homo_unigram, homo_ngram, homo_fuzzy };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::uniform: return "uniform";
    case Strategy::unigram: return "unigram";
    case Strategy::homo_unigram: return "homo_unigram";
    case Strategy::homo_ngram: return "homo_ngram";
    case Strategy::homo_fuzzy: return "homo_fuzzy";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "uniform") return Strategy::uniform;
  if (s == "unigram") return Strategy::unigram;
  if (s == "homo_unigram") return Strategy::homo_unigram;
  if (s == "homo_ngram") return Strategy::homo_ngram;
  if (s == "homo_fuzzy") return Strategy::homo_fuzzy;
  throw std::invalid_argument("unknown smoothing strategy: " + std::string(s));
}

// Everything a prior builder needs. Resource pointers are borrowed and
// must outlive the config; only the resources the strategy uses have to
// be present.
struct StrategyConfig {
  Strategy kind = Strategy::homo_unigram;
  int k = 0;
  HomoMasses homo_masses;
  FuzzyMasses fuzzy_masses;
  const UnigramDistribution* unigram = nullptr;
  const BigramLM* bigram = nullptr;
  const HomophoneIndex* index = nullptr;
  const FuzzyRules* rules = nullptr;
  double unigram_floor = 1e-8;

  void validate() const {
    if (k < 1) throw std::invalid_argument("strategy config: vocabulary size not set");
    homo_masses.validate();
    fuzzy_masses.validate();
    bool needs_index = kind == Strategy::homo_unigram || kind == Strategy::homo_ngram ||
                       kind == Strategy::homo_fuzzy;
    bool needs_unigram = kind == Strategy::unigram || kind == Strategy::homo_unigram ||
                         kind == Strategy::homo_fuzzy;
    if (needs_index && index == nullptr) {
      throw std::invalid_argument("strategy config: homophone index required");
    }
    if (needs_unigram && unigram == nullptr) {
      throw std::invalid_argument("strategy config: unigram distribution required");
    }
    if (kind == Strategy::homo_ngram && bigram == nullptr) {
      throw std::invalid_argument("strategy config: bigram LM required");
    }
    if (kind == Strategy::homo_fuzzy && rules == nullptr) {
      throw std::invalid_argument("strategy config: fuzzy rules required");
    }
  }
};

// Builds the prior for one position. `syllable` empty means the character
// has no pronunciation and therefore no homophones; `prev` is the
// preceding ground-truth index (SOS at the sentence start) and is only
// consulted by the N-gram arm.
inline SmoothingDistribution build_prior(int k0, const std::optional<Syllable>& syllable,
                                         int prev, const StrategyConfig& cfg) {
  switch (cfg.kind) {
    case Strategy::uniform:
      return uniform_prior(cfg.k);
    case Strategy::unigram:
      return unigram_prior(*cfg.unigram, cfg.unigram_floor);
    case Strategy::homo_unigram: {
      if (syllable) {
        std::vector<int> homo = cfg.index->homophones(k0, *syllable);
        if (!homo.empty()) return homophone_prior(k0, homo, cfg.k, cfg.homo_masses);
      }
      return unigram_prior(*cfg.unigram, cfg.unigram_floor);
    }
    case Strategy::homo_ngram: {
      if (syllable) {
        std::vector<int> homo = cfg.index->homophones(k0, *syllable);
        if (!homo.empty()) return homophone_prior(k0, homo, cfg.k, cfg.homo_masses);
      }
      return cfg.bigram->predict(prev);
    }
    case Strategy::homo_fuzzy: {
      if (syllable) {
        std::vector<int> homo = cfg.index->homophones(k0, *syllable);
        std::vector<int> simi = fuzzy_neighbors(*cfg.index, k0, *syllable, *cfg.rules);
        if (!homo.empty() || !simi.empty()) {
          return fuzzy_homophone_prior(k0, homo, simi, cfg.k, cfg.fuzzy_masses);
        }
      }
      return unigram_prior(*cfg.unigram, cfg.unigram_floor);
    }
  }
  throw std::logic_error("unreachable strategy");
}

// Prior plus the ground-truth index it was built for.
struct PositionPrior {
  int k0 = 0;
  SmoothingDistribution prior;

  bool operator==(const PositionPrior& o) const { return k0 == o.k0 && prior == o.prior; }
};

// One prior per character position plus a final EOS position. The EOS
// prior is the one-hot on EOS: the delimiter has no homophones and mixing
// it with itself leaves the target unsmoothed there.
inline std::vector<PositionPrior> build_sequence_priors(const std::vector<std::string>& sentence,
                                                        const Vocabulary& vocabulary,
                                                        const Lexicon& lexicon,
                                                        const StrategyConfig& cfg) {
  std::vector<PositionPrior> out;
  out.reserve(sentence.size() + 1);
  std::vector<PronouncedChar> pron = pronounce_sentence(sentence, lexicon);
  int prev = vocabulary.sos();
  for (const auto& pc : pron) {
    int k0 = vocabulary.encode(pc.ch);
    out.push_back({k0, build_prior(k0, pc.syllable, prev, cfg)});
    prev = k0;
  }
  out.push_back({vocabulary.eos(),
                 SmoothingDistribution::one_hot(cfg.k, vocabulary.eos())});
  return out;
}

inline void export_priors(const std::vector<PositionPrior>& priors, std::ostream& os) {
  for (const auto& p : priors) {
    nlohmann::json j;
    j["k0"] = p.k0;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [idx, prob] : p.prior.entries()) {
      entries.push_back({idx, prob});
    }
    j["entries"] = std::move(entries);
    j["tail"] = p.prior.tail();
    j["k"] = p.prior.k();
    os << j.dump() << "\n";
  }
}

inline std::vector<PositionPrior> import_priors(std::istream& is) {
  std::vector<PositionPrior> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("k0") || !j.contains("entries") ||
        !j.contains("tail") || !j.contains("k")) {
      throw std::runtime_error("priors line " + std::to_string(line_no) +
                               ": malformed JSON object");
    }
    std::vector<std::pair<int, double>> entries;
    for (const auto& e : j["entries"]) {
      entries.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    }
    out.push_back({j["k0"].get<int>(),
                   SmoothingDistribution(j["k"].get<int>(), std::move(entries),
                                         j["tail"].get<double>())});
  }
  return out;
}

}  // namespace homosmooth
