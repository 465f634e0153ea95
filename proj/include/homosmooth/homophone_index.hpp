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

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homosmooth/lexicon.hpp"
#include "homosmooth/syllable.hpp"
#include "homosmooth/vocabulary.hpp"

namespace homosmooth {

// Symmetric pairs of confusable initials / finals, e.g. z~zh or in~ing.
struct FuzzyRules {
  std::set<std::pair<std::string, std::string>> initial_pairs;
  std::set<std::pair<std::string, std::string>> final_pairs;

  bool empty() const { return initial_pairs.empty() && final_pairs.empty(); }

  std::vector<std::string> initial_partners(const std::string& x) const {
    return partners(initial_pairs, x);
  }
  std::vector<std::string> final_partners(const std::string& x) const {
    return partners(final_pairs, x);
  }

 private:
  static std::vector<std::string> partners(
      const std::set<std::pair<std::string, std::string>>& pairs, const std::string& x) {
    std::vector<std::string> out;
    for (const auto& [a, b] : pairs) {
      if (a == x) out.push_back(b);
      if (b == x) out.push_back(a);
    }
    return out;
  }
};

// Parses fuzzy-rule lines of the form `initial z zh` / `final in ing`.
// Both phonemes must belong to the closed pinyin sets.
inline FuzzyRules parse_fuzzy_rules(std::istream& is) {
  FuzzyRules rules;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string kind, a, b;
    if (!(ss >> kind >> a >> b)) {
      throw std::runtime_error("fuzzy rules line " + std::to_string(line_no) +
                               ": expected KIND A B");
    }
    if (a == b) {
      throw std::runtime_error("fuzzy rules line " + std::to_string(line_no) +
                               ": pair members must differ");
    }
    auto pair = std::minmax(a, b);
    if (kind == "initial") {
      if (!pinyin::is_initial(a) || !pinyin::is_initial(b)) {
        throw std::runtime_error("fuzzy rules line " + std::to_string(line_no) +
                                 ": unknown initial");
      }
      rules.initial_pairs.insert({pair.first, pair.second});
    } else if (kind == "final") {
      if (!pinyin::is_final(a) || !pinyin::is_final(b)) {
        throw std::runtime_error("fuzzy rules line " + std::to_string(line_no) +
                                 ": unknown final");
      }
      rules.final_pairs.insert({pair.first, pair.second});
    } else {
      throw std::runtime_error("fuzzy rules line " + std::to_string(line_no) +
                               ": unknown kind '" + kind + "'");
    }
  }
  return rules;
}

inline FuzzyRules parse_fuzzy_rules_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open fuzzy rules file: " + path);
  return parse_fuzzy_rules(is);
}

// Conventional Mandarin fuzzy classes; only z/zh and in/ing are essential,
// the rest are optional companions.
inline FuzzyRules default_fuzzy_rules() {
  std::stringstream ss(
      "initial z zh\n"
      "initial c ch\n"
      "initial s sh\n"
      "final in ing\n"
      "final en eng\n"
      "final an ang\n");
  return parse_fuzzy_rules(ss);
}

// Groups vocabulary characters by canonical syllable key. Polyphones are
// indexed once per reading; homophone sets are always queried for a
// concrete (character, reading) pair.
class HomophoneIndex {
 public:
  HomophoneIndex() = default;
  HomophoneIndex(ToneMode mode, std::map<std::string, std::vector<int>> groups)
      : mode_(mode), by_syllable_(std::move(groups)) {}

  ToneMode tone_mode() const { return mode_; }

  const std::vector<int>* group(const std::string& key) const {
    auto it = by_syllable_.find(key);
    return it == by_syllable_.end() ? nullptr : &it->second;
  }

  // Homo(k0) under the given reading: the group minus the character itself.
  std::vector<int> homophones(int k0, const Syllable& syl) const {
    std::vector<int> out;
    const auto* g = group(syllable_key(syl, mode_));
    if (g == nullptr) return out;
    out.reserve(g->size());
    for (int k : *g) {
      if (k != k0) out.push_back(k);
    }
    return out;
  }

  bool has_homophones(int k0, const Syllable& syl) const {
    const auto* g = group(syllable_key(syl, mode_));
    if (g == nullptr) return false;
    return g->size() > (std::count(g->begin(), g->end(), k0) > 0 ? 1u : 0u);
  }

  const std::map<std::string, std::vector<int>>& groups() const { return by_syllable_; }

 private:
  ToneMode mode_ = ToneMode::sensitive;
  std::map<std::string, std::vector<int>> by_syllable_;
};

inline HomophoneIndex build_homophone_index(const Lexicon& lexicon,
                                            const Vocabulary& vocabulary,
                                            ToneMode mode) {
  std::map<std::string, std::vector<int>> groups;
  for (const auto& [ch, readings] : lexicon.readings) {
    if (!vocabulary.contains(ch)) continue;
    int index = vocabulary.encode(ch);
    for (const auto& syl : readings) {
      groups[syllable_key(syl, mode)].push_back(index);
    }
  }
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }
  return HomophoneIndex(mode, std::move(groups));
}

// Simi(k0): characters one fuzzy initial-pair or one fuzzy final-pair away
// from the given reading. Exact homophones and k0 itself are excluded, so
// the result is disjoint from Homo(k0).
inline std::vector<int> fuzzy_neighbors(const HomophoneIndex& index, int k0,
                                        const Syllable& syl, const FuzzyRules& rules) {
  std::set<int> result;
  auto collect = [&](const Syllable& variant) {
    const auto* g = index.group(syllable_key(variant, index.tone_mode()));
    if (g == nullptr) return;
    result.insert(g->begin(), g->end());
  };
  for (const auto& ini : rules.initial_partners(syl.initial)) {
    Syllable v = syl;
    v.initial = ini;
    collect(v);
  }
  for (const auto& fin : rules.final_partners(syl.final)) {
    Syllable v = syl;
    v.final = fin;
    collect(v);
  }
  result.erase(k0);
  for (int h : index.homophones(k0, syl)) result.erase(h);
  return std::vector<int>(result.begin(), result.end());
}

}  // namespace homosmooth
