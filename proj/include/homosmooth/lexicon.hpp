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
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "homosmooth/syllable.hpp"
#include "homosmooth/utf8.hpp"
#include "homosmooth/vocabulary.hpp"

namespace homosmooth {

// Pronunciation dictionary. `readings` maps a single character to its
// ordered readings (first = most frequent); `word_readings` maps a
// multi-character word to one syllable per character and drives polyphone
// disambiguation.
struct Lexicon {
  std::unordered_map<std::string, std::vector<Syllable>> readings;
  std::unordered_map<std::string, std::vector<Syllable>> word_readings;
  int out_of_vocab_chars = 0;
  size_t max_word_length = 0;  // in codepoints

  const std::vector<Syllable>* find_char(const std::string& ch) const {
    auto it = readings.find(ch);
    return it == readings.end() ? nullptr : &it->second;
  }
};

namespace detail {

inline void merge_readings(std::vector<Syllable>& into, const std::vector<Syllable>& add) {
  for (const auto& s : add) {
    if (std::find(into.begin(), into.end(), s) == into.end()) into.push_back(s);
  }
}

}  // namespace detail

// Parses the lexicon TSV: `CHAR<TAB>syl[,syl...]` for characters,
// `WORD<TAB>syl syl ...` for words, `#` comments. Duplicate character
// lines are merged preserving first-seen reading order. Characters absent
// from the vocabulary are counted and dropped.
inline Lexicon parse_lexicon(std::istream& is, const Vocabulary& vocabulary) {
  Lexicon lex;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                               ": expected ENTRY<TAB>PRONUNCIATION");
    }
    std::string entry = line.substr(0, tab);
    std::string pron = line.substr(tab + 1);
    size_t entry_len = utf8::length(entry);

    try {
      if (entry_len == 1) {
        // character line: comma-separated alternative readings
        std::vector<Syllable> syls;
        std::stringstream ss(pron);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          if (!tok.empty()) syls.push_back(parse_syllable(tok));
        }
        if (syls.empty()) {
          throw std::invalid_argument("no readings for character " + entry);
        }
        if (!vocabulary.contains(entry)) {
          ++lex.out_of_vocab_chars;
          continue;
        }
        detail::merge_readings(lex.readings[entry], syls);
      } else {
        // word line: space-separated syllables, one per character
        std::vector<Syllable> syls;
        std::stringstream ss(pron);
        std::string tok;
        while (ss >> tok) syls.push_back(parse_syllable(tok));
        if (syls.size() != entry_len) {
          throw std::invalid_argument("word '" + entry + "' has " +
                                      std::to_string(entry_len) + " characters but " +
                                      std::to_string(syls.size()) + " syllables");
        }
        lex.word_readings[entry] = std::move(syls);
        lex.max_word_length = std::max(lex.max_word_length, entry_len);
      }
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lex;
}

inline Lexicon parse_lexicon_file(const std::string& path, const Vocabulary& vocabulary) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open lexicon file: " + path);
  return parse_lexicon(is, vocabulary);
}

inline void save_lexicon(const Lexicon& lex, std::ostream& os,
                         const std::vector<std::string>& char_order) {
  for (const auto& ch : char_order) {
    auto it = lex.readings.find(ch);
    if (it == lex.readings.end()) continue;
    os << ch << '\t';
    for (size_t i = 0; i < it->second.size(); ++i) {
      if (i) os << ',';
      os << it->second[i].to_string();
    }
    os << '\n';
  }
  for (const auto& [word, syls] : lex.word_readings) {
    os << word << '\t';
    for (size_t i = 0; i < syls.size(); ++i) {
      if (i) os << ' ';
      os << syls[i].to_string();
    }
    os << '\n';
  }
}

// One sentence position with its resolved pronunciation. `syllable` is
// empty for characters the lexicon does not know.
struct PronouncedChar {
  std::string ch;
  std::optional<Syllable> syllable;
};

// Assigns a pronunciation to every character: greedy longest match against
// the word dictionary, then the character's most frequent reading, then
// the no-pronunciation sentinel. Output length always equals input length.
inline std::vector<PronouncedChar> pronounce_sentence(const std::vector<std::string>& sentence,
                                                      const Lexicon& lexicon) {
  std::vector<PronouncedChar> out;
  out.reserve(sentence.size());
  size_t i = 0;
  while (i < sentence.size()) {
    size_t best_len = 0;
    const std::vector<Syllable>* best = nullptr;
    size_t cap = std::min(lexicon.max_word_length, sentence.size() - i);
    for (size_t len = cap; len >= 2; --len) {
      std::string word;
      for (size_t j = 0; j < len; ++j) word += sentence[i + j];
      auto it = lexicon.word_readings.find(word);
      if (it != lexicon.word_readings.end()) {
        best_len = len;
        best = &it->second;
        break;  // longest match wins
      }
    }
    if (best != nullptr) {
      for (size_t j = 0; j < best_len; ++j) {
        out.push_back({sentence[i + j], (*best)[j]});
      }
      i += best_len;
      continue;
    }
    const std::vector<Syllable>* readings = lexicon.find_char(sentence[i]);
    if (readings != nullptr && !readings->empty()) {
      out.push_back({sentence[i], readings->front()});
    } else {
      out.push_back({sentence[i], std::nullopt});
    }
    ++i;
  }
  return out;
}

}  // namespace homosmooth
