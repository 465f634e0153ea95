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

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>

namespace homosmooth {

// Pinyin syllable split into onset (initial), rime (final) and tone.
// Tone 0 means unspecified, 5 is the neutral tone. The initial may be
// empty; the final never is.
struct Syllable {
  std::string initial;
  std::string final;
  int tone = 0;

  std::string to_string() const {
    std::string s = initial + final;
    if (tone > 0) s += static_cast<char>('0' + tone);
    return s;
  }

  bool operator==(const Syllable& o) const {
    return initial == o.initial && final == o.final && tone == o.tone;
  }
};

namespace pinyin {

// The 21 standard initials plus y/w, longest first so prefix matching is
// unambiguous.
inline const std::array<std::string_view, 23>& initials() {
  static const std::array<std::string_view, 23> kInitials = {
      "zh", "ch", "sh", "b", "p", "m", "f", "d", "t", "n", "l", "g",
      "k",  "h",  "j",  "q", "x", "r", "z", "c", "s", "y", "w"};
  return kInitials;
}

// Closed final set, written forms. 'v' stands for the umlauted u, so the
// set contains both abbreviated (iu, ui, un) and full (iou, uei, uen)
// spellings.
inline const std::unordered_set<std::string>& finals() {
  static const std::unordered_set<std::string> kFinals = {
      "a",   "o",   "e",    "i",    "u",   "v",   "er",  "ai",  "ei",  "ao",
      "ou",  "ia",  "ie",   "iao",  "iu",  "iou", "ua",  "uo",  "uai", "ui",
      "uei", "ue",  "ve",   "an",   "en",  "ang", "eng", "ong", "ian", "in",
      "iang", "ing", "iong", "uan", "un",  "uen", "uang", "ueng", "van", "vn"};
  return kFinals;
}

inline bool is_initial(std::string_view s) {
  for (auto i : initials()) {
    if (s == i) return true;
  }
  return false;
}

inline bool is_final(const std::string& s) { return finals().count(s) > 0; }

// Replaces the two-byte UTF-8 u-umlaut with 'v'.
inline std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (i + 1 < s.size() && static_cast<unsigned char>(s[i]) == 0xC3 &&
        static_cast<unsigned char>(s[i + 1]) == 0xBC) {
      out.push_back('v');
      ++i;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace pinyin

// Decomposes a lowercase pinyin string with optional trailing tone digit.
// The onset is the longest prefix from the closed initial set; the rest
// must be a member of the closed final set.
inline Syllable parse_syllable(std::string_view input) {
  std::string s = pinyin::normalize(input);
  if (s.empty()) throw std::invalid_argument("empty syllable");

  Syllable syl;
  char last = s.back();
  if (last >= '0' && last <= '9') {
    int tone = last - '0';
    if (tone > 5) {
      throw std::invalid_argument("invalid tone digit in syllable: " + std::string(input));
    }
    syl.tone = tone;
    s.pop_back();
  }
  if (s.empty()) throw std::invalid_argument("syllable has no letters: " + std::string(input));

  for (auto ini : pinyin::initials()) {
    if (s.size() > ini.size() && s.compare(0, ini.size(), ini) == 0) {
      syl.initial = std::string(ini);
      syl.final = s.substr(ini.size());
      break;
    }
  }
  if (syl.final.empty()) syl.final = s;  // zero-initial syllable

  if (!pinyin::is_final(syl.final)) {
    throw std::invalid_argument("unmatchable pinyin final in syllable: " + std::string(input));
  }
  return syl;
}

inline std::string format_syllable(const Syllable& s) { return s.to_string(); }

enum class ToneMode { sensitive, insensitive };

inline const char* tone_mode_name(ToneMode m) {
  return m == ToneMode::sensitive ? "sensitive" : "insensitive";
}

inline ToneMode parse_tone_mode(std::string_view s) {
  if (s == "sensitive") return ToneMode::sensitive;
  if (s == "insensitive") return ToneMode::insensitive;
  throw std::invalid_argument("unknown tone mode: " + std::string(s));
}

// Canonical grouping key for homophony under the given tone mode.
inline std::string syllable_key(const Syllable& s, ToneMode mode) {
  std::string key = s.initial + "|" + s.final;
  if (mode == ToneMode::sensitive) {
    key += '|';
    key += static_cast<char>('0' + s.tone);
  }
  return key;
}

}  // namespace homosmooth
