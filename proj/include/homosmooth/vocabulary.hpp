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
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "homosmooth/utf8.hpp"

namespace homosmooth {

// Bijective character <-> index mapping over the modelling units.
// Indices 0..3 are reserved for the specials UNK, space, SOS and EOS;
// corpus characters follow. Immutable after construction.
class Vocabulary {
 public:
  static constexpr const char* kUnkToken = "<unk>";
  static constexpr const char* kSpaceToken = " ";
  static constexpr const char* kSosToken = "<s>";
  static constexpr const char* kEosToken = "</s>";

  Vocabulary() = default;

  // Builds a vocabulary from an explicit character list. Characters equal
  // to a special token are skipped; order is preserved.
  static Vocabulary from_chars(const std::vector<std::string>& chars) {
    Vocabulary v;
    v.init_specials();
    for (const auto& c : chars) v.add_char(c);
    return v;
  }

  int size() const { return static_cast<int>(chars_.size()); }

  int unk() const { return 0; }
  int space() const { return 1; }
  int sos() const { return 2; }
  int eos() const { return 3; }

  bool contains(const std::string& c) const { return index_.count(c) > 0; }

  // Index of `c`, falling back to UNK for out-of-vocabulary characters.
  int encode(const std::string& c) const {
    auto it = index_.find(c);
    return it == index_.end() ? unk() : it->second;
  }

  const std::string& decode(int index) const {
    if (index < 0 || index >= size()) {
      throw std::out_of_range("vocabulary index out of range: " + std::to_string(index));
    }
    return chars_[static_cast<size_t>(index)];
  }

  // Encodes every codepoint of a text line. SOS/EOS are not added here.
  std::vector<int> encode_line(std::string_view line) const {
    std::vector<int> out;
    for (const auto& c : utf8::split(line)) out.push_back(encode(c));
    return out;
  }

  std::string decode_line(const std::vector<int>& indices) const {
    std::string out;
    for (int i : indices) out += decode(i);
    return out;
  }

  const std::vector<std::string>& chars() const { return chars_; }

  bool is_special(int index) const { return index >= 0 && index < 4; }

  void save(std::ostream& os) const {
    os << "#homosmooth-vocab v1\n";
    for (const auto& c : chars_) os << escape(c) << "\n";
  }

  static Vocabulary load(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("#homosmooth-vocab", 0) != 0) {
      throw std::runtime_error("not a vocabulary file (missing header)");
    }
    std::vector<std::string> chars;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      chars.push_back(unescape(line));
    }
    if (chars.size() < 4 || chars[0] != kUnkToken || chars[2] != kSosToken) {
      throw std::runtime_error("vocabulary file lacks special tokens");
    }
    Vocabulary v;
    for (const auto& c : chars) {
      v.index_.emplace(c, static_cast<int>(v.chars_.size()));
      v.chars_.push_back(c);
    }
    return v;
  }

  friend Vocabulary build_vocabulary(const std::vector<std::string>& corpus_lines,
                                     int min_count);

 private:
  void init_specials() {
    for (const char* t : {kUnkToken, kSpaceToken, kSosToken, kEosToken}) {
      index_.emplace(t, static_cast<int>(chars_.size()));
      chars_.emplace_back(t);
    }
  }

  void add_char(const std::string& c) {
    if (index_.count(c)) return;
    index_.emplace(c, static_cast<int>(chars_.size()));
    chars_.push_back(c);
  }

  static std::string escape(const std::string& c) {
    if (c == " ") return "<space>";
    return c;
  }

  static std::string unescape(const std::string& s) {
    if (s == "<space>") return " ";
    return s;
  }

  std::vector<std::string> chars_;
  std::unordered_map<std::string, int> index_;
};

// Collects every character occurring at least `min_count` times across the
// corpus, ordered by descending count with ties broken by codepoint. The
// four specials always lead the index.
inline Vocabulary build_vocabulary(const std::vector<std::string>& corpus_lines,
                                   int min_count) {
  if (corpus_lines.empty()) throw std::invalid_argument("empty corpus");
  std::unordered_map<std::string, int64_t> counts;
  for (const auto& line : corpus_lines) {
    for (auto& c : utf8::split(line)) counts[std::move(c)] += 1;
  }
  std::vector<std::pair<std::string, int64_t>> kept;
  kept.reserve(counts.size());
  for (auto& [c, n] : counts) {
    if (c == Vocabulary::kSpaceToken) continue;  // always present as a special
    if (n >= min_count) kept.emplace_back(c, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return utf8::codepoint(a.first) < utf8::codepoint(b.first);
  });
  Vocabulary v;
  v.init_specials();
  for (const auto& [c, n] : kept) v.add_char(c);
  return v;
}

}  // namespace homosmooth
