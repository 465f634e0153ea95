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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace homosmooth {
namespace utf8 {

// Byte length of the UTF-8 sequence starting with `first`. Invalid lead
// bytes are treated as single-byte units so malformed input still splits.
inline int sequence_length(unsigned char first) {
  if (first < 0x80) return 1;
  if ((first & 0xE0) == 0xC0) return 2;
  if ((first & 0xF0) == 0xE0) return 3;
  if ((first & 0xF8) == 0xF0) return 4;
  return 1;
}

// Splits a UTF-8 string into one std::string per codepoint.
inline std::vector<std::string> split(std::string_view s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    size_t len = static_cast<size_t>(sequence_length(static_cast<unsigned char>(s[i])));
    if (i + len > s.size()) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

inline size_t length(std::string_view s) {
  size_t n = 0, i = 0;
  while (i < s.size()) {
    size_t len = static_cast<size_t>(sequence_length(static_cast<unsigned char>(s[i])));
    if (i + len > s.size()) len = 1;
    i += len;
    ++n;
  }
  return n;
}

// Unicode scalar value of the first codepoint; used for deterministic
// tie-breaking. Malformed sequences decode byte-wise.
inline uint32_t codepoint(std::string_view s) {
  if (s.empty()) return 0;
  unsigned char b0 = static_cast<unsigned char>(s[0]);
  int len = sequence_length(b0);
  if (len == 1 || static_cast<size_t>(len) > s.size()) return b0;
  uint32_t cp = b0 & (0xFF >> (len + 1));
  for (int i = 1; i < len; ++i) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
  }
  return cp;
}

inline std::string encode(uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

}  // namespace utf8
}  // namespace homosmooth
