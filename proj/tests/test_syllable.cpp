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

#include "homosmooth/syllable.hpp"

#include <gtest/gtest.h>

using homosmooth::parse_syllable;
using homosmooth::Syllable;
using homosmooth::syllable_key;
using homosmooth::ToneMode;

TEST(Syllable, ParseWithInitial) {
  Syllable s = parse_syllable("zhong1");
  EXPECT_EQ(s.initial, "zh");
  EXPECT_EQ(s.final, "ong");
  EXPECT_EQ(s.tone, 1);
}

TEST(Syllable, ParseZeroInitial) {
  Syllable s = parse_syllable("an4");
  EXPECT_EQ(s.initial, "");
  EXPECT_EQ(s.final, "an");
  EXPECT_EQ(s.tone, 4);
}

TEST(Syllable, MissingToneIsZero) {
  Syllable s = parse_syllable("xing");
  EXPECT_EQ(s.initial, "x");
  EXPECT_EQ(s.final, "ing");
  EXPECT_EQ(s.tone, 0);
}

TEST(Syllable, UmlautNormalization) {
  Syllable s = parse_syllable("l\xC3\xBC" "4");  // lü4
  EXPECT_EQ(s.initial, "l");
  EXPECT_EQ(s.final, "v");
  EXPECT_EQ(s.tone, 4);
  EXPECT_EQ(parse_syllable("nve3").final, "ve");
}

TEST(Syllable, InvalidInputsThrow) {
  EXPECT_THROW(parse_syllable(""), std::invalid_argument);
  EXPECT_THROW(parse_syllable("zzz"), std::invalid_argument);
  EXPECT_THROW(parse_syllable("qqq7"), std::invalid_argument);
  EXPECT_THROW(parse_syllable("3"), std::invalid_argument);
}

// format(parse(s)) is the identity over the whole closed cross product.
TEST(Syllable, RoundTripFullCrossProduct) {
  std::vector<std::string> initials;
  initials.emplace_back("");
  for (auto i : homosmooth::pinyin::initials()) initials.emplace_back(i);
  int checked = 0;
  for (const auto& ini : initials) {
    for (const auto& fin : homosmooth::pinyin::finals()) {
      for (int tone = 0; tone <= 5; ++tone) {
        Syllable s{ini, fin, tone};
        std::string text = homosmooth::format_syllable(s);
        Syllable back = parse_syllable(text);
        ASSERT_EQ(back.initial, ini) << text;
        ASSERT_EQ(back.final, fin) << text;
        ASSERT_EQ(back.tone, tone) << text;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 5000);
}

TEST(Syllable, KeyRespectsToneMode) {
  Syllable a = parse_syllable("ma1");
  Syllable b = parse_syllable("ma3");
  EXPECT_NE(syllable_key(a, ToneMode::sensitive), syllable_key(b, ToneMode::sensitive));
  EXPECT_EQ(syllable_key(a, ToneMode::insensitive), syllable_key(b, ToneMode::insensitive));
}

TEST(Syllable, ParseToneModeNames) {
  EXPECT_EQ(homosmooth::parse_tone_mode("sensitive"), ToneMode::sensitive);
  EXPECT_EQ(homosmooth::parse_tone_mode("insensitive"), ToneMode::insensitive);
  EXPECT_THROW(homosmooth::parse_tone_mode("x"), std::invalid_argument);
}
