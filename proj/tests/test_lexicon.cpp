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

#include "homosmooth/lexicon.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "homosmooth/vocabulary.hpp"
#include "oracles.hpp"

using homosmooth::Lexicon;
using homosmooth::parse_lexicon;
using homosmooth::pronounce_sentence;
using homosmooth::Vocabulary;

namespace {

Vocabulary vocab_of(const std::string& text) {
  return homosmooth::build_vocabulary({text}, 1);
}

Lexicon parse_str(const std::string& text, const Vocabulary& v) {
  std::stringstream ss(text);
  return parse_lexicon(ss, v);
}

}  // namespace

TEST(Lexicon, CharLineWithAlternatives) {
  Vocabulary v = vocab_of("\xE4\xB8\xAD");  // 中
  Lexicon lex = parse_str("\xE4\xB8\xAD\tzhong1,zhong4\n", v);
  const auto* readings = lex.find_char("\xE4\xB8\xAD");
  ASSERT_NE(readings, nullptr);
  ASSERT_EQ(readings->size(), 2u);
  EXPECT_EQ((*readings)[0].tone, 1);
  EXPECT_EQ((*readings)[1].tone, 4);
}

TEST(Lexicon, WordLine) {
  Vocabulary v = vocab_of("\xE9\x93\xB6\xE8\xA1\x8C");  // 银行
  Lexicon lex = parse_str("\xE9\x93\xB6\xE8\xA1\x8C\tyin2 hang2\n", v);
  ASSERT_EQ(lex.word_readings.count("\xE9\x93\xB6\xE8\xA1\x8C"), 1u);
  EXPECT_EQ(lex.word_readings.at("\xE9\x93\xB6\xE8\xA1\x8C").size(), 2u);
}

TEST(Lexicon, CommentsAndBlanksSkipped) {
  Vocabulary v = vocab_of("ab");
  Lexicon lex = parse_str("# header\n\na\tma1\n", v);
  EXPECT_NE(lex.find_char("a"), nullptr);
}

TEST(Lexicon, DuplicateCharLinesMergePreservingOrder) {
  Vocabulary v = vocab_of("a");
  Lexicon lex = parse_str("a\tma1,ma2\na\tma2,ma4\n", v);
  const auto* readings = lex.find_char("a");
  ASSERT_NE(readings, nullptr);
  ASSERT_EQ(readings->size(), 3u);
  EXPECT_EQ((*readings)[0].tone, 1);
  EXPECT_EQ((*readings)[1].tone, 2);
  EXPECT_EQ((*readings)[2].tone, 4);
}

TEST(Lexicon, OutOfVocabCounted) {
  Vocabulary v = vocab_of("a");
  Lexicon lex = parse_str("a\tma1\nz\tma2\n", v);
  EXPECT_EQ(lex.out_of_vocab_chars, 1);
  EXPECT_EQ(lex.find_char("z"), nullptr);
}

TEST(Lexicon, MalformedLineReportsNumber) {
  Vocabulary v = vocab_of("ab");
  try {
    parse_str("a\tma1\nbroken-line-no-tab\n", v);
    FAIL() << "expected throw";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Lexicon, WordLengthMismatchThrows) {
  Vocabulary v = vocab_of("ab");
  EXPECT_THROW(parse_str("ab\tma1 ma2 ma3\n", v), std::runtime_error);
}

TEST(Lexicon, MatchesReferenceParser) {
  // 50 char entries + 10 word entries, compared field by field against a
  // naive split-based reading of the same text.
  std::mt19937_64 rng(99);
  std::vector<std::string> syls = {"ma1", "bo2", "zhong1", "xing4", "lan3", "de5", "shu1"};
  std::string corpus, file_text;
  std::vector<std::string> chars;
  for (int i = 0; i < 50; ++i) chars.push_back(homosmooth::utf8::encode(0x4E00 + i));
  for (const auto& c : chars) corpus += c;
  for (const auto& c : chars) {
    file_text += c + "\t" + syls[rng() % syls.size()];
    if (rng() % 2) file_text += "," + syls[rng() % syls.size()];
    file_text += "\n";
  }
  for (int w = 0; w < 10; ++w) {
    std::string word = chars[rng() % 50] + chars[rng() % 50];
    file_text += word + "\t" + syls[rng() % syls.size()] + " " + syls[rng() % syls.size()] + "\n";
  }
  Vocabulary v = vocab_of(corpus);
  Lexicon lex = parse_str(file_text, v);

  // reference parse: line by line, split on tab/comma/space
  std::stringstream ss(file_text);
  std::string line;
  std::map<std::string, std::vector<std::string>> ref_chars;
  std::map<std::string, std::vector<std::string>> ref_words;
  while (std::getline(ss, line)) {
    auto tab = line.find('\t');
    std::string entry = line.substr(0, tab), pron = line.substr(tab + 1);
    if (homosmooth::utf8::length(entry) == 1) {
      std::stringstream ps(pron);
      std::string tok;
      auto& list = ref_chars[entry];
      while (std::getline(ps, tok, ',')) {
        if (std::find(list.begin(), list.end(), tok) == list.end()) list.push_back(tok);
      }
    } else {
      std::stringstream ps(pron);
      std::string tok;
      ref_words[entry].clear();
      while (ps >> tok) ref_words[entry].push_back(tok);
    }
  }
  ASSERT_EQ(lex.readings.size(), ref_chars.size());
  for (const auto& [c, expect] : ref_chars) {
    const auto* got = lex.find_char(c);
    ASSERT_NE(got, nullptr) << c;
    ASSERT_EQ(got->size(), expect.size()) << c;
    for (size_t i = 0; i < expect.size(); ++i) {
      EXPECT_EQ((*got)[i], homosmooth::parse_syllable(expect[i]));
    }
  }
  ASSERT_EQ(lex.word_readings.size(), ref_words.size());
  for (const auto& [w, expect] : ref_words) {
    ASSERT_EQ(lex.word_readings.count(w), 1u);
    EXPECT_EQ(lex.word_readings.at(w).size(), expect.size());
  }
}

TEST(Pronounce, WordEntryOverridesCharReading) {
  // 行 reads xing2 alone but hang2 inside 银行.
  std::string yin = "\xE9\x93\xB6", hang = "\xE8\xA1\x8C";
  Vocabulary v = vocab_of(yin + hang);
  Lexicon lex = parse_str(yin + "\tyin2\n" + hang + "\txing2,hang2\n" + yin + hang +
                              "\tyin2 hang2\n",
                          v);
  auto out = pronounce_sentence({yin, hang}, lex);
  ASSERT_EQ(out.size(), 2u);
  ASSERT_TRUE(out[1].syllable.has_value());
  EXPECT_EQ(out[1].syllable->to_string(), "hang2");
}

TEST(Pronounce, SingleReadingAndSentinel) {
  Vocabulary v = vocab_of("ab");
  Lexicon lex = parse_str("a\tma1\n", v);
  auto out = pronounce_sentence({"a", "b"}, lex);
  ASSERT_EQ(out.size(), 2u);
  ASSERT_TRUE(out[0].syllable.has_value());
  EXPECT_EQ(out[0].syllable->to_string(), "ma1");
  EXPECT_FALSE(out[1].syllable.has_value());
}

TEST(Pronounce, OutputLengthEqualsInputLength) {
  Vocabulary v = vocab_of("abcd");
  Lexicon lex = parse_str("a\tma1\nab\tma1 ma2\nabc\tma1 ma2 ma3\n", v);
  std::mt19937_64 rng(3);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::string> sentence;
    int len = static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i) sentence.emplace_back(1, 'a' + static_cast<char>(rng() % 4));
    EXPECT_EQ(pronounce_sentence(sentence, lex).size(), sentence.size());
  }
}

TEST(Pronounce, MatchesBruteForceOracle) {
  // Dictionary with overlapping words so greedy longest-match actually has
  // choices to make.
  Vocabulary v = vocab_of("abcde");
  Lexicon lex = parse_str(
      "a\tma1\nb\tbo2\nc\tde5\nd\tshu1\ne\tlan3\n"
      "ab\tma2 bo1\nabc\tma3 bo3 de1\nbc\tbo4 de2\ncd\tde3 shu2\nde\tshu3 lan1\n"
      "abcd\tma4 bo2 de4 shu4\n",
      v);
  std::mt19937_64 rng(17);
  for (int round = 0; round < 100; ++round) {
    std::vector<std::string> sentence;
    int len = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < len; ++i) sentence.emplace_back(1, 'a' + static_cast<char>(rng() % 5));
    auto got = pronounce_sentence(sentence, lex);
    auto expect = oracles::pronounce_brute_force(sentence, lex);
    ASSERT_EQ(got.size(), expect.size());
    for (size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].syllable.has_value(), expect[i].has_value()) << "pos " << i;
      if (expect[i]) EXPECT_EQ(*got[i].syllable, *expect[i]) << "pos " << i;
    }
  }
}
