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

#include "homosmooth/ngram_lm.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"

using homosmooth::add_k_prob;
using homosmooth::BigramLM;
using homosmooth::BigramSmoothing;
using homosmooth::count_unigrams;
using homosmooth::export_arpa;
using homosmooth::import_arpa;
using homosmooth::SmoothingDistribution;
using homosmooth::SmoothingKind;
using homosmooth::train_bigram;
using homosmooth::UnigramDistribution;
using homosmooth::Vocabulary;

namespace {

std::vector<std::string> random_corpus(int lines, int maxlen, int alphabet, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (int i = 0; i < lines; ++i) {
    std::string line;
    int len = 1 + static_cast<int>(rng() % maxlen);
    for (int j = 0; j < len; ++j) line.push_back('a' + static_cast<char>(rng() % alphabet));
    out.push_back(line);
  }
  return out;
}

}  // namespace

TEST(Unigram, DirectFrequency) {
  Vocabulary v = homosmooth::build_vocabulary({"aab"}, 1);
  UnigramDistribution u = count_unigrams({"aab"}, v);
  EXPECT_DOUBLE_EQ(u.probs[static_cast<size_t>(v.encode("a"))], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(u.probs[static_cast<size_t>(v.encode("b"))], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(u.probs[static_cast<size_t>(v.sos())], 0.0);
  EXPECT_DOUBLE_EQ(u.probs[static_cast<size_t>(v.eos())], 0.0);
}

TEST(Unigram, SingleCharCorpus) {
  Vocabulary v = homosmooth::build_vocabulary({"x"}, 1);
  UnigramDistribution u = count_unigrams({"x"}, v);
  EXPECT_DOUBLE_EQ(u.probs[static_cast<size_t>(v.encode("x"))], 1.0);
}

TEST(Unigram, MatchesCountingOracle) {
  std::vector<std::string> corpus = random_corpus(650, 30, 12, 4242);
  Vocabulary v = homosmooth::build_vocabulary(corpus, 1);
  UnigramDistribution u = count_unigrams(corpus, v);
  auto counts = oracles::count_chars(corpus);
  long total = 0;
  for (const auto& [c, n] : counts) total += n;
  ASSERT_GT(u.total, 9000);  // ~10k characters
  EXPECT_EQ(u.total, total);
  for (const auto& [c, n] : counts) {
    EXPECT_DOUBLE_EQ(u.probs[static_cast<size_t>(v.encode(c))],
                     static_cast<double>(n) / static_cast<double>(total));
  }
}

TEST(Unigram, EmptyTotalThrows) {
  Vocabulary v = homosmooth::build_vocabulary({"a"}, 1);
  EXPECT_THROW(count_unigrams({""}, v), std::runtime_error);
}

TEST(Bigram, AddKFormula) {
  // k = 1, successor space of 2, c(a,b) = 2, c(a,.) = 2.
  EXPECT_DOUBLE_EQ(add_k_prob(2, 2, 1.0, 2), 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(add_k_prob(0, 0, 0.5, 4), 1.0 / 4.0);
}

TEST(Bigram, DeterministicSuccessor) {
  Vocabulary v = homosmooth::build_vocabulary({"ab ab"}, 1);
  BigramLM lm = train_bigram({"ab ab"}, v, {SmoothingKind::add_k, 0.0, 0.9});
  SmoothingDistribution d = lm.predict(v.encode("a"));
  EXPECT_DOUBLE_EQ(d.prob(v.encode("b")), 1.0);
  d.check_valid(1e-9);
}

TEST(Bigram, MatchesCountingOracle) {
  std::vector<std::string> corpus = random_corpus(250, 25, 8, 99);  // ~5k tokens
  Vocabulary v = homosmooth::build_vocabulary(corpus, 1);
  BigramLM lm = train_bigram(corpus, v, {SmoothingKind::add_k, 0.5, 0.9});

  std::vector<std::vector<int>> sentences;
  for (const auto& line : corpus) sentences.push_back(v.encode_line(line));
  auto counts = oracles::bigram_counts(sentences, v.sos(), v.eos());

  int k = v.size();
  for (int prev = 0; prev < k; ++prev) {
    SmoothingDistribution d = lm.predict(prev);
    d.check_valid(1e-9);
    long row_total = 0;
    for (const auto& [next, c] : counts[prev]) row_total += c;
    for (int next = 0; next < k; ++next) {
      long c = counts[prev].count(next) ? counts[prev][next] : 0;
      double expect = (static_cast<double>(c) + 0.5) /
                      (static_cast<double>(row_total) + 0.5 * k);
      EXPECT_NEAR(d.prob(next), expect, 1e-12);
    }
  }
}

TEST(Bigram, InterpolationBacksOffToUnigram) {
  std::vector<std::string> corpus = {"abcab", "bca"};
  Vocabulary v = homosmooth::build_vocabulary(corpus, 1);
  BigramLM lm = train_bigram(corpus, v, {SmoothingKind::interpolated, 0.01, 0.7});
  UnigramDistribution uni = count_unigrams(corpus, v);
  // EOS never occurs as a context, so its row is pure unigram.
  SmoothingDistribution d = lm.predict(v.eos());
  for (int j = 0; j < v.size(); ++j) {
    EXPECT_DOUBLE_EQ(d.prob(j), uni.probs[static_cast<size_t>(j)]);
  }
}

TEST(Bigram, SentenceInitialRowMatchesLineStarts) {
  std::vector<std::string> corpus = random_corpus(100, 10, 5, 7);
  Vocabulary v = homosmooth::build_vocabulary(corpus, 1);
  BigramLM lm = train_bigram(corpus, v, {SmoothingKind::add_k, 0.0, 0.9});
  std::map<int, long> first_counts;
  for (const auto& line : corpus) first_counts[v.encode_line(line)[0]] += 1;
  SmoothingDistribution d = lm.predict(v.sos());
  for (const auto& [idx, c] : first_counts) {
    EXPECT_NEAR(d.prob(idx), static_cast<double>(c) / static_cast<double>(corpus.size()),
                1e-12);
  }
}

TEST(Bigram, InvalidSmoothingThrows) {
  Vocabulary v = homosmooth::build_vocabulary({"ab"}, 1);
  EXPECT_THROW(train_bigram({"ab"}, v, {SmoothingKind::add_k, -0.1, 0.9}),
               std::invalid_argument);
  EXPECT_THROW(train_bigram({"ab"}, v, {SmoothingKind::interpolated, 0.1, 1.5}),
               std::invalid_argument);
  BigramLM lm = train_bigram({"ab"}, v, {SmoothingKind::add_k, 0.01, 0.9});
  EXPECT_THROW(lm.predict(-1), std::out_of_range);
  EXPECT_THROW(lm.predict(v.size()), std::out_of_range);
}

TEST(Bigram, EveryRowIsADistribution) {
  std::vector<std::string> corpus = random_corpus(60, 15, 6, 3);
  Vocabulary v = homosmooth::build_vocabulary(corpus, 1);
  for (auto smoothing : {BigramSmoothing{SmoothingKind::add_k, 0.01, 0.9},
                         BigramSmoothing{SmoothingKind::interpolated, 0.01, 0.8}}) {
    BigramLM lm = train_bigram(corpus, v, smoothing);
    for (int prev = 0; prev < v.size(); ++prev) {
      SmoothingDistribution d = lm.predict(prev);
      d.check_valid(1e-9);
      for (int j = 0; j < v.size(); ++j) EXPECT_GE(d.prob(j), 0.0);
    }
  }
}

TEST(Arpa, HandComputedBackoff) {
  // Two tokens with explicit unigram backoff weights and one bigram.
  // Renormalized unigram: p(a) = 0.6, p(b) = 0.3, p(</s>) = 0.1 after the
  // vocabulary intersection leaves mass exactly on {a, b, </s>}.
  Vocabulary v = homosmooth::build_vocabulary({"ab"}, 1);
  std::string text =
      "\\data\\\n"
      "ngram 1=3\n"
      "ngram 2=1\n"
      "\n"
      "\\1-grams:\n"
      "-0.2218487496163564\ta\t-0.3010299956639812\n"  // p=0.6, bo=0.5
      "-0.5228787452803376\tb\t0\n"                    // p=0.3, bo=1
      "-1\t</s>\t0\n"                                  // p=0.1
      "\n"
      "\\2-grams:\n"
      "-0.0969100130080564\ta b\n"  // p(b|a)=0.8
      "\n"
      "\\end\\\n";
  std::stringstream ss(text);
  BigramLM lm = import_arpa(ss, v);

  // Row a: explicit b=0.8; backoff 0.5 * {0.6, 0.1} on a and </s>;
  // unlisted vocab entries (unk, space, sos) carry zero unigram mass.
  // Normalizer = 0.8 + 0.5*0.6 + 0.5*0.1 = 1.15.
  SmoothingDistribution d = lm.predict(v.encode("a"));
  EXPECT_NEAR(d.prob(v.encode("b")), 0.8 / 1.15, 1e-9);
  EXPECT_NEAR(d.prob(v.encode("a")), 0.3 / 1.15, 1e-9);
  EXPECT_NEAR(d.prob(v.eos()), 0.05 / 1.15, 1e-9);
  d.check_valid(1e-9);

  // Row b has no explicit bigrams and backoff 1: pure renormalized unigram.
  SmoothingDistribution db = lm.predict(v.encode("b"));
  EXPECT_NEAR(db.prob(v.encode("a")), 0.6, 1e-9);
  EXPECT_NEAR(db.prob(v.encode("b")), 0.3, 1e-9);
  EXPECT_NEAR(db.prob(v.eos()), 0.1, 1e-9);
}

TEST(Arpa, RoundTripThroughExport) {
  std::vector<std::string> corpus = random_corpus(80, 12, 6, 11);
  Vocabulary v = homosmooth::build_vocabulary(corpus, 1);
  BigramLM lm = train_bigram(corpus, v, {SmoothingKind::add_k, 0.25, 0.9});
  std::stringstream ss;
  export_arpa(lm, v, ss);
  BigramLM back = import_arpa(ss, v);
  for (int prev = 0; prev < v.size(); ++prev) {
    SmoothingDistribution a = lm.predict(prev);
    SmoothingDistribution b = back.predict(prev);
    for (int j = 0; j < v.size(); ++j) {
      EXPECT_NEAR(a.prob(j), b.prob(j), 1e-6) << "prev=" << prev << " next=" << j;
    }
  }
}

TEST(Arpa, UnigramOnlyFilePredictsUnigram) {
  Vocabulary v = homosmooth::build_vocabulary({"ab"}, 1);
  std::string text =
      "\\data\\\n"
      "ngram 1=2\n"
      "\n"
      "\\1-grams:\n"
      "-0.3010299956639812\ta\n"  // 0.5
      "-0.3010299956639812\tb\n"  // 0.5
      "\n"
      "\\end\\\n";
  std::stringstream ss(text);
  BigramLM lm = import_arpa(ss, v);
  for (int prev = 0; prev < v.size(); ++prev) {
    SmoothingDistribution d = lm.predict(prev);
    EXPECT_NEAR(d.prob(v.encode("a")), 0.5, 1e-12);
    EXPECT_NEAR(d.prob(v.encode("b")), 0.5, 1e-12);
  }
}

TEST(Arpa, UnknownTokensMergeIntoUnk) {
  Vocabulary v = homosmooth::build_vocabulary({"a"}, 1);
  std::string text =
      "\\data\\\n"
      "ngram 1=3\n"
      "\n"
      "\\1-grams:\n"
      "-0.5\ta\n"
      "-0.5\tzz\n"
      "-0.5\tqq\n"
      "\n"
      "\\end\\\n";
  std::stringstream ss(text);
  BigramLM lm = import_arpa(ss, v);
  SmoothingDistribution d = lm.predict(v.encode("a"));
  // zz and qq merge into UNK: 2/3 of the unigram mass.
  EXPECT_NEAR(d.prob(v.unk()), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.prob(v.encode("a")), 1.0 / 3.0, 1e-12);
}

TEST(Arpa, ErrorsCarryLineNumbers) {
  Vocabulary v = homosmooth::build_vocabulary({"a"}, 1);
  {
    std::stringstream ss("\\1-grams:\n-0.5\ta\n");
    EXPECT_THROW(import_arpa(ss, v), std::runtime_error);  // missing \data\ section
  }
  {
    std::stringstream ss("\\data\\\nngram 1=1\n\\1-grams:\nnot_a_number\ta\n");
    try {
      import_arpa(ss, v);
      FAIL() << "expected throw";
    } catch (const std::runtime_error& e) {
      EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
  }
}
