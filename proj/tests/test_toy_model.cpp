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

#include "homosmooth/toy_model.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "homosmooth/gradcheck.hpp"

using homosmooth::DecoderStep;
using homosmooth::decode_step;
using homosmooth::encode;
using homosmooth::forward_teacher_forced;
using homosmooth::greedy_decode;
using homosmooth::init_params;
using homosmooth::ModelConfig;
using homosmooth::Tensor;
using homosmooth::ToyModelParams;

namespace {

ToyModelParams small_params(uint64_t seed) {
  return init_params(8, ModelConfig{3, 3, 4, 4}, seed);
}

// Scalar reference recurrence: h_t[i] = tanh(sum_j Wx[i][j] x[j] + sum_j Wh[i][j] h[j] + b[i]).
std::vector<std::vector<double>> encode_reference(const ToyModelParams& p, const Tensor& frames) {
  int h = p.dims.hidden_dim;
  std::vector<double> prev(static_cast<size_t>(h), 0.0);
  std::vector<std::vector<double>> states;
  for (int t = 0; t < frames.rows; ++t) {
    std::vector<double> cur(static_cast<size_t>(h), 0.0);
    for (int i = 0; i < h; ++i) {
      double acc = p.enc_b(i, 0);
      for (int j = 0; j < p.dims.frame_dim; ++j) acc += p.enc_wx(i, j) * frames(t, j);
      for (int j = 0; j < h; ++j) acc += p.enc_wh(i, j) * prev[static_cast<size_t>(j)];
      cur[static_cast<size_t>(i)] = std::tanh(acc);
    }
    states.push_back(cur);
    prev = cur;
  }
  return states;
}

}  // namespace

TEST(Encode, SingleFrameIsBaseCase) {
  ToyModelParams p = small_params(4);
  std::mt19937_64 rng(5);
  Tensor frames = homosmooth::random_uniform(1, 3, -1, 1, rng);
  Tensor states = encode(p, frames);
  ASSERT_EQ(states.cols, 1);
  auto ref = encode_reference(p, frames);
  for (int i = 0; i < states.rows; ++i) EXPECT_NEAR(states(i, 0), ref[0][static_cast<size_t>(i)], 1e-15);
}

TEST(Encode, ZeroWeightsGiveZeroStates) {
  ToyModelParams p = small_params(4);
  p.enc_wx.fill(0.0);
  p.enc_wh.fill(0.0);
  p.enc_b.fill(0.0);
  std::mt19937_64 rng(6);
  Tensor frames = homosmooth::random_uniform(4, 3, -1, 1, rng);
  Tensor states = encode(p, frames);
  for (double v : states.data) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Encode, MatchesScalarReference) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 10; ++round) {
    ToyModelParams p = small_params(100 + round);
    Tensor frames = homosmooth::random_uniform(5, 3, -1, 1, rng);
    Tensor states = encode(p, frames);
    auto ref = encode_reference(p, frames);
    for (int t = 0; t < frames.rows; ++t) {
      for (int i = 0; i < states.rows; ++i) {
        EXPECT_NEAR(states(i, t), ref[static_cast<size_t>(t)][static_cast<size_t>(i)], 1e-12);
      }
    }
  }
}

TEST(Encode, EmptyInputThrows) {
  ToyModelParams p = small_params(4);
  EXPECT_THROW(encode(p, Tensor(0, 3)), std::invalid_argument);
}

TEST(DecodeStep, SingleEncoderStateGetsFullAttention) {
  ToyModelParams p = small_params(8);
  std::mt19937_64 rng(9);
  Tensor enc = homosmooth::random_uniform(4, 1, -1, 1, rng);
  Tensor s_prev = homosmooth::random_uniform(4, 1, -1, 1, rng);
  DecoderStep step = decode_step(p, s_prev, 5, enc);
  ASSERT_EQ(step.attention.rows, 1);
  EXPECT_NEAR(step.attention(0, 0), 1.0, 1e-15);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(step.context(i, 0), enc(i, 0), 1e-15);
}

TEST(DecodeStep, IdenticalStatesMakeContextIndependentOfWeights) {
  ToyModelParams p = small_params(10);
  std::mt19937_64 rng(11);
  Tensor one = homosmooth::random_uniform(4, 1, -1, 1, rng);
  Tensor enc = homosmooth::hcat({one, one, one});
  Tensor s_prev = homosmooth::random_uniform(4, 1, -1, 1, rng);
  DecoderStep step = decode_step(p, s_prev, 2, enc);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(step.context(i, 0), one(i, 0), 1e-12);
}

TEST(DecodeStep, AttentionSumsToOne) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 20; ++round) {
    ToyModelParams p = small_params(200 + round);
    Tensor enc = homosmooth::random_uniform(4, 1 + static_cast<int>(rng() % 6), -1, 1, rng);
    Tensor s_prev = homosmooth::random_uniform(4, 1, -1, 1, rng);
    DecoderStep step = decode_step(p, s_prev, static_cast<int>(rng() % 8), enc);
    double sum = 0.0;
    for (double a : step.attention.data) sum += a;
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(DecodeStep, MatchesScalarReference) {
  // Independent scalar recomputation of one decode step.
  ToyModelParams p = small_params(33);
  std::mt19937_64 rng(13);
  int t_len = 3, h = 4, a_dim = 4, e_dim = 3;
  Tensor enc = homosmooth::random_uniform(h, t_len, -1, 1, rng);
  Tensor s_prev = homosmooth::random_uniform(h, 1, -1, 1, rng);
  int prev_char = 6;
  DecoderStep step = decode_step(p, s_prev, prev_char, enc);

  // attention scores
  std::vector<double> scores(static_cast<size_t>(t_len), 0.0);
  for (int t = 0; t < t_len; ++t) {
    for (int ai = 0; ai < a_dim; ++ai) {
      double pre = p.att_b(ai, 0);
      for (int j = 0; j < h; ++j) pre += p.att_wh(ai, j) * enc(j, t);
      for (int j = 0; j < h; ++j) pre += p.att_ws(ai, j) * s_prev(j, 0);
      scores[static_cast<size_t>(t)] += p.att_v(ai, 0) * std::tanh(pre);
    }
  }
  double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - mx);
  std::vector<double> alpha;
  for (double s : scores) alpha.push_back(std::exp(s - mx) / z);
  for (int t = 0; t < t_len; ++t) EXPECT_NEAR(step.attention(t, 0), alpha[static_cast<size_t>(t)], 1e-12);

  std::vector<double> ctx(static_cast<size_t>(h), 0.0);
  for (int i = 0; i < h; ++i) {
    for (int t = 0; t < t_len; ++t) ctx[static_cast<size_t>(i)] += enc(i, t) * alpha[static_cast<size_t>(t)];
    EXPECT_NEAR(step.context(i, 0), ctx[static_cast<size_t>(i)], 1e-12);
  }

  // decoder cell over [embed(prev); context]
  std::vector<double> input;
  for (int j = 0; j < e_dim; ++j) input.push_back(p.embed(prev_char, j));
  for (int i = 0; i < h; ++i) input.push_back(ctx[static_cast<size_t>(i)]);
  std::vector<double> state(static_cast<size_t>(h), 0.0);
  for (int i = 0; i < h; ++i) {
    double acc = p.dec_b(i, 0);
    for (size_t j = 0; j < input.size(); ++j) acc += p.dec_wx(i, static_cast<int>(j)) * input[j];
    for (int j = 0; j < h; ++j) acc += p.dec_ws(i, j) * s_prev(j, 0);
    state[static_cast<size_t>(i)] = std::tanh(acc);
    EXPECT_NEAR(step.state(i, 0), state[static_cast<size_t>(i)], 1e-12);
  }

  for (int k = 0; k < 8; ++k) {
    double acc = p.out_b(k, 0);
    for (int j = 0; j < h; ++j) acc += p.out_w(k, j) * state[static_cast<size_t>(j)];
    for (int j = 0; j < h; ++j) acc += p.out_w(k, h + j) * ctx[static_cast<size_t>(j)];
    EXPECT_NEAR(step.logits(k, 0), acc, 1e-12);
  }
}

TEST(ForwardTeacherForced, LengthContract) {
  ToyModelParams p = small_params(44);
  std::mt19937_64 rng(14);
  Tensor frames = homosmooth::random_uniform(3, 3, -1, 1, rng);
  auto logits = forward_teacher_forced(p, frames, {5}, 2);
  EXPECT_EQ(logits.size(), 2u);  // char + EOS position
  EXPECT_EQ(logits[0].size(), 8u);
}

TEST(ForwardTeacherForced, Deterministic) {
  ToyModelParams p = small_params(45);
  std::mt19937_64 rng(15);
  Tensor frames = homosmooth::random_uniform(5, 3, -1, 1, rng);
  auto a = forward_teacher_forced(p, frames, {1, 5, 7}, 2);
  auto b = forward_teacher_forced(p, frames, {1, 5, 7}, 2);
  EXPECT_EQ(a, b);
}

TEST(ForwardTeacherForced, MatchesDecodeStepComposition) {
  ToyModelParams p = small_params(46);
  std::mt19937_64 rng(16);
  Tensor frames = homosmooth::random_uniform(4, 3, -1, 1, rng);
  std::vector<int> labels = {6, 1, 4};
  int sos = 2;
  auto logits = forward_teacher_forced(p, frames, labels, sos);

  Tensor enc = encode(p, frames);
  Tensor state(p.dims.hidden_dim, 1);
  int prev = sos;
  for (size_t u = 0; u <= labels.size(); ++u) {
    DecoderStep step = decode_step(p, state, prev, enc);
    ASSERT_EQ(logits[u].size(), step.logits.data.size());
    for (size_t i = 0; i < logits[u].size(); ++i) {
      EXPECT_NEAR(logits[u][i], step.logits.data[i], 1e-12);
    }
    state = step.state;
    if (u < labels.size()) prev = labels[u];
  }
}

TEST(GreedyDecode, MaxLenZeroGivesEmpty) {
  ToyModelParams p = small_params(47);
  std::mt19937_64 rng(17);
  Tensor frames = homosmooth::random_uniform(3, 3, -1, 1, rng);
  EXPECT_TRUE(greedy_decode(p, frames, 0, 2, 3).empty());
}

TEST(GreedyDecode, MatchesStepwiseArgmaxOracle) {
  // Independent per-step enumeration of all next characters.
  std::mt19937_64 rng(18);
  for (int round = 0; round < 10; ++round) {
    ToyModelParams p = init_params(5, ModelConfig{3, 3, 4, 4}, 300 + round);
    Tensor frames = homosmooth::random_uniform(4, 3, -1, 1, rng);
    int sos = 2, eos = 3, max_len = 6;
    std::vector<int> got = greedy_decode(p, frames, max_len, sos, eos);

    std::vector<int> expect;
    Tensor enc = encode(p, frames);
    Tensor state(p.dims.hidden_dim, 1);
    int prev = sos;
    for (int u = 0; u < max_len; ++u) {
      DecoderStep step = decode_step(p, state, prev, enc);
      int best = 0;
      double best_v = step.logits(0, 0);
      for (int k = 1; k < 5; ++k) {
        if (step.logits(k, 0) > best_v) {
          best = k;
          best_v = step.logits(k, 0);
        }
      }
      if (best == eos) break;
      expect.push_back(best);
      prev = best;
      state = step.state;
    }
    EXPECT_EQ(got, expect);
  }
}

TEST(Checkpoint, SaveLoadRoundTrip) {
  ToyModelParams p = small_params(48);
  std::stringstream ss;
  homosmooth::save_checkpoint(p, ss);
  ToyModelParams back = homosmooth::load_checkpoint(ss);
  EXPECT_EQ(back.vocab_size, p.vocab_size);
  bool equal = true;
  std::vector<const Tensor*> a, b;
  p.for_each([&](const char*, const Tensor& t) { a.push_back(&t); });
  back.for_each([&](const char*, const Tensor& t) { b.push_back(&t); });
  for (size_t i = 0; i < a.size(); ++i) equal = equal && a[i]->data == b[i]->data;
  EXPECT_TRUE(equal);
}

TEST(Checkpoint, RejectsWrongFormat) {
  std::stringstream ss("{\"format\":\"something-else\",\"version\":1}");
  EXPECT_THROW(homosmooth::load_checkpoint(ss), std::runtime_error);
}

// The full-model certification: analytic gradients against central finite
// differences on every parameter tensor.
TEST(ModelGradcheck, AllParametersMatchFiniteDifferences) {
  for (const auto& r : homosmooth::run_model_gradcheck(7)) {
    EXPECT_TRUE(r.pass) << r.name << " rel_err=" << r.rel_error;
  }
}
