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
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "homosmooth/autodiff.hpp"
#include "homosmooth/distribution.hpp"
#include "homosmooth/tensor.hpp"

namespace homosmooth {

struct ModelConfig {
  int frame_dim = 8;
  int embed_dim = 8;
  int hidden_dim = 32;
  int attn_dim = 32;
};

// Single-layer tanh recurrent encoder, additive attention, single-layer
// recurrent decoder and a linear output head. Small enough that every
// gradient can be checked against finite differences.
struct ToyModelParams {
  int vocab_size = 0;
  ModelConfig dims;

  Tensor embed;   // K x E
  Tensor enc_wx;  // H x d_in
  Tensor enc_wh;  // H x H
  Tensor enc_b;   // H x 1
  Tensor att_ws;  // A x H, decoder-state branch
  Tensor att_wh;  // A x H, encoder-state branch
  Tensor att_b;   // A x 1
  Tensor att_v;   // A x 1, scoring vector
  Tensor dec_wx;  // H x (E + H)
  Tensor dec_ws;  // H x H
  Tensor dec_b;   // H x 1
  Tensor out_w;   // K x 2H
  Tensor out_b;   // K x 1

  template <typename F>
  void for_each(F&& f) {
    f("embed", embed);
    f("enc_wx", enc_wx);
    f("enc_wh", enc_wh);
    f("enc_b", enc_b);
    f("att_ws", att_ws);
    f("att_wh", att_wh);
    f("att_b", att_b);
    f("att_v", att_v);
    f("dec_wx", dec_wx);
    f("dec_ws", dec_ws);
    f("dec_b", dec_b);
    f("out_w", out_w);
    f("out_b", out_b);
  }

  template <typename F>
  void for_each(F&& f) const {
    const_cast<ToyModelParams*>(this)->for_each(
        [&](const char* name, Tensor& t) { f(name, static_cast<const Tensor&>(t)); });
  }

  bool all_finite() const {
    bool ok = true;
    for_each([&](const char*, const Tensor& t) { ok = ok && t.all_finite(); });
    return ok;
  }
};

inline ToyModelParams init_params(int vocab_size, const ModelConfig& dims, uint64_t seed) {
  if (vocab_size < 1) throw std::invalid_argument("init_params: vocabulary size must be >= 1");
  ToyModelParams p;
  p.vocab_size = vocab_size;
  p.dims = dims;
  int k = vocab_size, e = dims.embed_dim, h = dims.hidden_dim, a = dims.attn_dim,
      d = dims.frame_dim;
  std::mt19937_64 rng(seed);
  auto init = [&](int rows, int cols, int fan_in) {
    double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
    return random_uniform(rows, cols, -r, r, rng);
  };
  p.embed = init(k, e, e);
  p.enc_wx = init(h, d, d);
  p.enc_wh = init(h, h, h);
  p.enc_b = Tensor(h, 1);
  p.att_ws = init(a, h, h);
  p.att_wh = init(a, h, h);
  p.att_b = Tensor(a, 1);
  p.att_v = init(a, 1, a);
  p.dec_wx = init(h, e + h, e + h);
  p.dec_ws = init(h, h, h);
  p.dec_b = Tensor(h, 1);
  p.out_w = init(k, 2 * h, 2 * h);
  p.out_b = Tensor(k, 1);
  return p;
}

// Runs the recurrent encoder over T frames (one frame per row) and returns
// the H x T matrix of hidden states.
inline Tensor encode(const ToyModelParams& p, const Tensor& frames) {
  if (frames.rows < 1) throw std::invalid_argument("encode: empty frame sequence");
  if (frames.cols != p.dims.frame_dim) throw std::invalid_argument("encode: frame dim mismatch");
  int h = p.dims.hidden_dim;
  Tensor states(h, frames.rows);
  Tensor prev(h, 1);
  for (int t = 0; t < frames.rows; ++t) {
    Tensor x = row_as_col(frames, t);
    Tensor s = tanh_map(add(add(matmul(p.enc_wx, x), matmul(p.enc_wh, prev)), p.enc_b));
    for (int i = 0; i < h; ++i) states(i, t) = s(i, 0);
    prev = std::move(s);
  }
  return states;
}

struct DecoderStep {
  Tensor state;      // H x 1
  Tensor context;    // H x 1
  Tensor attention;  // T x 1, sums to 1
  Tensor logits;     // K x 1
};

// One decoder step: additive attention over the encoder states queried by
// the previous decoder state, then the recurrent cell and output head.
// `att_enc` may carry the precomputed att_wh * enc_states (A x T).
inline DecoderStep decode_step(const ToyModelParams& p, const Tensor& s_prev, int prev_char,
                               const Tensor& enc_states, const Tensor* att_enc = nullptr) {
  Tensor pre = att_enc != nullptr ? *att_enc : matmul(p.att_wh, enc_states);
  Tensor query = matmul(p.att_ws, s_prev);
  Tensor scored = tanh_map(add_col_broadcast(add_col_broadcast(pre, query), p.att_b));
  Tensor scores = matmul(transpose(p.att_v), scored);  // 1 x T
  DecoderStep step;
  step.attention = softmax_col(transpose(scores));
  step.context = matmul(enc_states, step.attention);
  Tensor input = vcat(row_as_col(p.embed, prev_char), step.context);
  step.state = tanh_map(add(add(matmul(p.dec_wx, input), matmul(p.dec_ws, s_prev)), p.dec_b));
  step.logits = add(matmul(p.out_w, vcat(step.state, step.context)), p.out_b);
  return step;
}

// Teacher-forced forward pass: position u conditions on the ground truth
// at u-1 (SOS first). Returns labels.size() + 1 logit vectors; the last
// position's target is EOS.
inline std::vector<std::vector<double>> forward_teacher_forced(const ToyModelParams& p,
                                                               const Tensor& frames,
                                                               const std::vector<int>& labels,
                                                               int sos_index) {
  Tensor enc = encode(p, frames);
  Tensor att_pre = matmul(p.att_wh, enc);
  Tensor state(p.dims.hidden_dim, 1);
  std::vector<std::vector<double>> logits;
  logits.reserve(labels.size() + 1);
  int prev = sos_index;
  for (size_t u = 0; u <= labels.size(); ++u) {
    DecoderStep step = decode_step(p, state, prev, enc, &att_pre);
    logits.push_back(step.logits.data);
    state = std::move(step.state);
    if (u < labels.size()) prev = labels[u];
  }
  return logits;
}

// Greedy decoding: argmax at every step (first index wins ties), feeding
// the model its own prediction, stopping at EOS or after max_len symbols.
inline std::vector<int> greedy_decode(const ToyModelParams& p, const Tensor& frames,
                                      int max_len, int sos_index, int eos_index) {
  std::vector<int> out;
  if (max_len <= 0) return out;
  Tensor enc = encode(p, frames);
  Tensor att_pre = matmul(p.att_wh, enc);
  Tensor state(p.dims.hidden_dim, 1);
  int prev = sos_index;
  for (int u = 0; u < max_len; ++u) {
    DecoderStep step = decode_step(p, state, prev, enc, &att_pre);
    int best = 0;
    for (int k = 1; k < p.vocab_size; ++k) {
      if (step.logits(k, 0) > step.logits(best, 0)) best = k;
    }
    if (best == eos_index) break;
    out.push_back(best);
    prev = best;
    state = std::move(step.state);
  }
  return out;
}

// Tape handles for every parameter tensor, in for_each order.
struct ParamVars {
  ad::Var embed, enc_wx, enc_wh, enc_b;
  ad::Var att_ws, att_wh, att_b, att_v;
  ad::Var dec_wx, dec_ws, dec_b, out_w, out_b;

  template <typename F>
  void for_each(F&& f) {
    f("embed", embed);
    f("enc_wx", enc_wx);
    f("enc_wh", enc_wh);
    f("enc_b", enc_b);
    f("att_ws", att_ws);
    f("att_wh", att_wh);
    f("att_b", att_b);
    f("att_v", att_v);
    f("dec_wx", dec_wx);
    f("dec_ws", dec_ws);
    f("dec_b", dec_b);
    f("out_w", out_w);
    f("out_b", out_b);
  }
};

inline ParamVars make_param_vars(ad::Tape& tape, const ToyModelParams& p) {
  ParamVars v;
  auto it = [&tape](const Tensor& t) { return tape.input(t); };
  v.embed = it(p.embed);
  v.enc_wx = it(p.enc_wx);
  v.enc_wh = it(p.enc_wh);
  v.enc_b = it(p.enc_b);
  v.att_ws = it(p.att_ws);
  v.att_wh = it(p.att_wh);
  v.att_b = it(p.att_b);
  v.att_v = it(p.att_v);
  v.dec_wx = it(p.dec_wx);
  v.dec_ws = it(p.dec_ws);
  v.dec_b = it(p.dec_b);
  v.out_w = it(p.out_w);
  v.out_b = it(p.out_b);
  return v;
}

// Differentiable teacher-forced sequence loss mirroring
// forward_teacher_forced + sequence_ls_loss.
inline ad::Var build_sequence_loss(ad::Tape& tape, const ParamVars& pv,
                                   const ToyModelParams& p, const Tensor& frames,
                                   const std::vector<int>& labels,
                                   const std::vector<std::shared_ptr<const SmoothingDistribution>>& priors,
                                   double beta, int sos_index, int eos_index) {
  if (priors.size() != labels.size() + 1) {
    throw std::invalid_argument("build_sequence_loss: need one prior per position plus EOS");
  }
  // encoder
  std::vector<ad::Var> enc_cols;
  enc_cols.reserve(static_cast<size_t>(frames.rows));
  ad::Var h_prev = tape.input(Tensor(p.dims.hidden_dim, 1));
  for (int t = 0; t < frames.rows; ++t) {
    ad::Var x = tape.input(row_as_col(frames, t));
    ad::Var pre = ad::add(ad::add(ad::matmul(pv.enc_wx, x), ad::matmul(pv.enc_wh, h_prev)),
                          pv.enc_b);
    h_prev = ad::tanh(pre);
    enc_cols.push_back(h_prev);
  }
  ad::Var enc = ad::hcat(enc_cols);
  ad::Var att_pre = ad::matmul(pv.att_wh, enc);

  // decoder with teacher forcing
  std::vector<ad::Var> losses;
  losses.reserve(labels.size() + 1);
  ad::Var state = tape.input(Tensor(p.dims.hidden_dim, 1));
  int prev = sos_index;
  for (size_t u = 0; u <= labels.size(); ++u) {
    ad::Var query = ad::matmul(pv.att_ws, state);
    ad::Var scored = ad::tanh(ad::add_col_broadcast(ad::add_col_broadcast(att_pre, query), pv.att_b));
    ad::Var scores = ad::matmul(ad::transpose(pv.att_v), scored);
    ad::Var alpha = ad::softmax(ad::transpose(scores));
    ad::Var context = ad::matmul(enc, alpha);
    ad::Var input = ad::vcat(ad::embed(pv.embed, prev), context);
    state = ad::tanh(ad::add(ad::add(ad::matmul(pv.dec_wx, input), ad::matmul(pv.dec_ws, state)),
                             pv.dec_b));
    ad::Var logits = ad::add(ad::matmul(pv.out_w, ad::vcat(state, context)), pv.out_b);
    int target = u < labels.size() ? labels[u] : eos_index;
    losses.push_back(ad::ls_loss_head(logits, target, priors[u], beta));
    if (u < labels.size()) prev = labels[u];
  }
  return ad::sum(losses);
}

inline void save_checkpoint(const ToyModelParams& p, std::ostream& os) {
  nlohmann::json j;
  j["format"] = "homosmooth-checkpoint";
  j["version"] = 1;
  j["vocab_size"] = p.vocab_size;
  j["frame_dim"] = p.dims.frame_dim;
  j["embed_dim"] = p.dims.embed_dim;
  j["hidden_dim"] = p.dims.hidden_dim;
  j["attn_dim"] = p.dims.attn_dim;
  nlohmann::json tensors = nlohmann::json::object();
  p.for_each([&](const char* name, const Tensor& t) {
    tensors[name] = {{"rows", t.rows}, {"cols", t.cols}, {"data", t.data}};
  });
  j["tensors"] = std::move(tensors);
  os << j.dump() << "\n";
}

inline ToyModelParams load_checkpoint(std::istream& is) {
  nlohmann::json j;
  is >> j;
  if (!j.is_object() || j.value("format", "") != "homosmooth-checkpoint" ||
      j.value("version", 0) != 1) {
    throw std::runtime_error("not a version-1 checkpoint file");
  }
  ToyModelParams p;
  p.vocab_size = j.at("vocab_size").get<int>();
  p.dims.frame_dim = j.at("frame_dim").get<int>();
  p.dims.embed_dim = j.at("embed_dim").get<int>();
  p.dims.hidden_dim = j.at("hidden_dim").get<int>();
  p.dims.attn_dim = j.at("attn_dim").get<int>();
  const auto& tensors = j.at("tensors");
  p.for_each([&](const char* name, Tensor& t) {
    const auto& tj = tensors.at(name);
    t = Tensor(tj.at("rows").get<int>(), tj.at("cols").get<int>(),
               tj.at("data").get<std::vector<double>>());
  });
  return p;
}

}  // namespace homosmooth
