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
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "homosmooth/autodiff.hpp"
#include "homosmooth/ls_loss.hpp"
#include "homosmooth/tensor.hpp"
#include "homosmooth/toy_model.hpp"
#include "homosmooth/train.hpp"

namespace homosmooth {

struct GradCheckResult {
  std::string name;
  double rel_error = 0.0;
  bool pass = false;
};

namespace gradcheck_detail {

// ||a - n|| / (||a|| + ||n|| + eps) over one tensor.
inline double rel_error(const Tensor& analytic, const Tensor& numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (size_t i = 0; i < analytic.data.size(); ++i) {
    double d = analytic.data[i] - numeric.data[i];
    diff += d * d;
    na += analytic.data[i] * analytic.data[i];
    nn += numeric.data[i] * numeric.data[i];
  }
  return std::sqrt(diff) / (std::sqrt(na) + std::sqrt(nn) + 1e-12);
}

// Central finite differences of a scalar function over every element of
// `inputs[arg]`.
inline Tensor fd_gradient(const std::function<double(const std::vector<Tensor>&)>& f,
                          std::vector<Tensor> inputs, size_t arg, double h) {
  Tensor grad(inputs[arg].rows, inputs[arg].cols);
  for (size_t i = 0; i < inputs[arg].data.size(); ++i) {
    double keep = inputs[arg].data[i];
    inputs[arg].data[i] = keep + h;
    double up = f(inputs);
    inputs[arg].data[i] = keep - h;
    double down = f(inputs);
    inputs[arg].data[i] = keep;
    grad.data[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace gradcheck_detail

// Checks one tape op against finite differences. The op output is
// projected to a scalar with fixed random matrices so any output shape
// reduces to a checkable function.
inline std::vector<GradCheckResult> check_op(
    const std::string& name, const std::vector<Tensor>& inputs,
    const std::function<Tensor(const std::vector<Tensor>&)>& plain,
    const std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>& taped,
    std::mt19937_64& rng, double h = 1e-5, double tol = 1e-5) {
  Tensor probe_out = plain(inputs);
  Tensor w_left = random_uniform(1, probe_out.rows, -1.0, 1.0, rng);
  Tensor w_right = random_uniform(probe_out.cols, 1, -1.0, 1.0, rng);

  auto scalar_plain = [&](const std::vector<Tensor>& xs) {
    return matmul(matmul(w_left, plain(xs)), w_right).data[0];
  };

  ad::Tape tape;
  std::vector<ad::Var> vars;
  vars.reserve(inputs.size());
  for (const auto& t : inputs) vars.push_back(tape.input(t));
  ad::Var wl = tape.input(w_left);
  ad::Var wr = tape.input(w_right);
  ad::Var scalar = ad::matmul(ad::matmul(wl, taped(tape, vars)), wr);
  tape.backward(scalar);

  std::vector<GradCheckResult> results;
  for (size_t a = 0; a < inputs.size(); ++a) {
    Tensor numeric = gradcheck_detail::fd_gradient(scalar_plain, inputs, a, h);
    double err = gradcheck_detail::rel_error(tape.grad(vars[a]), numeric);
    results.push_back({name + "/arg" + std::to_string(a), err, err <= tol});
  }
  return results;
}

// Finite-difference checks for every op on the tape.
inline std::vector<GradCheckResult> run_op_gradchecks(uint64_t seed, double h = 1e-5,
                                                      double tol = 1e-5) {
  std::mt19937_64 rng(seed);
  auto rnd = [&](int r, int c) { return random_uniform(r, c, -1.0, 1.0, rng); };
  std::vector<GradCheckResult> all;
  auto run = [&](const std::string& name, const std::vector<Tensor>& inputs, auto plain,
                 auto taped) {
    for (auto& r : check_op(name, inputs, plain, taped, rng, h, tol)) all.push_back(r);
  };

  run("matmul", {rnd(3, 4), rnd(4, 2)},
      [](const std::vector<Tensor>& x) { return matmul(x[0], x[1]); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::matmul(v[0], v[1]); });
  run("add", {rnd(3, 2), rnd(3, 2)},
      [](const std::vector<Tensor>& x) { return add(x[0], x[1]); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::add(v[0], v[1]); });
  run("add_col_broadcast", {rnd(3, 4), rnd(3, 1)},
      [](const std::vector<Tensor>& x) { return add_col_broadcast(x[0], x[1]); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::add_col_broadcast(v[0], v[1]); });
  run("tanh", {rnd(4, 3)},
      [](const std::vector<Tensor>& x) { return tanh_map(x[0]); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::tanh(v[0]); });
  run("softmax", {rnd(5, 1)},
      [](const std::vector<Tensor>& x) { return softmax_col(x[0]); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::softmax(v[0]); });
  run("transpose", {rnd(3, 4)},
      [](const std::vector<Tensor>& x) { return transpose(x[0]); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::transpose(v[0]); });
  run("vcat", {rnd(3, 1), rnd(2, 1)},
      [](const std::vector<Tensor>& x) { return vcat(x[0], x[1]); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::vcat(v[0], v[1]); });
  run("hcat", {rnd(3, 1), rnd(3, 1), rnd(3, 1)},
      [](const std::vector<Tensor>& x) { return hcat(x); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::hcat(v); });
  run("scale", {rnd(3, 3)},
      [](const std::vector<Tensor>& x) { return scale(x[0], 0.37); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::scale(v[0], 0.37); });
  run("embed", {rnd(5, 3)},
      [](const std::vector<Tensor>& x) { return row_as_col(x[0], 2); },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::embed(v[0], 2); });

  {
    auto prior = std::make_shared<const SmoothingDistribution>(
        SmoothingDistribution(6, {{1, 0.6}, {3, 0.2}}, 0.05));
    run("ls_loss_head", {rnd(6, 1)},
        [prior](const std::vector<Tensor>& x) {
          Tensor out(1, 1);
          out.data[0] = ls_loss(x[0].data, 1, *prior, 0.4);
          return out;
        },
        [prior](ad::Tape&, const std::vector<ad::Var>& v) {
          return ad::ls_loss_head(v[0], 1, prior, 0.4);
        });
  }
  run("sum", {rnd(1, 1), rnd(1, 1), rnd(1, 1)},
      [](const std::vector<Tensor>& x) {
        Tensor out(1, 1);
        for (const auto& t : x) out.data[0] += t.data[0];
        return out;
      },
      [](ad::Tape&, const std::vector<ad::Var>& v) { return ad::sum(v); });
  return all;
}

// End-to-end check on a tiny model: analytic gradients of the taped
// sequence loss against finite differences of the plain forward path.
inline std::vector<GradCheckResult> run_model_gradcheck(uint64_t seed, double h = 1e-5,
                                                        double tol = 1e-5) {
  const int k = 8, t_frames = 3;
  ModelConfig dims{3, 3, 4, 4};  // frame, embed, hidden, attention
  ToyModelParams params = init_params(k, dims, seed);
  std::mt19937_64 rng(seed + 1);
  Tensor frames = random_uniform(t_frames, dims.frame_dim, -1.0, 1.0, rng);
  std::vector<int> labels = {5, 2};  // U = 2
  int sos = 2, eos = 3;

  std::vector<std::shared_ptr<const SmoothingDistribution>> priors;
  priors.push_back(std::make_shared<const SmoothingDistribution>(
      SmoothingDistribution(k, {{5, 0.6}, {6, 0.3}}, 0.1 / (k - 2))));
  priors.push_back(std::make_shared<const SmoothingDistribution>(
      SmoothingDistribution(k, {{2, 0.55}, {0, 0.25}}, 0.2 / (k - 2))));
  priors.push_back(std::make_shared<const SmoothingDistribution>(
      SmoothingDistribution::one_hot(k, eos)));
  double beta = 0.4;

  auto plain_loss = [&](const ToyModelParams& p) {
    std::vector<std::vector<double>> logits = forward_teacher_forced(p, frames, labels, sos);
    double total = 0.0;
    for (size_t u = 0; u < logits.size(); ++u) {
      int target = u < labels.size() ? labels[u] : eos;
      total += ls_loss(logits[u], target, *priors[u], beta);
    }
    return total;
  };

  ad::Tape tape;
  ParamVars pv = make_param_vars(tape, params);
  ad::Var loss = build_sequence_loss(tape, pv, params, frames, labels, priors, beta, sos, eos);
  tape.backward(loss);

  std::vector<ad::Var> vars;
  pv.for_each([&](const char*, ad::Var& v) { vars.push_back(v); });

  std::vector<GradCheckResult> results;
  size_t at = 0;
  params.for_each([&](const char* name, Tensor& theta) {
    Tensor numeric(theta.rows, theta.cols);
    for (size_t i = 0; i < theta.data.size(); ++i) {
      double keep = theta.data[i];
      theta.data[i] = keep + h;
      double up = plain_loss(params);
      theta.data[i] = keep - h;
      double down = plain_loss(params);
      theta.data[i] = keep;
      numeric.data[i] = (up - down) / (2.0 * h);
    }
    double err = gradcheck_detail::rel_error(tape.grad(vars[at++]), numeric);
    results.push_back({std::string("model/") + name, err, err <= tol});
  });
  return results;
}

}  // namespace homosmooth
