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
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "homosmooth/distribution.hpp"
#include "homosmooth/prior.hpp"

namespace homosmooth {

struct LossConfig {
  double beta = 0.4;  // weight of the KL penalty

  void validate() const {
    if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must lie in [0, 1]");
  }
};

// Numerically stable log softmax (max-subtracted). Throws on NaN input.
inline std::vector<double> log_softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("log_softmax: empty input");
  double mx = logits[0];
  for (double x : logits) {
    if (std::isnan(x)) throw std::invalid_argument("log_softmax: NaN input");
    mx = std::max(mx, x);
  }
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - mx);
  double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

inline std::vector<double> softmax(const std::vector<double>& logits) {
  std::vector<double> out = log_softmax(logits);
  for (double& x : out) x = std::exp(x);
  return out;
}

// -sum_k v_k log p_k, evaluated over the sparse entries plus a closed-form
// tail term using the precomputable sum of all log-probabilities.
inline double cross_entropy(const SmoothingDistribution& v, const std::vector<double>& logp) {
  if (static_cast<int>(logp.size()) != v.k()) {
    throw std::invalid_argument("cross_entropy: dimension mismatch");
  }
  double acc = 0.0;
  if (v.tail() > 0.0) {
    double logp_sum = 0.0;
    for (double lp : logp) logp_sum += lp;
    acc += v.tail() * logp_sum;
    for (const auto& [i, p] : v.entries()) {
      acc += (p - v.tail()) * logp[static_cast<size_t>(i)];
    }
  } else {
    for (const auto& [i, p] : v.entries()) {
      if (p > 0.0) acc += p * logp[static_cast<size_t>(i)];
    }
  }
  return -acc;
}

// D_KL(v || p) = -sum_k v_k log(p_k / v_k). Terms with v_k = 0 contribute
// nothing; always >= 0 up to rounding.
inline double kl_divergence(const SmoothingDistribution& v, const std::vector<double>& logp) {
  return cross_entropy(v, logp) - v.entropy();
}

// Eq-style mixed target: p' = (1-beta) * onehot(k0) + beta * v.
inline SmoothingDistribution mixed_target(int k0, const SmoothingDistribution& v, double beta) {
  if (k0 < 0 || k0 >= v.k()) throw std::out_of_range("mixed_target: k0 out of range");
  std::vector<std::pair<int, double>> entries;
  entries.reserve(v.entries().size() + 1);
  bool seen_k0 = false;
  for (const auto& [i, p] : v.entries()) {
    double q = beta * p;
    if (i == k0) {
      q += 1.0 - beta;
      seen_k0 = true;
    }
    entries.emplace_back(i, q);
  }
  if (!seen_k0) entries.emplace_back(k0, (1.0 - beta) + beta * v.tail());
  return SmoothingDistribution(v.k(), std::move(entries), beta * v.tail());
}

// Per-position smoothing loss: -(1-beta) log p(k0) + beta * KL(v || p).
inline double ls_loss(const std::vector<double>& logits, int k0,
                      const SmoothingDistribution& v, double beta) {
  std::vector<double> logp = log_softmax(logits);
  if (static_cast<int>(logp.size()) != v.k()) {
    throw std::invalid_argument("ls_loss: logits/prior dimension mismatch");
  }
  return -(1.0 - beta) * logp[static_cast<size_t>(k0)] + beta * kl_divergence(v, logp);
}

// Exact gradient with respect to the logits: softmax(logits) - p'.
// Components sum to zero.
inline std::vector<double> ls_loss_grad(const std::vector<double>& logits, int k0,
                                        const SmoothingDistribution& v, double beta) {
  std::vector<double> grad = softmax(logits);
  SmoothingDistribution target = mixed_target(k0, v, beta);
  double tail = target.tail();
  if (tail != 0.0) {
    for (double& g : grad) g -= tail;
    for (const auto& [i, p] : target.entries()) {
      grad[static_cast<size_t>(i)] -= p - tail;
    }
  } else {
    for (const auto& [i, p] : target.entries()) grad[static_cast<size_t>(i)] -= p;
  }
  return grad;
}

// Sum of per-position losses over a sequence; empty sequences cost 0.
inline double sequence_ls_loss(const std::vector<std::vector<double>>& logits,
                               const std::vector<int>& truth,
                               const std::vector<PositionPrior>& priors, double beta) {
  if (logits.size() != truth.size() || logits.size() != priors.size()) {
    throw std::invalid_argument("sequence_ls_loss: length mismatch");
  }
  double total = 0.0;
  for (size_t u = 0; u < logits.size(); ++u) {
    total += ls_loss(logits[u], truth[u], priors[u].prior, beta);
  }
  return total;
}

}  // namespace homosmooth
