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
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "homosmooth/autodiff.hpp"
#include "homosmooth/edit_distance.hpp"
#include "homosmooth/homophone_index.hpp"
#include "homosmooth/lexicon.hpp"
#include "homosmooth/ls_loss.hpp"
#include "homosmooth/prior.hpp"
#include "homosmooth/synthetic.hpp"
#include "homosmooth/toy_model.hpp"

namespace homosmooth {

using UtterancePriors = std::vector<std::shared_ptr<const SmoothingDistribution>>;

// Precomputes one prior per position (plus EOS) for every utterance.
// Distinct positions with the same dispatch inputs share one object, so a
// whole dataset holds only a handful of distributions.
inline std::vector<UtterancePriors> build_dataset_priors(const std::vector<Utterance>& utts,
                                                         const Vocabulary& vocab,
                                                         const Lexicon& lexicon,
                                                         const StrategyConfig& cfg) {
  cfg.validate();
  std::unordered_map<std::string, std::shared_ptr<const SmoothingDistribution>> cache;
  auto cached = [&](const std::string& key, auto&& make) {
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto p = std::make_shared<const SmoothingDistribution>(make());
    cache.emplace(key, p);
    return std::shared_ptr<const SmoothingDistribution>(p);
  };
  auto eos_prior = cached("eos", [&] { return SmoothingDistribution::one_hot(cfg.k, vocab.eos()); });

  std::vector<UtterancePriors> out;
  out.reserve(utts.size());
  for (const auto& utt : utts) {
    std::vector<std::string> chars;
    chars.reserve(utt.labels.size());
    for (int k : utt.labels) chars.push_back(vocab.decode(k));
    std::vector<PronouncedChar> pron = pronounce_sentence(chars, lexicon);

    UtterancePriors priors;
    priors.reserve(utt.labels.size() + 1);
    int prev = vocab.sos();
    for (size_t u = 0; u < utt.labels.size(); ++u) {
      int k0 = utt.labels[u];
      const auto& syl = pron[u].syllable;
      std::string key;
      switch (cfg.kind) {
        case Strategy::uniform:
          key = "uni";
          break;
        case Strategy::unigram:
          key = "gram";
          break;
        case Strategy::homo_unigram:
        case Strategy::homo_fuzzy:
          key = syl ? strategy_name(cfg.kind) + std::to_string(k0) + "|" +
                          syllable_key(*syl, cfg.index->tone_mode())
                    : "gram";
          break;
        case Strategy::homo_ngram:
          if (syl && cfg.index->has_homophones(k0, *syl)) {
            key = "homo" + std::to_string(k0) + "|" + syllable_key(*syl, cfg.index->tone_mode());
          } else {
            key = "ng" + std::to_string(prev);
          }
          break;
      }
      int prev_copy = prev;
      priors.push_back(cached(key, [&] { return build_prior(k0, syl, prev_copy, cfg); }));
      prev = k0;
    }
    priors.push_back(eos_prior);
    out.push_back(std::move(priors));
  }
  return out;
}

// Teacher-forced loss of one utterance under precomputed priors.
inline double utterance_loss(const ToyModelParams& params, const Utterance& utt,
                             const UtterancePriors& priors, double beta,
                             const Vocabulary& vocab) {
  std::vector<std::vector<double>> logits =
      forward_teacher_forced(params, utt.frames, utt.labels, vocab.sos());
  double total = 0.0;
  for (size_t u = 0; u < logits.size(); ++u) {
    int target = u < utt.labels.size() ? utt.labels[u] : vocab.eos();
    total += ls_loss(logits[u], target, *priors[u], beta);
  }
  return total;
}

struct OptimizerConfig {
  double learning_rate = 0.05;
  double momentum = 0.8;
  double clip_norm = 5.0;
  int batch_size = 16;
  int epochs = 12;
  int ls_start_epoch = 0;  // epochs before this train one-hot (beta = 0)

  void validate() const {
    if (learning_rate < 0.0) throw std::invalid_argument("negative learning rate");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum outside [0, 1)");
    if (clip_norm <= 0.0) throw std::invalid_argument("clip_norm must be > 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("negative epoch count");
    if (ls_start_epoch < 0) throw std::invalid_argument("negative ls_start_epoch");
  }
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double heldout_loss = 0.0;
  double heldout_cer = 0.0;
};

inline double heldout_cer_percent(const ToyModelParams& params,
                                  const std::vector<Utterance>& heldout,
                                  const Vocabulary& vocab, int max_decode_len) {
  std::vector<std::vector<int>> refs, hyps;
  refs.reserve(heldout.size());
  hyps.reserve(heldout.size());
  for (const auto& utt : heldout) {
    refs.push_back(utt.labels);
    hyps.push_back(greedy_decode(params, utt.frames, max_decode_len, vocab.sos(), vocab.eos()));
  }
  return corpus_cer(refs, hyps);
}

// Mini-batch SGD with momentum and global-norm clipping. Deterministic
// under a fixed seed: shuffling, batch order and gradient reduction all
// run in fixed order.
inline std::vector<EpochLog> train(ToyModelParams& params,
                                   const std::vector<Utterance>& train_set,
                                   const std::vector<Utterance>& heldout,
                                   const std::vector<UtterancePriors>& train_priors,
                                   const std::vector<UtterancePriors>& heldout_priors,
                                   double beta, const OptimizerConfig& opt,
                                   const Vocabulary& vocab, uint64_t seed,
                                   int max_decode_len = 32) {
  opt.validate();
  if (train_priors.size() != train_set.size() || heldout_priors.size() != heldout.size()) {
    throw std::invalid_argument("train: priors do not match dataset");
  }

  ToyModelParams grad_acc = params;
  ToyModelParams velocity = params;
  grad_acc.for_each([](const char*, Tensor& t) { t.fill(0.0); });
  velocity.for_each([](const char*, Tensor& t) { t.fill(0.0); });

  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(seed);

  std::vector<EpochLog> log;
  ad::Tape tape;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    double epoch_beta = epoch < opt.ls_start_epoch ? 0.0 : beta;
    rng::shuffle(order, shuffle_rng);

    double train_loss_sum = 0.0;
    size_t batch_start = 0;
    while (batch_start < order.size()) {
      size_t batch_end = std::min(batch_start + static_cast<size_t>(opt.batch_size), order.size());
      grad_acc.for_each([](const char*, Tensor& t) { t.fill(0.0); });
      for (size_t b = batch_start; b < batch_end; ++b) {
        const Utterance& utt = train_set[order[b]];
        tape.clear();
        ParamVars pv = make_param_vars(tape, params);
        ad::Var loss;
        try {
          loss = build_sequence_loss(tape, pv, params, utt.frames, utt.labels,
                                     train_priors[order[b]], epoch_beta, vocab.sos(),
                                     vocab.eos());
        } catch (const std::invalid_argument& e) {
          throw std::runtime_error("training diverged (" + std::string(e.what()) +
                                   ") at epoch " + std::to_string(epoch));
        }
        train_loss_sum += loss.value().data[0];
        tape.backward(loss);
        std::vector<ad::Var> param_vars;
        pv.for_each([&](const char*, ad::Var& v) { param_vars.push_back(v); });
        size_t at = 0;
        grad_acc.for_each([&](const char*, Tensor& into) {
          const Tensor& g = tape.grad(param_vars[at++]);
          for (size_t i = 0; i < into.data.size(); ++i) into.data[i] += g.data[i];
        });
      }

      double inv = 1.0 / static_cast<double>(batch_end - batch_start);
      double sq_norm = 0.0;
      grad_acc.for_each([&](const char*, Tensor& t) {
        for (double& v : t.data) {
          v *= inv;
          sq_norm += v * v;
        }
      });
      double norm = std::sqrt(sq_norm);
      double clip = norm > opt.clip_norm ? opt.clip_norm / norm : 1.0;

      std::vector<Tensor*> vels, grads;
      velocity.for_each([&](const char*, Tensor& t) { vels.push_back(&t); });
      grad_acc.for_each([&](const char*, Tensor& t) { grads.push_back(&t); });
      size_t at = 0;
      params.for_each([&](const char*, Tensor& theta) {
        Tensor& vel = *vels[at];
        const Tensor& g = *grads[at];
        ++at;
        for (size_t i = 0; i < theta.data.size(); ++i) {
          vel.data[i] = opt.momentum * vel.data[i] - opt.learning_rate * clip * g.data[i];
          theta.data[i] += vel.data[i];
        }
      });

      if (!params.all_finite()) {
        throw std::runtime_error("training diverged (non-finite parameters) at epoch " +
                                 std::to_string(epoch));
      }
      batch_start = batch_end;
    }
    tape.clear();

    double train_loss = train_loss_sum / static_cast<double>(train_set.size());
    if (!std::isfinite(train_loss)) {
      throw std::runtime_error("training diverged (non-finite loss) at epoch " +
                               std::to_string(epoch));
    }
    double heldout_loss = 0.0;
    for (size_t i = 0; i < heldout.size(); ++i) {
      heldout_loss += utterance_loss(params, heldout[i], heldout_priors[i], epoch_beta, vocab);
    }
    if (!heldout.empty()) heldout_loss /= static_cast<double>(heldout.size());
    double cer = heldout.empty() ? 0.0 : heldout_cer_percent(params, heldout, vocab, max_decode_len);
    log.push_back({epoch, train_loss, heldout_loss, cer});
  }
  return log;
}

// Held-out behaviour at homophone positions under teacher forcing: the
// probability of the truth character, the total mass on its homophone
// set, and the log gap between the truth and its strongest homophone.
struct GapStats {
  int positions = 0;
  double truth_prob_mean = 0.0, truth_prob_median = 0.0;
  double homo_mass_mean = 0.0, homo_mass_median = 0.0;
  double log_gap_mean = 0.0, log_gap_median = 0.0;
};

namespace detail {
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
inline double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}
}  // namespace detail

inline GapStats probe_homophone_gap(const ToyModelParams& params,
                                    const std::vector<Utterance>& utts,
                                    const Vocabulary& vocab, const Lexicon& lexicon,
                                    const HomophoneIndex& index) {
  std::vector<double> truth_probs, homo_masses, gaps;
  for (const auto& utt : utts) {
    std::vector<std::string> chars;
    chars.reserve(utt.labels.size());
    for (int k : utt.labels) chars.push_back(vocab.decode(k));
    std::vector<PronouncedChar> pron = pronounce_sentence(chars, lexicon);
    std::vector<std::vector<double>> logits =
        forward_teacher_forced(params, utt.frames, utt.labels, vocab.sos());
    for (size_t u = 0; u < utt.labels.size(); ++u) {
      if (!pron[u].syllable) continue;
      int k0 = utt.labels[u];
      std::vector<int> homo = index.homophones(k0, *pron[u].syllable);
      if (homo.empty()) continue;
      std::vector<double> logp = log_softmax(logits[u]);
      double truth_lp = logp[static_cast<size_t>(k0)];
      double max_homo_lp = logp[static_cast<size_t>(homo[0])];
      double mass = 0.0;
      for (int h : homo) {
        max_homo_lp = std::max(max_homo_lp, logp[static_cast<size_t>(h)]);
        mass += std::exp(logp[static_cast<size_t>(h)]);
      }
      truth_probs.push_back(std::exp(truth_lp));
      homo_masses.push_back(mass);
      gaps.push_back(truth_lp - max_homo_lp);
    }
  }
  if (truth_probs.empty()) {
    throw std::runtime_error("probe_homophone_gap: no homophone positions in the data");
  }
  GapStats s;
  s.positions = static_cast<int>(truth_probs.size());
  s.truth_prob_mean = detail::mean(truth_probs);
  s.truth_prob_median = detail::median(truth_probs);
  s.homo_mass_mean = detail::mean(homo_masses);
  s.homo_mass_median = detail::median(homo_masses);
  s.log_gap_mean = detail::mean(gaps);
  s.log_gap_median = detail::median(gaps);
  return s;
}

}  // namespace homosmooth
