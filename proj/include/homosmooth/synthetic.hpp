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
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "homosmooth/lexicon.hpp"
#include "homosmooth/syllable.hpp"
#include "homosmooth/tensor.hpp"
#include "homosmooth/utf8.hpp"
#include "homosmooth/vocabulary.hpp"

namespace homosmooth {

namespace rng {

// Deterministic, platform-stable draws on top of mt19937_64. The standard
// distributions consume engine output in implementation-defined ways, so
// everything here is spelled out.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline int uniform_int(std::mt19937_64& g, int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(g() % span);
}

inline double gaussian(std::mt19937_64& g) {
  // Box-Muller; one value per call keeps the stream position predictable.
  double u1 = uniform01(g);
  double u2 = uniform01(g);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline int sample_discrete(const std::vector<double>& weights, std::mt19937_64& g) {
  double total = 0.0;
  for (double w : weights) total += w;
  double r = uniform01(g) * total;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (r < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

template <typename T>
inline void shuffle(std::vector<T>& v, std::mt19937_64& g) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(g() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace rng

// Desk-scale homophone language: P pronunciation classes, each holding
// 1..4 characters that sound identical. Frames for a character are the
// class embedding plus Gaussian noise, so homophones are acoustically
// indistinguishable in expectation while the within-class choice is
// skewed in the text statistics.
struct SyntheticLanguageConfig {
  int num_classes = 20;
  std::vector<double> size_weights = {0.1, 0.3, 0.35, 0.25};  // class sizes 1..4
  int frame_dim = 8;
  int frames_min = 2;
  int frames_max = 3;
  double noise_sigma = 0.3;
  double transition_temperature = 1.0;
  double skew = 0.99;  // 0 = uniform within class, 1 = first member only
  int len_min = 3;
  int len_max = 8;
  int train_sentences = 2000;
  int heldout_sentences = 300;
  uint64_t seed = 1;

  void validate() const {
    if (num_classes < 2) throw std::invalid_argument("synthetic config: need at least 2 classes");
    if (size_weights.size() != 4) {
      throw std::invalid_argument("synthetic config: size_weights must cover sizes 1..4");
    }
    double multi = 0.0;
    for (size_t i = 0; i < size_weights.size(); ++i) {
      if (size_weights[i] < 0.0) throw std::invalid_argument("synthetic config: negative size weight");
      if (i >= 1) multi += size_weights[i];
    }
    if (multi <= 0.0) {
      throw std::invalid_argument("synthetic config: homophones require mass on class sizes >= 2");
    }
    if (noise_sigma <= 0.0) throw std::invalid_argument("synthetic config: noise_sigma must be > 0");
    if (frames_min < 1 || frames_max < frames_min) {
      throw std::invalid_argument("synthetic config: invalid frames-per-character range");
    }
    if (len_min < 1 || len_max < len_min) {
      throw std::invalid_argument("synthetic config: invalid sentence length range");
    }
    if (skew < 0.0 || skew > 1.0) throw std::invalid_argument("synthetic config: skew outside [0, 1]");
    if (transition_temperature <= 0.0) {
      throw std::invalid_argument("synthetic config: temperature must be > 0");
    }
    if (train_sentences < 1 || heldout_sentences < 0) {
      throw std::invalid_argument("synthetic config: invalid split sizes");
    }
  }
};

struct Utterance {
  Tensor frames;            // T x frame_dim
  std::vector<int> labels;  // U character indices, T >= U
};

struct SyntheticData {
  SyntheticLanguageConfig config;
  Vocabulary vocab;
  Lexicon lexicon;
  std::vector<std::string> chars;        // generated pool, class-major order
  std::vector<int> char_class;           // class id per pool character
  std::vector<std::string> class_syllables;
  std::vector<Utterance> train;
  std::vector<Utterance> heldout;

  std::vector<std::string> train_lines() const {
    std::vector<std::string> lines;
    lines.reserve(train.size());
    for (const auto& u : train) lines.push_back(vocab.decode_line(u.labels));
    return lines;
  }
};

namespace detail {

inline std::vector<std::string> char_pool(size_t n) {
  std::vector<std::string> pool;
  for (char c = 'a'; c <= 'z' && pool.size() < n; ++c) pool.emplace_back(1, c);
  for (char c = 'A'; c <= 'Z' && pool.size() < n; ++c) pool.emplace_back(1, c);
  for (char c = '0'; c <= '9' && pool.size() < n; ++c) pool.emplace_back(1, c);
  for (uint32_t cp = 0x3B1; pool.size() < n; ++cp) pool.push_back(utf8::encode(cp));
  return pool;
}

// Valid pinyin strings for the pronunciation classes; neighbouring classes
// land on fuzzy-related syllables so the fuzzy strategy has material.
inline std::vector<std::string> class_syllable_pool(int n) {
  static const std::vector<std::string> initials = {"z", "zh", "c",  "ch", "s",
                                                    "sh", "b", "d",  "g",  "l"};
  static const std::vector<std::string> finals = {"in", "ing", "an", "ang", "en",
                                                  "eng", "a",  "o",  "e",   "u"};
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(n));
  int ni = static_cast<int>(initials.size());
  int nf = static_cast<int>(finals.size());
  for (int i = 0; i < n; ++i) {
    int tone = 1 + (i / (ni * nf)) % 4;
    out.push_back(initials[static_cast<size_t>(i % ni)] +
                  finals[static_cast<size_t>((i / ni) % nf)] + std::to_string(tone));
  }
  return out;
}

}  // namespace detail

inline SyntheticData generate_dataset(const SyntheticLanguageConfig& cfg) {
  cfg.validate();
  std::mt19937_64 g(cfg.seed);
  SyntheticData data;
  data.config = cfg;

  // class sizes, drawn 1..4
  std::vector<int> class_size(static_cast<size_t>(cfg.num_classes));
  bool any_multi = false;
  for (auto& s : class_size) {
    s = 1 + rng::sample_discrete(cfg.size_weights, g);
    any_multi = any_multi || s >= 2;
  }
  if (!any_multi) {
    throw std::runtime_error(
        "synthetic language drew no class of size >= 2; adjust size_weights or seed");
  }

  // characters and their pronunciation classes
  size_t total_chars = 0;
  for (int s : class_size) total_chars += static_cast<size_t>(s);
  data.chars = detail::char_pool(total_chars);
  data.class_syllables = detail::class_syllable_pool(cfg.num_classes);
  for (int c = 0; c < cfg.num_classes; ++c) {
    for (int j = 0; j < class_size[static_cast<size_t>(c)]; ++j) {
      data.char_class.push_back(c);
    }
  }
  data.vocab = Vocabulary::from_chars(data.chars);
  for (size_t i = 0; i < data.chars.size(); ++i) {
    Syllable syl = parse_syllable(data.class_syllables[static_cast<size_t>(data.char_class[i])]);
    data.lexicon.readings[data.chars[i]] = {syl};
  }

  // acoustic class embeddings
  std::vector<Tensor> class_embedding;
  class_embedding.reserve(static_cast<size_t>(cfg.num_classes));
  for (int c = 0; c < cfg.num_classes; ++c) {
    Tensor e(cfg.frame_dim, 1);
    for (double& v : e.data) v = rng::gaussian(g);
    class_embedding.push_back(std::move(e));
  }

  // class-level bigram over classes, tempered softmax of Gaussian logits
  auto tempered_row = [&](int n) {
    std::vector<double> logits(static_cast<size_t>(n));
    for (double& v : logits) v = rng::gaussian(g) / cfg.transition_temperature;
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : logits) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : logits) v /= sum;
    return logits;
  };
  std::vector<double> start_dist = tempered_row(cfg.num_classes);
  std::vector<std::vector<double>> transition(static_cast<size_t>(cfg.num_classes));
  for (auto& row : transition) row = tempered_row(cfg.num_classes);

  // within-class choice weights: member j gets (1 - skew)^j
  std::vector<std::vector<double>> member_weights(static_cast<size_t>(cfg.num_classes));
  std::vector<std::vector<int>> members(static_cast<size_t>(cfg.num_classes));
  for (size_t i = 0; i < data.chars.size(); ++i) {
    members[static_cast<size_t>(data.char_class[i])].push_back(
        data.vocab.encode(data.chars[i]));
  }
  for (int c = 0; c < cfg.num_classes; ++c) {
    double w = 1.0;
    for (size_t j = 0; j < members[static_cast<size_t>(c)].size(); ++j) {
      member_weights[static_cast<size_t>(c)].push_back(w);
      w *= 1.0 - cfg.skew;
    }
  }

  auto sample_utterance = [&]() {
    Utterance u;
    int len = rng::uniform_int(g, cfg.len_min, cfg.len_max);
    std::vector<int> classes(static_cast<size_t>(len));
    classes[0] = rng::sample_discrete(start_dist, g);
    for (int i = 1; i < len; ++i) {
      classes[static_cast<size_t>(i)] =
          rng::sample_discrete(transition[static_cast<size_t>(classes[static_cast<size_t>(i - 1)])], g);
    }
    std::vector<int> frame_counts(static_cast<size_t>(len));
    int total_frames = 0;
    for (int i = 0; i < len; ++i) {
      int c = classes[static_cast<size_t>(i)];
      int member = rng::sample_discrete(member_weights[static_cast<size_t>(c)], g);
      u.labels.push_back(members[static_cast<size_t>(c)][static_cast<size_t>(member)]);
      frame_counts[static_cast<size_t>(i)] = rng::uniform_int(g, cfg.frames_min, cfg.frames_max);
      total_frames += frame_counts[static_cast<size_t>(i)];
    }
    u.frames = Tensor(total_frames, cfg.frame_dim);
    int row = 0;
    for (int i = 0; i < len; ++i) {
      const Tensor& e = class_embedding[static_cast<size_t>(classes[static_cast<size_t>(i)])];
      for (int f = 0; f < frame_counts[static_cast<size_t>(i)]; ++f) {
        for (int d = 0; d < cfg.frame_dim; ++d) {
          u.frames(row, d) = e(d, 0) + cfg.noise_sigma * rng::gaussian(g);
        }
        ++row;
      }
    }
    return u;
  };

  data.train.reserve(static_cast<size_t>(cfg.train_sentences));
  for (int i = 0; i < cfg.train_sentences; ++i) data.train.push_back(sample_utterance());
  data.heldout.reserve(static_cast<size_t>(cfg.heldout_sentences));
  for (int i = 0; i < cfg.heldout_sentences; ++i) data.heldout.push_back(sample_utterance());
  return data;
}

// Dataset serialization: JSON lines, one utterance per line.
inline void write_utterances(const std::vector<Utterance>& utts, std::ostream& os) {
  for (const auto& u : utts) {
    nlohmann::json j;
    nlohmann::json frames = nlohmann::json::array();
    for (int t = 0; t < u.frames.rows; ++t) {
      nlohmann::json row = nlohmann::json::array();
      for (int d = 0; d < u.frames.cols; ++d) row.push_back(u.frames(t, d));
      frames.push_back(std::move(row));
    }
    j["frames"] = std::move(frames);
    j["labels"] = u.labels;
    os << j.dump() << "\n";
  }
}

inline std::vector<Utterance> read_utterances(std::istream& is) {
  std::vector<Utterance> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("frames") || !j.contains("labels")) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": malformed utterance");
    }
    Utterance u;
    const auto& frames = j["frames"];
    int rows = static_cast<int>(frames.size());
    int cols = rows > 0 ? static_cast<int>(frames[0].size()) : 0;
    u.frames = Tensor(rows, cols);
    for (int t = 0; t < rows; ++t) {
      for (int d = 0; d < cols; ++d) u.frames(t, d) = frames[t][d].get<double>();
    }
    u.labels = j["labels"].get<std::vector<int>>();
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace homosmooth
