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
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "homosmooth/distribution.hpp"
#include "homosmooth/utf8.hpp"
#include "homosmooth/vocabulary.hpp"

namespace homosmooth {

// Character frequency distribution over the vocabulary. Out-of-vocabulary
// corpus characters count toward UNK; SOS/EOS are never observed.
struct UnigramDistribution {
  std::vector<int64_t> counts;
  std::vector<double> probs;
  int64_t total = 0;

  int k() const { return static_cast<int>(probs.size()); }
};

inline UnigramDistribution count_unigrams(const std::vector<std::string>& corpus_lines,
                                          const Vocabulary& vocabulary) {
  UnigramDistribution u;
  u.counts.assign(static_cast<size_t>(vocabulary.size()), 0);
  for (const auto& line : corpus_lines) {
    for (int idx : vocabulary.encode_line(line)) {
      u.counts[static_cast<size_t>(idx)] += 1;
      u.total += 1;
    }
  }
  if (u.total == 0) throw std::runtime_error("unigram counts: corpus contains no characters");
  u.probs.resize(u.counts.size());
  for (size_t i = 0; i < u.counts.size(); ++i) {
    u.probs[i] = static_cast<double>(u.counts[i]) / static_cast<double>(u.total);
  }
  return u;
}

enum class SmoothingKind { add_k, interpolated };

struct BigramSmoothing {
  SmoothingKind kind = SmoothingKind::add_k;
  double add_k = 0.01;
  double lambda = 0.9;  // weight on the ML estimate under interpolation

  void validate() const {
    if (kind == SmoothingKind::add_k && add_k < 0.0) {
      throw std::invalid_argument("add-k smoothing requires k >= 0");
    }
    if (kind == SmoothingKind::interpolated && (lambda < 0.0 || lambda > 1.0)) {
      throw std::invalid_argument("interpolation weight must lie in [0, 1]");
    }
  }
};

// Add-k estimate with an explicit successor-space size.
inline double add_k_prob(int64_t pair_count, int64_t context_count, double k,
                         int successor_space) {
  double denom = static_cast<double>(context_count) + k * static_cast<double>(successor_space);
  if (denom <= 0.0) return 1.0 / static_cast<double>(successor_space);
  return (static_cast<double>(pair_count) + k) / denom;
}

// Conditional character distributions p(next | prev) over the full K-sized
// index space, SOS allowed as context. Two backings share the interface:
// count tables from in-repo training, and imported ARPA backoff models.
class BigramLM {
 public:
  BigramLM() = default;

  int k() const { return k_; }

  // Full distribution over K for the given context. Sums to 1 within 1e-9.
  SmoothingDistribution predict(int prev) const {
    if (prev < 0 || prev >= k_) {
      throw std::out_of_range("bigram context index out of range: " + std::to_string(prev));
    }
    if (arpa_mode_) return predict_arpa(prev);
    if (smoothing_.kind == SmoothingKind::add_k) return predict_add_k(prev);
    return predict_interpolated(prev);
  }

  const std::map<int, int64_t>& row_counts(int prev) const { return rows_.at(static_cast<size_t>(prev)); }
  int64_t context_count(int prev) const { return row_totals_.at(static_cast<size_t>(prev)); }
  const BigramSmoothing& smoothing() const { return smoothing_; }
  bool from_arpa() const { return arpa_mode_; }

  friend BigramLM train_bigram(const std::vector<std::string>&, const Vocabulary&,
                               const BigramSmoothing&);
  friend BigramLM import_arpa(std::istream&, const Vocabulary&);
  friend void export_arpa(const BigramLM&, const Vocabulary&, std::ostream&);

 private:
  SmoothingDistribution predict_add_k(int prev) const {
    const auto& row = rows_[static_cast<size_t>(prev)];
    int64_t total = row_totals_[static_cast<size_t>(prev)];
    double kk = smoothing_.add_k;
    if (total == 0 && kk == 0.0) return SmoothingDistribution::uniform(k_);
    double denom = static_cast<double>(total) + kk * static_cast<double>(k_);
    std::vector<std::pair<int, double>> entries;
    entries.reserve(row.size());
    for (const auto& [next, c] : row) {
      entries.emplace_back(next, (static_cast<double>(c) + kk) / denom);
    }
    return SmoothingDistribution(k_, std::move(entries), kk / denom);
  }

  SmoothingDistribution predict_interpolated(int prev) const {
    const auto& row = rows_[static_cast<size_t>(prev)];
    int64_t total = row_totals_[static_cast<size_t>(prev)];
    double lam = total > 0 ? smoothing_.lambda : 0.0;
    std::vector<double> dense(static_cast<size_t>(k_));
    for (int j = 0; j < k_; ++j) {
      dense[static_cast<size_t>(j)] = (1.0 - lam) * unigram_probs_[static_cast<size_t>(j)];
    }
    if (total > 0) {
      for (const auto& [next, c] : row) {
        dense[static_cast<size_t>(next)] +=
            lam * static_cast<double>(c) / static_cast<double>(total);
      }
    }
    return SmoothingDistribution::from_dense(dense);
  }

  // p(j|i) = 10^lp(i,j) if the bigram is listed, else 10^bo(i) * p_uni(j),
  // renormalized over the repo vocabulary.
  SmoothingDistribution predict_arpa(int prev) const {
    const auto& row = arpa_rows_[static_cast<size_t>(prev)];
    double bo = arpa_backoff_[static_cast<size_t>(prev)];
    std::vector<double> dense(static_cast<size_t>(k_));
    double sum = 0.0;
    for (int j = 0; j < k_; ++j) {
      auto it = row.find(j);
      double p = it != row.end() ? it->second : bo * unigram_probs_[static_cast<size_t>(j)];
      dense[static_cast<size_t>(j)] = p;
      sum += p;
    }
    if (sum <= 0.0) return SmoothingDistribution::uniform(k_);
    for (auto& p : dense) p /= sum;
    return SmoothingDistribution::from_dense(dense);
  }

  int k_ = 0;
  BigramSmoothing smoothing_;
  std::vector<std::map<int, int64_t>> rows_;  // prev -> next -> count
  std::vector<int64_t> row_totals_;
  std::vector<double> unigram_probs_;  // interpolation / backoff base

  bool arpa_mode_ = false;
  std::vector<std::map<int, double>> arpa_rows_;  // prev -> next -> probability
  std::vector<double> arpa_backoff_;
};

// Counts sentence transitions with SOS/EOS boundaries, one sentence per
// corpus line.
inline BigramLM train_bigram(const std::vector<std::string>& corpus_lines,
                             const Vocabulary& vocabulary,
                             const BigramSmoothing& smoothing) {
  smoothing.validate();
  BigramLM lm;
  lm.k_ = vocabulary.size();
  lm.smoothing_ = smoothing;
  lm.rows_.assign(static_cast<size_t>(lm.k_), {});
  lm.row_totals_.assign(static_cast<size_t>(lm.k_), 0);
  for (const auto& line : corpus_lines) {
    std::vector<int> seq = vocabulary.encode_line(line);
    if (seq.empty()) continue;
    int prev = vocabulary.sos();
    for (size_t i = 0; i <= seq.size(); ++i) {
      int next = i < seq.size() ? seq[i] : vocabulary.eos();
      lm.rows_[static_cast<size_t>(prev)][next] += 1;
      lm.row_totals_[static_cast<size_t>(prev)] += 1;
      prev = next;
    }
  }
  UnigramDistribution uni = count_unigrams(corpus_lines, vocabulary);
  lm.unigram_probs_ = uni.probs;
  return lm;
}

namespace detail {

inline int arpa_token_index(const std::string& token, const Vocabulary& vocab) {
  if (token == "<s>") return vocab.sos();
  if (token == "</s>") return vocab.eos();
  if (token == "<unk>" || token == "<UNK>") return vocab.unk();
  if (token == "<space>") return vocab.space();
  if (utf8::length(token) == 1 && vocab.contains(token)) return vocab.encode(token);
  return vocab.unk();  // unseen tokens merge into UNK
}

inline std::string arpa_token(int index, const Vocabulary& vocab) {
  if (index == vocab.sos()) return "<s>";
  if (index == vocab.eos()) return "</s>";
  if (index == vocab.unk()) return "<unk>";
  if (index == vocab.space()) return "<space>";
  return vocab.decode(index);
}

inline double arpa_number(const std::string& field, int line_no) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != field.size()) {
    throw std::runtime_error("arpa line " + std::to_string(line_no) +
                             ": non-numeric field '" + field + "'");
  }
  return v;
}

}  // namespace detail

// Reads the \1-grams: and optional \2-grams: sections of an ARPA file.
// Tokens outside the vocabulary are merged into UNK; unigram mass is
// renormalized over the repo vocabulary.
inline BigramLM import_arpa(std::istream& is, const Vocabulary& vocabulary) {
  BigramLM lm;
  lm.k_ = vocabulary.size();
  lm.arpa_mode_ = true;
  lm.unigram_probs_.assign(static_cast<size_t>(lm.k_), 0.0);
  lm.arpa_backoff_.assign(static_cast<size_t>(lm.k_), 1.0);
  lm.arpa_rows_.assign(static_cast<size_t>(lm.k_), {});

  enum class Section { preamble, data, unigrams, bigrams, done };
  Section section = Section::preamble;
  bool saw_data = false, saw_unigrams = false;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "\\data\\") {
      section = Section::data;
      saw_data = true;
      continue;
    }
    if (line == "\\1-grams:") {
      section = Section::unigrams;
      saw_unigrams = true;
      continue;
    }
    if (line == "\\2-grams:") {
      section = Section::bigrams;
      continue;
    }
    if (line == "\\end\\") {
      section = Section::done;
      continue;
    }
    std::stringstream ss(line);
    if (section == Section::data) {
      continue;  // "ngram N=count" entries are informational
    }
    if (section == Section::unigrams) {
      std::string lp, token, bo;
      ss >> lp >> token;
      if (token.empty()) {
        throw std::runtime_error("arpa line " + std::to_string(line_no) +
                                 ": malformed 1-gram entry");
      }
      int idx = detail::arpa_token_index(token, vocabulary);
      lm.unigram_probs_[static_cast<size_t>(idx)] +=
          std::pow(10.0, detail::arpa_number(lp, line_no));
      if (ss >> bo) {
        lm.arpa_backoff_[static_cast<size_t>(idx)] =
            std::pow(10.0, detail::arpa_number(bo, line_no));
      }
    } else if (section == Section::bigrams) {
      std::string lp, t1, t2;
      ss >> lp >> t1 >> t2;
      if (t2.empty()) {
        throw std::runtime_error("arpa line " + std::to_string(line_no) +
                                 ": malformed 2-gram entry");
      }
      int i = detail::arpa_token_index(t1, vocabulary);
      int j = detail::arpa_token_index(t2, vocabulary);
      lm.arpa_rows_[static_cast<size_t>(i)][j] +=
          std::pow(10.0, detail::arpa_number(lp, line_no));
    } else if (section == Section::preamble) {
      continue;
    }
  }
  if (!saw_data || !saw_unigrams) {
    throw std::runtime_error("arpa file: missing \\data\\ or \\1-grams: section");
  }
  double uni_sum = 0.0;
  for (double p : lm.unigram_probs_) uni_sum += p;
  if (uni_sum <= 0.0) throw std::runtime_error("arpa file: no unigram probability mass");
  for (double& p : lm.unigram_probs_) p /= uni_sum;
  return lm;
}

inline BigramLM import_arpa_file(const std::string& path, const Vocabulary& vocabulary) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open arpa file: " + path);
  return import_arpa(is, vocabulary);
}

// Writes a count-backed LM as ARPA text. Every context row is emitted in
// full, so the round trip through import_arpa reproduces the conditionals
// without touching the backoff path. Desk-scale vocabularies only.
inline void export_arpa(const BigramLM& lm, const Vocabulary& vocabulary, std::ostream& os) {
  if (lm.arpa_mode_) throw std::invalid_argument("export_arpa expects a count-backed model");
  int k = lm.k_;
  os << "\\data\\\n";
  os << "ngram 1=" << k << "\n";
  os << "ngram 2=" << static_cast<int64_t>(k) * static_cast<int64_t>(k) << "\n\n";

  // 1-gram block: successor marginal with the model's own smoothing.
  std::vector<int64_t> next_counts(static_cast<size_t>(k), 0);
  int64_t total = 0;
  for (int i = 0; i < k; ++i) {
    for (const auto& [j, c] : lm.rows_[static_cast<size_t>(i)]) {
      next_counts[static_cast<size_t>(j)] += c;
      total += c;
    }
  }
  os << std::setprecision(12);
  os << "\\1-grams:\n";
  for (int j = 0; j < k; ++j) {
    double p = add_k_prob(next_counts[static_cast<size_t>(j)], total, 0.5, k);
    if (j == vocabulary.sos()) p = 1e-99;  // SOS is context-only
    os << std::log10(p) << '\t' << detail::arpa_token(j, vocabulary) << "\t0\n";
  }
  os << "\n\\2-grams:\n";
  for (int i = 0; i < k; ++i) {
    SmoothingDistribution row = lm.predict(i);
    std::string prev_tok = detail::arpa_token(i, vocabulary);
    for (int j = 0; j < k; ++j) {
      double p = row.prob(j);
      if (p <= 0.0) continue;
      os << std::log10(p) << '\t' << prev_tok << ' '
         << detail::arpa_token(j, vocabulary) << '\n';
    }
  }
  os << "\n\\end\\\n";
}

inline SmoothingDistribution bigram_predict(const BigramLM& lm, int prev) {
  return lm.predict(prev);
}

}  // namespace homosmooth
