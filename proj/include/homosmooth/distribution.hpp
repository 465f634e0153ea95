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
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace homosmooth {

// Sparse probability vector over K characters: explicit entries plus a
// uniform default tail shared by every index not listed. Smoothing priors
// have a handful of entries even at K in the thousands, so all consumers
// stay O(#entries).
class SmoothingDistribution {
 public:
  SmoothingDistribution() = default;

  SmoothingDistribution(int k, std::vector<std::pair<int, double>> entries, double tail)
      : k_(k), tail_(tail), entries_(std::move(entries)) {
    if (k <= 0) throw std::invalid_argument("distribution needs K >= 1");
    std::sort(entries_.begin(), entries_.end());
    for (size_t i = 0; i < entries_.size(); ++i) {
      auto [idx, p] = entries_[i];
      if (idx < 0 || idx >= k) throw std::invalid_argument("entry index out of range");
      if (i > 0 && entries_[i - 1].first == idx) {
        throw std::invalid_argument("duplicate entry index " + std::to_string(idx));
      }
      if (p < 0.0 || tail < 0.0) throw std::invalid_argument("negative probability");
    }
  }

  static SmoothingDistribution uniform(int k) {
    if (k <= 0) throw std::invalid_argument("uniform distribution needs K >= 1");
    return SmoothingDistribution(k, {}, 1.0 / static_cast<double>(k));
  }

  static SmoothingDistribution one_hot(int k, int index) {
    return SmoothingDistribution(k, {{index, 1.0}}, 0.0);
  }

  static SmoothingDistribution from_dense(const std::vector<double>& probs) {
    std::vector<std::pair<int, double>> entries;
    entries.reserve(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
      entries.emplace_back(static_cast<int>(i), probs[i]);
    }
    return SmoothingDistribution(static_cast<int>(probs.size()), std::move(entries), 0.0);
  }

  int k() const { return k_; }
  double tail() const { return tail_; }
  const std::vector<std::pair<int, double>>& entries() const { return entries_; }
  int entry_count() const { return static_cast<int>(entries_.size()); }
  int tail_count() const { return k_ - entry_count(); }

  double prob(int index) const {
    if (index < 0 || index >= k_) {
      throw std::out_of_range("distribution index out of range: " + std::to_string(index));
    }
    auto it = std::lower_bound(entries_.begin(), entries_.end(),
                               std::make_pair(index, -1.0));
    if (it != entries_.end() && it->first == index) return it->second;
    return tail_;
  }

  double sum() const {
    double s = tail_ * static_cast<double>(tail_count());
    for (const auto& [i, p] : entries_) s += p;
    return s;
  }

  std::vector<double> dense() const {
    std::vector<double> out(static_cast<size_t>(k_), tail_);
    for (const auto& [i, p] : entries_) out[static_cast<size_t>(i)] = p;
    return out;
  }

  // -sum p log p with 0 log 0 = 0; tail handled in closed form.
  double entropy() const {
    double h = 0.0;
    for (const auto& [i, p] : entries_) {
      if (p > 0.0) h -= p * std::log(p);
    }
    if (tail_ > 0.0 && tail_count() > 0) {
      h -= static_cast<double>(tail_count()) * tail_ * std::log(tail_);
    }
    return h;
  }

  void check_valid(double tol = 1e-12) const {
    double s = sum();
    if (std::abs(s - 1.0) > tol) {
      throw std::logic_error("distribution sums to " + std::to_string(s));
    }
  }

  bool operator==(const SmoothingDistribution& o) const {
    return k_ == o.k_ && tail_ == o.tail_ && entries_ == o.entries_;
  }

 private:
  int k_ = 0;
  double tail_ = 0.0;
  std::vector<std::pair<int, double>> entries_;  // sorted by index, unique
};

}  // namespace homosmooth
