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

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace homosmooth {

// Levenshtein alignment counts against a reference. S + D + I equals the
// minimal unit-cost edit distance.
struct EditStats {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t ref_len = 0;

  int64_t distance() const { return substitutions + deletions + insertions; }

  double cer() const {
    if (ref_len == 0) throw std::invalid_argument("CER undefined for empty reference");
    return static_cast<double>(distance()) / static_cast<double>(ref_len);
  }
};

// Dynamic-programming edit distance with unit costs. Ties are broken
// substitution > deletion > insertion so alignments are reproducible.
template <typename T>
EditStats edit_distance(const std::vector<T>& ref, const std::vector<T>& hyp) {
  size_t n = ref.size(), m = hyp.size();
  struct Cell {
    int64_t cost;
    int64_t sub, del, ins;
  };
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = {static_cast<int64_t>(j), 0, 0, static_cast<int64_t>(j)};
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = {static_cast<int64_t>(i), 0, static_cast<int64_t>(i), 0};
    for (size_t j = 1; j <= m; ++j) {
      int64_t sub_cost = prev[j - 1].cost + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int64_t del_cost = prev[j].cost + 1;
      int64_t ins_cost = cur[j - 1].cost + 1;
      if (sub_cost <= del_cost && sub_cost <= ins_cost) {
        cur[j] = prev[j - 1];
        cur[j].cost = sub_cost;
        if (!(ref[i - 1] == hyp[j - 1])) ++cur[j].sub;
      } else if (del_cost <= ins_cost) {
        cur[j] = prev[j];
        cur[j].cost = del_cost;
        ++cur[j].del;
      } else {
        cur[j] = cur[j - 1];
        cur[j].cost = ins_cost;
        ++cur[j].ins;
      }
    }
    std::swap(prev, cur);
  }
  EditStats stats;
  stats.substitutions = prev[m].sub;
  stats.deletions = prev[m].del;
  stats.insertions = prev[m].ins;
  stats.ref_len = static_cast<int64_t>(n);
  return stats;
}

// Pooled corpus CER as a percentage: total edits over total reference
// characters, not an average of per-utterance rates.
template <typename T>
double corpus_cer(const std::vector<std::vector<T>>& refs,
                  const std::vector<std::vector<T>>& hyps) {
  if (refs.size() != hyps.size()) {
    throw std::invalid_argument("corpus_cer: reference/hypothesis count mismatch");
  }
  int64_t edits = 0, ref_chars = 0;
  for (size_t i = 0; i < refs.size(); ++i) {
    EditStats s = edit_distance(refs[i], hyps[i]);
    edits += s.distance();
    ref_chars += s.ref_len;
  }
  if (ref_chars == 0) throw std::invalid_argument("corpus_cer: empty reference corpus");
  return 100.0 * static_cast<double>(edits) / static_cast<double>(ref_chars);
}

}  // namespace homosmooth
