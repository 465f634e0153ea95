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
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace homosmooth {

// Dense row-major matrix of doubles. Column vectors are n x 1.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}
  Tensor(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != static_cast<size_t>(r) * c) {
      throw std::invalid_argument("tensor data size does not match shape");
    }
  }

  static Tensor column(std::vector<double> d) {
    int n = static_cast<int>(d.size());
    return Tensor(n, 1, std::move(d));
  }

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

inline void check_shape(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("shape mismatch in ") + what);
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  check_shape(a.cols == b.rows, "matmul");
  Tensor out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = &b.data[static_cast<size_t>(k) * b.cols];
      double* orow = &out.data[static_cast<size_t>(i) * out.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

inline Tensor add(const Tensor& a, const Tensor& b) {
  check_shape(a.same_shape(b), "add");
  Tensor out = a;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

// M + column vector broadcast across all columns of M.
inline Tensor add_col_broadcast(const Tensor& m, const Tensor& col) {
  check_shape(col.cols == 1 && col.rows == m.rows, "add_col_broadcast");
  Tensor out = m;
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) out(i, j) += col(i, 0);
  }
  return out;
}

inline Tensor tanh_map(const Tensor& a) {
  Tensor out = a;
  for (double& v : out.data) v = std::tanh(v);
  return out;
}

inline Tensor transpose(const Tensor& a) {
  Tensor out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  }
  return out;
}

// Stable softmax of a column vector.
inline Tensor softmax_col(const Tensor& v) {
  check_shape(v.cols == 1 && v.rows >= 1, "softmax_col");
  Tensor out = v;
  double mx = out.data[0];
  for (double x : out.data) mx = std::max(mx, x);
  double sum = 0.0;
  for (double& x : out.data) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : out.data) x /= sum;
  return out;
}

inline Tensor vcat(const Tensor& a, const Tensor& b) {
  check_shape(a.cols == b.cols, "vcat");
  Tensor out(a.rows + b.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

inline Tensor hcat(const std::vector<Tensor>& cols) {
  if (cols.empty()) throw std::invalid_argument("hcat: no inputs");
  int total = 0;
  for (const auto& t : cols) {
    check_shape(t.rows == cols[0].rows, "hcat");
    total += t.cols;
  }
  Tensor out(cols[0].rows, total);
  int at = 0;
  for (const auto& t : cols) {
    for (int i = 0; i < t.rows; ++i) {
      for (int j = 0; j < t.cols; ++j) out(i, at + j) = t(i, j);
    }
    at += t.cols;
  }
  return out;
}

inline Tensor scale(const Tensor& a, double c) {
  Tensor out = a;
  for (double& v : out.data) v *= c;
  return out;
}

// Row r of a matrix, returned as a column vector.
inline Tensor row_as_col(const Tensor& a, int r) {
  if (r < 0 || r >= a.rows) throw std::out_of_range("row_as_col: row out of range");
  Tensor out(a.cols, 1);
  for (int j = 0; j < a.cols; ++j) out(j, 0) = a(r, j);
  return out;
}

inline Tensor col(const Tensor& a, int c) {
  if (c < 0 || c >= a.cols) throw std::out_of_range("col: column out of range");
  Tensor out(a.rows, 1);
  for (int i = 0; i < a.rows; ++i) out(i, 0) = a(i, c);
  return out;
}

inline Tensor random_uniform(int rows, int cols, double lo, double hi, std::mt19937_64& rng) {
  Tensor out(rows, cols);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : out.data) v = dist(rng);
  return out;
}

}  // namespace homosmooth
