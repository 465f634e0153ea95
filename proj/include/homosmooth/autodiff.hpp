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

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "homosmooth/distribution.hpp"
#include "homosmooth/ls_loss.hpp"
#include "homosmooth/tensor.hpp"

namespace homosmooth {
namespace ad {

class Tape;

// Handle to a node on the tape. Cheap to copy; valid until Tape::clear().
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
};

// Reverse-mode tape over a fixed op set: matmul, add, broadcast-add, tanh,
// softmax, transpose, concatenation, embedding lookup and the smoothing
// loss head. Nodes are created in topological order, so one reverse sweep
// propagates all adjoints.
class Tape {
 public:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&)> back;  // empty for leaves
  };

  Var input(Tensor value) {
    nodes_.push_back({std::move(value), {}, {}});
    Node& n = nodes_.back();
    n.grad = Tensor(n.value.rows, n.value.cols);
    return Var{this, static_cast<int>(nodes_.size()) - 1};
  }

  const Tensor& value(Var v) const { return nodes_[static_cast<size_t>(v.id)].value; }
  Tensor& grad(Var v) { return nodes_[static_cast<size_t>(v.id)].grad; }

  // Seeds the (scalar) root with 1 and sweeps the tape backwards.
  void backward(Var root) {
    Node& r = nodes_[static_cast<size_t>(root.id)];
    if (r.value.size() != 1) throw std::invalid_argument("backward: root must be scalar");
    r.grad.data[0] = 1.0;
    for (int i = root.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<size_t>(i)];
      if (n.back) n.back(*this);
    }
  }

  void clear() { nodes_.clear(); }
  size_t size() const { return nodes_.size(); }

  Var emplace(Tensor value, std::function<void(Tape&)> back) {
    nodes_.push_back({std::move(value), {}, std::move(back)});
    Node& n = nodes_.back();
    n.grad = Tensor(n.value.rows, n.value.cols);
    return Var{this, static_cast<int>(nodes_.size()) - 1};
  }

 private:
  std::vector<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape->value(*this); }

namespace detail {
inline void accumulate(Tensor& into, const Tensor& g) {
  for (size_t i = 0; i < into.data.size(); ++i) into.data[i] += g.data[i];
}
}  // namespace detail

inline Var matmul(Var a, Var b) {
  Tape& t = *a.tape;
  Tensor value = homosmooth::matmul(t.value(a), t.value(b));
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [a, b, out_id](Tape& tp) {
    const Tensor& g = tp.grad(Var{&tp, out_id});
    detail::accumulate(tp.grad(a), homosmooth::matmul(g, transpose(tp.value(b))));
    detail::accumulate(tp.grad(b), homosmooth::matmul(transpose(tp.value(a)), g));
  });
}

inline Var add(Var a, Var b) {
  Tape& t = *a.tape;
  Tensor value = homosmooth::add(t.value(a), t.value(b));
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [a, b, out_id](Tape& tp) {
    const Tensor& g = tp.grad(Var{&tp, out_id});
    detail::accumulate(tp.grad(a), g);
    detail::accumulate(tp.grad(b), g);
  });
}

inline Var add_col_broadcast(Var m, Var colv) {
  Tape& t = *m.tape;
  Tensor value = homosmooth::add_col_broadcast(t.value(m), t.value(colv));
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [m, colv, out_id](Tape& tp) {
    const Tensor& g = tp.grad(Var{&tp, out_id});
    detail::accumulate(tp.grad(m), g);
    Tensor& gc = tp.grad(colv);
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j < g.cols; ++j) gc(i, 0) += g(i, j);
    }
  });
}

inline Var tanh(Var a) {
  Tape& t = *a.tape;
  Tensor value = tanh_map(t.value(a));
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [a, out_id](Tape& tp) {
    Var out{&tp, out_id};
    const Tensor& g = tp.grad(out);
    const Tensor& y = tp.value(out);
    Tensor& ga = tp.grad(a);
    for (size_t i = 0; i < g.data.size(); ++i) {
      ga.data[i] += (1.0 - y.data[i] * y.data[i]) * g.data[i];
    }
  });
}

inline Var softmax(Var a) {
  Tape& t = *a.tape;
  Tensor value = softmax_col(t.value(a));
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [a, out_id](Tape& tp) {
    Var out{&tp, out_id};
    const Tensor& g = tp.grad(out);
    const Tensor& s = tp.value(out);
    double dot = 0.0;
    for (size_t i = 0; i < g.data.size(); ++i) dot += g.data[i] * s.data[i];
    Tensor& ga = tp.grad(a);
    for (size_t i = 0; i < g.data.size(); ++i) {
      ga.data[i] += s.data[i] * (g.data[i] - dot);
    }
  });
}

inline Var transpose(Var a) {
  Tape& t = *a.tape;
  Tensor value = homosmooth::transpose(t.value(a));
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [a, out_id](Tape& tp) {
    detail::accumulate(tp.grad(a), homosmooth::transpose(tp.grad(Var{&tp, out_id})));
  });
}

inline Var vcat(Var a, Var b) {
  Tape& t = *a.tape;
  Tensor value = homosmooth::vcat(t.value(a), t.value(b));
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [a, b, out_id](Tape& tp) {
    const Tensor& g = tp.grad(Var{&tp, out_id});
    Tensor& ga = tp.grad(a);
    Tensor& gb = tp.grad(b);
    for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += g.data[i];
    for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += g.data[ga.data.size() + i];
  });
}

inline Var hcat(const std::vector<Var>& columns) {
  if (columns.empty()) throw std::invalid_argument("hcat: no inputs");
  Tape& t = *columns[0].tape;
  std::vector<Tensor> vals;
  vals.reserve(columns.size());
  for (Var v : columns) vals.push_back(t.value(v));
  Tensor value = homosmooth::hcat(vals);
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [columns, out_id](Tape& tp) {
    const Tensor& g = tp.grad(Var{&tp, out_id});
    int at = 0;
    for (Var v : columns) {
      Tensor& gv = tp.grad(v);
      for (int i = 0; i < gv.rows; ++i) {
        for (int j = 0; j < gv.cols; ++j) gv(i, j) += g(i, at + j);
      }
      at += gv.cols;
    }
  });
}

inline Var scale(Var a, double c) {
  Tape& t = *a.tape;
  Tensor value = homosmooth::scale(t.value(a), c);
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [a, c, out_id](Tape& tp) {
    const Tensor& g = tp.grad(Var{&tp, out_id});
    Tensor& ga = tp.grad(a);
    for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += c * g.data[i];
  });
}

// Row `r` of an embedding matrix as a column vector; the adjoint scatters
// back into that row only.
inline Var embed(Var matrix, int r) {
  Tape& t = *matrix.tape;
  Tensor value = row_as_col(t.value(matrix), r);
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [matrix, r, out_id](Tape& tp) {
    const Tensor& g = tp.grad(Var{&tp, out_id});
    Tensor& gm = tp.grad(matrix);
    for (int j = 0; j < gm.cols; ++j) gm(r, j) += g(j, 0);
  });
}

// Smoothing-loss head on a K x 1 logits column. Forward value is the
// scalar loss; backward applies the closed-form softmax(logits) - p'.
inline Var ls_loss_head(Var logits, int k0, std::shared_ptr<const SmoothingDistribution> prior,
                        double beta) {
  Tape& t = *logits.tape;
  const Tensor& lv = t.value(logits);
  check_shape(lv.cols == 1, "ls_loss_head");
  double loss = homosmooth::ls_loss(lv.data, k0, *prior, beta);
  Tensor value(1, 1);
  value.data[0] = loss;
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [logits, k0, prior, beta, out_id](Tape& tp) {
    double g = tp.grad(Var{&tp, out_id}).data[0];
    std::vector<double> d = ls_loss_grad(tp.value(logits).data, k0, *prior, beta);
    Tensor& gl = tp.grad(logits);
    for (size_t i = 0; i < d.size(); ++i) gl.data[i] += g * d[i];
  });
}

inline Var sum(const std::vector<Var>& scalars) {
  if (scalars.empty()) throw std::invalid_argument("sum: no inputs");
  Tape& t = *scalars[0].tape;
  double total = 0.0;
  for (Var v : scalars) {
    check_shape(t.value(v).size() == 1, "sum");
    total += t.value(v).data[0];
  }
  Tensor value(1, 1);
  value.data[0] = total;
  int out_id = static_cast<int>(t.size());
  return t.emplace(std::move(value), [scalars, out_id](Tape& tp) {
    double g = tp.grad(Var{&tp, out_id}).data[0];
    for (Var v : scalars) tp.grad(v).data[0] += g;
  });
}

}  // namespace ad
}  // namespace homosmooth
