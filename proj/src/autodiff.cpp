/*
 * Copyright 2026 The yoruba-adr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "adr/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "adr/error.hpp"

namespace adr::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

ConstMatMap as_matrix(const Tensor& t) {
  return ConstMatMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                     static_cast<Eigen::Index>(t.cols()));
}

MatMap as_matrix(Tensor& t) {
  return MatMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " +
                       shape_str(a) + " and " + shape_str(b));
}

Tape& same_tape(const char* op, Var a, Var b) {
  if (!a.valid() || !b.valid() || &a.tape() != &b.tape()) {
    throw DimensionError(std::string(op) + ": operands live on different tapes");
  }
  return a.tape();
}

// Rank <= 2 broadcasting plan.
struct Broadcast {
  std::size_t rows, cols;
  std::size_t a_rows, a_cols, b_rows, b_cols;
  Shape out;

  std::size_t a_index(std::size_t i, std::size_t j) const {
    return (a_rows == 1 ? 0 : i) * a_cols + (a_cols == 1 ? 0 : j);
  }
  std::size_t b_index(std::size_t i, std::size_t j) const {
    return (b_rows == 1 ? 0 : i) * b_cols + (b_cols == 1 ? 0 : j);
  }
};

Broadcast plan_broadcast(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rank() > 2 || b.rank() > 2) shape_error(op, a.shape(), b.shape());
  Broadcast p{};
  p.a_rows = a.rows();
  p.a_cols = a.cols();
  p.b_rows = b.rows();
  p.b_cols = b.cols();
  auto join = [&](std::size_t x, std::size_t y) {
    if (x == y || y == 1) return x;
    if (x == 1) return y;
    shape_error(op, a.shape(), b.shape());
  };
  p.rows = join(p.a_rows, p.b_rows);
  p.cols = join(p.a_cols, p.b_cols);
  p.out = {p.rows, p.cols};
  return p;
}

// Splits a shape around `axis` into (outer, n, inner) extents.
struct AxisView {
  std::size_t outer = 1, n = 1, inner = 1;
};

AxisView axis_view(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + shape_str(shape));
  }
  AxisView v;
  for (std::size_t i = 0; i < axis; ++i) v.outer *= shape[i];
  v.n = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) v.inner *= shape[i];
  return v;
}

template <typename Fwd, typename Deriv>
Var unary(Var a, Fwd fwd, Deriv deriv) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = fwd(x[i]);
  const std::size_t ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, deriv](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& x = t.value(ia);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * deriv(x[i], y[i]);
  });
}

enum class Binary { kAdd, kSub, kMul };

Var binary(const char* op, Binary kind, Var a, Var b) {
  Tape& tape = same_tape(op, a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();

  auto apply = [kind](double u, double v) {
    switch (kind) {
      case Binary::kAdd: return u + v;
      case Binary::kSub: return u - v;
      case Binary::kMul: return u * v;
    }
    return 0.0;
  };

  if (x.shape() == y.shape()) {
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = apply(x[i], y[i]);
    return tape.record(std::move(out), {a, b}, [ia, ib, kind](Tape& t, std::size_t self) {
      const Tensor& g = t.grad(self);
      if (t.requires_grad(ia)) {
        Tensor& ga = t.grad_buffer(ia);
        if (kind == Binary::kMul) {
          const Tensor& v = t.value(ib);
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * v[i];
        } else {
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
      }
      if (t.requires_grad(ib)) {
        Tensor& gb = t.grad_buffer(ib);
        if (kind == Binary::kMul) {
          const Tensor& u = t.value(ia);
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * u[i];
        } else if (kind == Binary::kSub) {
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
        } else {
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
        }
      }
    });
  }

  const Broadcast p = plan_broadcast(op, x, y);
  Tensor out(p.out);
  for (std::size_t i = 0; i < p.rows; ++i) {
    for (std::size_t j = 0; j < p.cols; ++j) {
      out[i * p.cols + j] = apply(x[p.a_index(i, j)], y[p.b_index(i, j)]);
    }
  }
  return tape.record(std::move(out), {a, b}, [ia, ib, kind, p](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& u = t.value(ia);
    const Tensor& v = t.value(ib);
    const bool need_a = t.requires_grad(ia);
    const bool need_b = t.requires_grad(ib);
    Tensor* ga = need_a ? &t.grad_buffer(ia) : nullptr;
    Tensor* gb = need_b ? &t.grad_buffer(ib) : nullptr;
    for (std::size_t i = 0; i < p.rows; ++i) {
      for (std::size_t j = 0; j < p.cols; ++j) {
        const double gij = g[i * p.cols + j];
        const std::size_t ai = p.a_index(i, j);
        const std::size_t bi = p.b_index(i, j);
        if (ga) (*ga)[ai] += kind == Binary::kMul ? gij * v[bi] : gij;
        if (gb) {
          switch (kind) {
            case Binary::kAdd: (*gb)[bi] += gij; break;
            case Binary::kSub: (*gb)[bi] -= gij; break;
            case Binary::kMul: (*gb)[bi] += gij * u[ai]; break;
          }
        }
      }
    }
  });
}

}  // namespace

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }

Tape::Tape(bool record_gradients) : record_(record_gradients) {
  nodes_.reserve(256);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = record_;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) {
    return Var(this, it->second);
  }
  Node n;
  n.ref = &p.value;
  n.requires_grad = record_;
  n.param = record_ ? &p : nullptr;
  nodes_.push_back(std::move(n));
  param_nodes_[&p] = nodes_.size() - 1;
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
}

Var Tape::record(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  if (record_) {
    for (const Var& v : inputs) {
      if (nodes_[v.id()].requires_grad) {
        n.requires_grad = true;
        break;
      }
    }
  }
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::grad(std::size_t id) const {
  static const Tensor kEmpty;
  return nodes_[id].grad.empty() ? kEmpty : nodes_[id].grad;
}

Tensor& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(value(id).shape());
  return n.grad;
}

void Tape::backward(Var root) {
  if (&root.tape() != this) {
    throw DimensionError("backward: root belongs to another tape");
  }
  if (value(root.id()).size() != 1) {
    throw DimensionError("backward: root must be a scalar, got shape " +
                         shape_str(value(root.id()).shape()));
  }
  if (!nodes_[root.id()].requires_grad) return;
  grad_buffer(root.id()).fill(1.0);
  for (std::size_t id = root.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param) {
      Tensor& pg = n.param->grad;
      if (pg.shape() != n.ref->shape()) pg = Tensor(n.ref->shape());
      for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += n.grad[i];
    }
  }
}

Var matmul(Var a, Var b) {
  Tape& tape = same_tape("matmul", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.rank() > 2 || y.rank() > 2 || x.cols() != y.rows()) {
    shape_error("matmul", x.shape(), y.shape());
  }
  Tensor out({x.rows(), y.cols()});
  as_matrix(out).noalias() = as_matrix(x) * as_matrix(y);
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return tape.record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const auto g = as_matrix(t.grad(self));
    if (t.requires_grad(ia)) {
      as_matrix(t.grad_buffer(ia)).noalias() += g * as_matrix(t.value(ib)).transpose();
    }
    if (t.requires_grad(ib)) {
      as_matrix(t.grad_buffer(ib)).noalias() += as_matrix(t.value(ia)).transpose() * g;
    }
  });
}

Var add(Var a, Var b) { return binary("add", Binary::kAdd, a, b); }
Var sub(Var a, Var b) { return binary("sub", Binary::kSub, a, b); }
Var mul(Var a, Var b) { return binary("mul", Binary::kMul, a, b); }

Var scale(Var a, double s) {
  return unary(a, [s](double x) { return s * x; },
               [s](double, double) { return s; });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var relu(Var a) {
  return unary(a, [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Var concat(std::initializer_list<Var> parts, std::size_t axis) {
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  Tape& tape = parts[0].tape();
  const Shape& first = parts[0].shape();
  Shape out_shape = first;
  if (axis >= first.size()) {
    throw DimensionError("concat: axis " + std::to_string(axis) +
                         " out of range for shape " + shape_str(first));
  }
  out_shape[axis] = 0;
  for (const Var& p : parts) {
    if (&p.tape() != &tape) throw DimensionError("concat: operands on different tapes");
    const Shape& s = p.shape();
    if (s.size() != first.size()) shape_error("concat", first, s);
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (d != axis && s[d] != first[d]) shape_error("concat", first, s);
    }
    out_shape[axis] += s[axis];
  }
  const AxisView ov = axis_view(out_shape, axis);
  Tensor out(out_shape);
  std::vector<std::size_t> ids;
  std::vector<std::size_t> widths;
  ids.reserve(parts.size());
  widths.reserve(parts.size());
  for (const Var& p : parts) {
    ids.push_back(p.id());
    widths.push_back(p.shape()[axis]);
  }
  {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const Tensor& src = parts[k].value();
      const std::size_t block = widths[k] * ov.inner;
      for (std::size_t o = 0; o < ov.outer; ++o) {
        std::copy_n(src.data() + o * block, block,
                    out.data() + o * ov.n * ov.inner + offset);
      }
      offset += block;
    }
  }
  return tape.record(std::move(out), parts, [ids, widths, ov](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const std::size_t block = widths[k] * ov.inner;
      if (t.requires_grad(ids[k])) {
        Tensor& gk = t.grad_buffer(ids[k]);
        for (std::size_t o = 0; o < ov.outer; ++o) {
          const double* src = g.data() + o * ov.n * ov.inner + offset;
          double* dst = gk.data() + o * block;
          for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
        }
      }
      offset += block;
    }
  });
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end) {
  const Shape& s = a.shape();
  const AxisView v = axis_view(s, axis);
  if (begin > end || end > v.n) {
    throw DimensionError("slice [" + std::to_string(begin) + ", " +
                         std::to_string(end) + ") out of range for shape " +
                         shape_str(s));
  }
  Shape out_shape = s;
  out_shape[axis] = end - begin;
  Tensor out(out_shape);
  const std::size_t block = (end - begin) * v.inner;
  const Tensor& x = a.value();
  for (std::size_t o = 0; o < v.outer; ++o) {
    std::copy_n(x.data() + (o * v.n + begin) * v.inner, block,
                out.data() + o * block);
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, v, begin, block](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t o = 0; o < v.outer; ++o) {
      double* dst = ga.data() + (o * v.n + begin) * v.inner;
      const double* src = g.data() + o * block;
      for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
    }
  });
}

Var transpose(Var a) {
  const Tensor& x = a.value();
  if (x.rank() != 2) {
    throw DimensionError("transpose: expected rank 2, got " + shape_str(x.shape()));
  }
  Tensor out({x.cols(), x.rows()});
  as_matrix(out) = as_matrix(x).transpose();
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& t, std::size_t self) {
    as_matrix(t.grad_buffer(ia)) += as_matrix(t.grad(self)).transpose();
  });
}

Var softmax(Var a, std::size_t axis) {
  const Tensor& x = a.value();
  const AxisView v = axis_view(x.shape(), axis);
  Tensor y(x.shape());
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t in = 0; in < v.inner; ++in) {
      const std::size_t base = o * v.n * v.inner + in;
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < v.n; ++k) m = std::max(m, x[base + k * v.inner]);
      double z = 0.0;
      for (std::size_t k = 0; k < v.n; ++k) {
        const double e = std::exp(x[base + k * v.inner] - m);
        y[base + k * v.inner] = e;
        z += e;
      }
      for (std::size_t k = 0; k < v.n; ++k) y[base + k * v.inner] /= z;
    }
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, v](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t o = 0; o < v.outer; ++o) {
      for (std::size_t in = 0; in < v.inner; ++in) {
        const std::size_t base = o * v.n * v.inner + in;
        double dot = 0.0;
        for (std::size_t k = 0; k < v.n; ++k) {
          dot += g[base + k * v.inner] * y[base + k * v.inner];
        }
        for (std::size_t k = 0; k < v.n; ++k) {
          const std::size_t i = base + k * v.inner;
          ga[i] += y[i] * (g[i] - dot);
        }
      }
    }
  });
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor y(logits.shape());
  const std::size_t r = logits.rows();
  const std::size_t c = logits.cols();
  for (std::size_t i = 0; i < r; ++i) {
    const double* x = logits.data() + i * c;
    double* out = y.data() + i * c;
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c; ++k) m = std::max(m, x[k]);
    double z = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      out[k] = std::exp(x[k] - m);
      z += out[k];
    }
    for (std::size_t k = 0; k < c; ++k) out[k] /= z;
  }
  return y;
}

Var embedding_lookup(Var table, std::span<const std::size_t> indices) {
  const Tensor& w = table.value();
  if (w.rank() != 2) {
    throw DimensionError("embedding_lookup: table must be rank 2, got " +
                         shape_str(w.shape()));
  }
  const std::size_t vocab = w.rows();
  const std::size_t dim = w.cols();
  Tensor out({indices.size(), dim});
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= vocab) {
      throw IndexError("embedding index " + std::to_string(indices[r]) +
                       " outside vocabulary of size " + std::to_string(vocab));
    }
    std::copy_n(w.data() + indices[r] * dim, dim, out.data() + r * dim);
  }
  const std::size_t it = table.id();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return table.tape().record(std::move(out), {table},
                             [it, idx = std::move(idx), dim](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& gw = t.grad_buffer(it);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      double* dst = gw.data() + idx[r] * dim;
      const double* src = g.data() + r * dim;
      for (std::size_t k = 0; k < dim; ++k) dst[k] += src[k];
    }
  });
}

Var sum(Var a) {
  const Tensor& x = a.value();
  double s = 0.0;
  for (double v : x.values()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(Tensor::scalar(s), {a}, [ia](Tape& t, std::size_t self) {
    const double g = t.grad(self).item();
    Tensor& ga = t.grad_buffer(ia);
    for (double& v : ga.values()) v += g;
  });
}

Var mean(Var a) {
  const Tensor& x = a.value();
  if (x.empty()) throw DimensionError("mean of an empty tensor");
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x.values()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(Tensor::scalar(s / n), {a}, [ia, n](Tape& t, std::size_t self) {
    const double g = t.grad(self).item() / n;
    Tensor& ga = t.grad_buffer(ia);
    for (double& v : ga.values()) v += g;
  });
}

Var sum(Var a, std::size_t axis) {
  const Tensor& x = a.value();
  if (x.rank() != 2 || axis > 1) {
    throw DimensionError("sum(axis): expected rank 2 and axis 0 or 1, got " +
                         shape_str(x.shape()));
  }
  const std::size_t r = x.rows();
  const std::size_t c = x.cols();
  Tensor out(axis == 0 ? Shape{1, c} : Shape{r, 1});
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[axis == 0 ? j : i] += x[i * c + j];
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, axis, r, c](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += g[axis == 0 ? j : i];
    }
  });
}

Var layer_norm(Var a, double eps) {
  const Tensor& x = a.value();
  const std::size_t r = x.rows();
  const std::size_t c = x.cols();
  Tensor y(x.shape());
  std::vector<double> inv_std(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = x.data() + i * c;
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += row[j];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) y[i * c + j] = (row[j] - mu) * inv_std[i];
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(y), {a},
                         [ia, r, c, inv_std = std::move(inv_std)](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad_buffer(ia);
    const double n = static_cast<double>(c);
    for (std::size_t i = 0; i < r; ++i) {
      double g_mean = 0.0;
      double gy_mean = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        g_mean += g[i * c + j];
        gy_mean += g[i * c + j] * y[i * c + j];
      }
      g_mean /= n;
      gy_mean /= n;
      for (std::size_t j = 0; j < c; ++j) {
        ga[i * c + j] +=
            inv_std[i] * (g[i * c + j] - g_mean - y[i * c + j] * gy_mean);
      }
    }
  });
}

Var nll_loss(Var logits, std::span<const std::size_t> targets,
             double num_sequences) {
  const Tensor& x = logits.value();
  if (x.rank() > 2 || x.rows() != targets.size()) {
    throw DimensionError("nll_loss: logits " + shape_str(x.shape()) + " for " +
                         std::to_string(targets.size()) + " targets");
  }
  if (!(num_sequences > 0.0)) {
    throw DimensionError("nll_loss: sequence count must be positive");
  }
  const std::size_t c = x.cols();
  for (std::size_t tgt : targets) {
    if (tgt >= c) {
      throw IndexError("nll_loss: target " + std::to_string(tgt) +
                       " outside vocabulary of size " + std::to_string(c));
    }
  }
  Tensor probs = softmax_rows(x);
  double total = 0.0;
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const double* row = x.data() + r * c;
    const double m = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t k = 0; k < c; ++k) z += std::exp(row[k] - m);
    total -= row[targets[r]] - m - std::log(z);
  }
  const std::size_t ia = logits.id();
  std::vector<std::size_t> tg(targets.begin(), targets.end());
  return logits.tape().record(
      Tensor::scalar(total / num_sequences), {logits},
      [ia, c, num_sequences, tg = std::move(tg), probs = std::move(probs)](Tape& t,
                                                                           std::size_t self) {
        const double g = t.grad(self).item() / num_sequences;
        Tensor& ga = t.grad_buffer(ia);
        for (std::size_t r = 0; r < tg.size(); ++r) {
          for (std::size_t k = 0; k < c; ++k) {
            ga[r * c + k] += g * (probs[r * c + k] - (k == tg[r] ? 1.0 : 0.0));
          }
        }
      });
}

namespace {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

}  // namespace

double grad_check(const std::function<Var(Var)>& f, const Tensor& point,
                  double eps) {
  Tensor analytic;
  {
    Tape tape;
    Var x = tape.leaf(point);
    Var y = f(x);
    tape.backward(y);
    analytic = x.grad().empty() ? Tensor(point.shape()) : x.grad();
  }
  auto eval = [&f](const Tensor& p) {
    Tape tape(false);
    return f(tape.leaf(p)).value().item();
  };
  double worst = 0.0;
  Tensor probe = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + eps;
    const double hi = probe[i];
    const double up = eval(probe);
    probe[i] = point[i] - eps;
    const double lo = probe[i];
    const double down = eval(probe);
    probe[i] = point[i];
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (hi - lo)));
  }
  return worst;
}

double grad_check(std::span<Parameter* const> params,
                  const std::function<Var(Tape&)>& loss, double eps) {
  for (Parameter* p : params) p->grad = Tensor(p->value.shape());
  {
    Tape tape;
    tape.backward(loss(tape));
  }
  auto eval = [&loss] {
    Tape tape(false);
    return loss(tape).value().item();
  };
  double worst = 0.0;
  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double orig = p->value[i];
      p->value[i] = orig + eps;
      const double hi = p->value[i];
      const double up = eval();
      p->value[i] = orig - eps;
      const double lo = p->value[i];
      const double down = eval();
      p->value[i] = orig;
      worst = std::max(worst, relative_error(p->grad[i], (up - down) / (hi - lo)));
    }
  }
  for (Parameter* p : params) p->zero_grad();
  return worst;
}

}  // namespace adr::ad
