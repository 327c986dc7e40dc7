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

// Reverse-mode automatic differentiation over dense tensors.
//
// A Tape records every operation of one forward pass in execution order.
// Node ids therefore form a topological order, and backward() walks them
// once from the root down to 0. Gradients reaching a parameter leaf are
// added to Parameter::grad, so several backward passes accumulate until the
// caller zeroes them.
//
// Ops follow numpy-style broadcasting for rank <= 2 operands: a dimension of
// size 1 stretches to match the other operand.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "adr/tensor.hpp"

namespace adr::ad {

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while its tape lives.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  // With record_gradients == false no backward rules are kept and
  // parameters enter as constants (inference mode).
  explicit Tape(bool record_gradients = true);
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // A differentiable input that is not bound to a parameter.
  Var leaf(Tensor value);
  // Returns the same node for repeated requests of one parameter. The node
  // reads the parameter's storage directly, so its value must not change
  // while the tape is in use.
  Var parameter(Parameter& p);

  // Seeds d(root)/d(root) = 1; root must hold a single value.
  void backward(Var root);

  const Tensor& value(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.ref ? *n.ref : n.value;
  }
  const Tensor& grad(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  bool records_gradients() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  // Used by op implementations.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(Tensor value, std::span<const Var> inputs, BackwardFn fn);
  Tensor& grad_buffer(std::size_t id);

 private:
  struct Node {
    Tensor value;
    const Tensor* ref = nullptr;  // parameter storage, used instead of value
    Tensor grad;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  std::unordered_map<Parameter*, std::size_t> param_nodes_;
  bool record_;
};

// Core ops. Shape mismatches throw DimensionError naming both shapes.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var concat(std::span<const Var> parts, std::size_t axis);
Var concat(std::initializer_list<Var> parts, std::size_t axis);
// Half-open range [begin, end) along `axis`.
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end);
Var transpose(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
Var relu(Var a);
// Max-subtracted softmax along `axis`.
Var softmax(Var a, std::size_t axis);
// Rows of `table` (V x D) at `indices`; result is indices.size() x D.
// Throws IndexError for an index >= V.
Var embedding_lookup(Var table, std::span<const std::size_t> indices);
// Mean and sum of all elements, as a rank-0 tensor.
Var mean(Var a);
Var sum(Var a);
// Sum over `axis` of a rank-2 tensor, keeping the axis with size 1.
Var sum(Var a, std::size_t axis);
// Per-row standardization (x - mean) / sqrt(var + eps), no affine part.
Var layer_norm(Var a, double eps = 1e-5);
// -(1/num_sequences) * sum_r log softmax(logits[r])[targets[r]].
// Throws IndexError for targets outside [0, cols).
Var nll_loss(Var logits, std::span<const std::size_t> targets,
             double num_sequences = 1.0);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

// Row-wise softmax of a plain tensor (no tape), same numerics as softmax().
Tensor softmax_rows(const Tensor& logits);

// Largest |analytic - numeric| / max(1e-8, |analytic| + |numeric|) where
// numeric gradients come from central differences with step eps.
//
// `f` maps a differentiable input to a scalar on the same tape.
double grad_check(const std::function<Var(Var)>& f, const Tensor& point,
                  double eps = 1e-5);

// Same check over every element of every listed parameter; `loss` builds
// the scalar on the given tape. Restores parameter values and clears their
// grads before returning.
double grad_check(std::span<Parameter* const> params,
                  const std::function<Var(Tape&)>& loss, double eps = 1e-5);

}  // namespace adr::ad
