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

// Randomized gradient-check cases shared by the unit tests and the
// acceptance runner.
#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "adr/autodiff.hpp"
#include "adr/rng.hpp"

namespace testing_support {

using adr::SplitMix64;
using namespace adr::ad;

inline Tensor random_tensor(SplitMix64& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Scalar reduction of an arbitrary-shaped result with fixed random weights, so
// every output element contributes a distinct gradient.
inline Var weighted_sum(Var y, std::uint64_t seed) {
  SplitMix64 rng(seed ^ 0xabcdefULL);
  return sum(mul(y, y.tape().constant(random_tensor(rng, y.shape()))));
}

struct OpCase {
  std::string name;
  Shape input;
  std::function<Var(Var, SplitMix64&)> op;
};

inline void PrintTo(const OpCase& c, std::ostream* os) { *os << c.name; }

inline std::vector<OpCase> op_cases() {
  return {
      {"matmul_left", {3, 4}, [](Var x, SplitMix64& r) {
         return matmul(x, x.tape().constant(random_tensor(r, {4, 2})));
       }},
      {"matmul_right", {4, 2}, [](Var x, SplitMix64& r) {
         return matmul(x.tape().constant(random_tensor(r, {3, 4})), x);
       }},
      {"add_broadcast_row", {1, 4}, [](Var x, SplitMix64& r) {
         return add(x.tape().constant(random_tensor(r, {3, 4})), x);
       }},
      {"add_full", {3, 4}, [](Var x, SplitMix64& r) {
         return x + x.tape().constant(random_tensor(r, {3, 4}));
       }},
      {"sub", {3, 4}, [](Var x, SplitMix64& r) {
         return x.tape().constant(random_tensor(r, {3, 4})) - x;
       }},
      {"mul_broadcast_col", {3, 1}, [](Var x, SplitMix64& r) {
         return mul(x.tape().constant(random_tensor(r, {3, 4})), x);
       }},
      {"mul_self", {2, 3}, [](Var x, SplitMix64&) { return x * x; }},
      {"scale", {2, 3}, [](Var x, SplitMix64&) { return scale(x, -2.5); }},
      {"concat_rows", {2, 3}, [](Var x, SplitMix64& r) {
         return concat({x, x.tape().constant(random_tensor(r, {1, 3})), x}, 0);
       }},
      {"concat_cols", {2, 3}, [](Var x, SplitMix64& r) {
         return concat({x.tape().constant(random_tensor(r, {2, 2})), x}, 1);
       }},
      {"slice", {4, 5}, [](Var x, SplitMix64&) { return slice(x, 1, 1, 4); }},
      {"transpose", {2, 5}, [](Var x, SplitMix64& r) {
         return matmul(transpose(x), x.tape().constant(random_tensor(r, {2, 3})));
       }},
      {"tanh", {3, 3}, [](Var x, SplitMix64&) { return tanh(x); }},
      {"sigmoid", {3, 3}, [](Var x, SplitMix64&) { return sigmoid(x); }},
      {"relu", {3, 3}, [](Var x, SplitMix64&) { return relu(x); }},
      {"softmax_rows", {3, 4}, [](Var x, SplitMix64&) { return softmax(x, 1); }},
      {"softmax_cols", {3, 4}, [](Var x, SplitMix64&) { return softmax(x, 0); }},
      {"embedding_lookup", {5, 3}, [](Var x, SplitMix64&) {
         const std::vector<std::size_t> idx{4, 0, 4, 2};
         return embedding_lookup(x, idx);
       }},
      {"mean", {3, 4}, [](Var x, SplitMix64&) { return mean(x); }},
      {"sum", {3, 4}, [](Var x, SplitMix64&) { return sum(x); }},
      {"sum_axis0", {3, 4}, [](Var x, SplitMix64&) { return sum(x, 0); }},
      {"sum_axis1", {3, 4}, [](Var x, SplitMix64&) { return sum(x, 1); }},
      {"layer_norm", {3, 5}, [](Var x, SplitMix64&) { return layer_norm(x); }},
      {"nll_loss", {4, 6}, [](Var x, SplitMix64&) {
         const std::vector<std::size_t> t{5, 0, 3, 3};
         return nll_loss(x, t, 2.0);
       }},
  };
}

}  // namespace testing_support
