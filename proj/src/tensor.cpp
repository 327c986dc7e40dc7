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

#include "adr/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "adr/error.hpp"

namespace adr::ad {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_size(shape_)) {
    throw DimensionError("tensor of shape " + shape_str(shape_) + " given " +
                         std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::initializer_list<double> values) {
  return Tensor({rows, cols}, std::vector<double>(values));
}

Tensor Tensor::row(std::span<const double> values) {
  return Tensor({1, values.size()},
                std::vector<double>(values.begin(), values.end()));
}

std::size_t Tensor::rows() const {
  if (rank() <= 1) return 1;
  if (rank() == 2) return shape_[0];
  throw DimensionError("matrix view of rank-" + std::to_string(rank()) +
                       " tensor " + shape_str(shape_));
}

std::size_t Tensor::cols() const {
  if (rank() == 0) return 1;
  if (rank() <= 2) return shape_.back();
  throw DimensionError("matrix view of rank-" + std::to_string(rank()) +
                       " tensor " + shape_str(shape_));
}

double Tensor::item() const {
  if (values_.size() != 1) {
    throw DimensionError("item() on tensor of shape " + shape_str(shape_));
  }
  return values_[0];
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

Tensor Tensor::reshaped(Shape shape) const {
  return Tensor(std::move(shape), values_);
}

Parameter& ParameterStore::add(const std::string& name, Shape shape) {
  if (contains(name)) throw ConfigError("duplicate parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Tensor(shape);
  p->grad = Tensor(std::move(shape));
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParameterStore::add_xavier(const std::string& name,
                                      std::size_t fan_in, std::size_t fan_out,
                                      SplitMix64& rng) {
  Parameter& p = add(name, {fan_in, fan_out});
  xavier_uniform(p.value, fan_in, fan_out, rng);
  return p;
}

Parameter& ParameterStore::at(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return *p;
  }
  throw ConfigError("no parameter named " + name);
}

const Parameter& ParameterStore::at(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return *p;
  }
  throw ConfigError("no parameter named " + name);
}

bool ParameterStore::contains(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return true;
  }
  return false;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

void xavier_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                    SplitMix64& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
}

}  // namespace adr::ad
