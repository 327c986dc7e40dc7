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

#pragma once

#include <stdexcept>
#include <string>

namespace adr {

// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kUsage,      // bad arguments or configuration
  kData,       // malformed input data, encoding, index or shape problems
  kDivergence  // non-finite loss during training
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Invalid UTF-8.
class EncodingError : public Error {
 public:
  explicit EncodingError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

// Tensor shape incompatibility.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

// Token or vocabulary index outside its range.
class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

// Input too small or empty where content is required.
class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

// A statistic requested over an empty population.
class UndefinedMetricError : public Error {
 public:
  explicit UndefinedMetricError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

// Corrupt or incompatible model or checkpoint file.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kUsage, what) {}
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what)
      : Error(ErrorKind::kDivergence, what) {}
};

}  // namespace adr
