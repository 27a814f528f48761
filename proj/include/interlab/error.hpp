// Copyright 2026 The Interaction Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INTERLAB_ERROR_HPP
#define INTERLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace interlab {

// Exit codes used by the CLI. Each error type maps onto exactly one.
enum class ExitCode : int {
  kSuccess = 0,
  kValidation = 1,
  kVerification = 2,
  kNumeric = 3,
};

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }
  virtual ExitCode exit_code() const noexcept { return ExitCode::kValidation; }

 private:
  std::string kind_;
};

/// Sizes or lengths that do not agree.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// Malformed configuration, game specification or file.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error("validation", what) {}
};

/// An exact path was requested beyond its enumeration limit.
class GuardError : public Error {
 public:
  explicit GuardError(const std::string& what) : Error("guard", what) {}
};

/// Non-finite value produced during evaluation or training.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error("numeric", what) {}
  ExitCode exit_code() const noexcept override { return ExitCode::kNumeric; }
};

/// Dataset or model file could not be parsed.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

}  // namespace interlab

#endif  // INTERLAB_ERROR_HPP
