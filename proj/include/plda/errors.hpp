// plda/errors.hpp

// Copyright 2026  The plda2cov Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plda {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// A Cholesky pivot was <= 0: the matrix is not positive definite.
/// Callers that can tolerate this (the EM engine) apply jitter and retry;
/// everything else treats it as fatal.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string &msg) : Error(msg) {}
};

/// Vector or matrix dimensions do not agree.
class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string &msg) : Error(msg) {}
};

/// Fewer than two distinct class labels in a training set.
class TooFewClasses : public Error {
 public:
  explicit TooFewClasses(const std::string &msg) : Error(msg) {}
};

/// Posterior list and class-statistics list do not line up.
class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string &msg) : Error(msg) {}
};

/// Enrollment was attempted with no vectors.
class EmptyEnrollment : public Error {
 public:
  explicit EmptyEnrollment(const std::string &msg) : Error(msg) {}
};

/// The training log-likelihood became NaN or infinite.
class NonFiniteLikelihood : public Error {
 public:
  explicit NonFiniteLikelihood(const std::string &msg) : Error(msg) {}
};

/// A training configuration failed validation (e.g. iterations < 1).
class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string &msg) : Error(msg) {}
};

/// A precondition on a function argument was violated.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string &msg) : Error(msg) {}
};

/// A text file failed to parse; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace plda
