// Copyright 2026 The costbo Authors.
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

#include <stdexcept>
#include <string>

namespace costbo {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad sizes, out-of-range parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed even after jitter escalation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Hyperparameter fitting failed.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (CSV, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Problem or factorization too large for the dense code paths.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace costbo
