// Copyright 2026 The radialab Authors.
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

namespace radialab {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad shape parameters, malformed config, bad flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Function evaluated outside the region where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  EmptySample() : Error("empty sample") {}
};

class MissingTail : public Error {
 public:
  explicit MissingTail(const std::string& shape)
      : Error("shape '" + shape + "' has no declared boundary tail (a, b)") {}
};

class NonIntegerDimension : public Error {
 public:
  explicit NonIntegerDimension(double d)
      : Error("vector sampling needs an integer d, got " + std::to_string(d)) {}
};

/// Failures of the numerical kernels. The CLI maps all of these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DivergentIntegral : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RegularityFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace radialab
