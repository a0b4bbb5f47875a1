// Copyright 2026 The Momentfuse Authors
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

#ifndef MOMENTFUSE_ERROR_H_
#define MOMENTFUSE_ERROR_H_

#include <stdexcept>
#include <string>

namespace mf {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: wrong shapes, malformed files, unknown labels, bad flags.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numeric failure at run time (divergence, non-finite gradients).
// The CLI maps these to exit code 1.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Misuse of a stateful object, e.g. backward() before forward().
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace mf

#endif  // MOMENTFUSE_ERROR_H_
