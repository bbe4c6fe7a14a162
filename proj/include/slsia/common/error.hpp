// Copyright 2026 The slsia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace slsia {

// Error taxonomy shared by every module. Each maps to one failure class named
// in the operation contracts so callers can catch selectively.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid architecture, shape mismatch, bad tap index, invalid options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad data handed to an operation: out-of-range label, non-finite value.
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Synthetic generation could not satisfy its constraints.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Not enough subjects or points to build client / pre-training datasets.
class AssignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace slsia
