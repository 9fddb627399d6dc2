// Copyright 2026 The gpbtl Authors. All rights reserved.
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

namespace gpbtl {

// Root of all library errors. Callers that only care about "something went
// wrong inside gpbtl" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of vectors/matrices/blocks that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Symmetric factorization failed even after the maximum jitter.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

// A parameter outside its valid domain (negative variance, empty set, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed experiment configuration. Reported by the CLI with exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data files.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpbtl
