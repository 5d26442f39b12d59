// Copyright 2026 The graphfb Authors.
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

namespace graphfb {

// Error taxonomy. The CLI maps ConfigError/ParameterError to exit code 2 and
// InvariantError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index (node, round) outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input of the wrong mathematical kind (e.g. an unobservable graph).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Exact search requested above the configured size limit.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Caller broke a usage contract (observation set mismatch, uncertified witness).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Internal invariant failed at runtime.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Malformed config or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphfb
