// Copyright 2026 The ddph Authors
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

#ifndef DDPH_ERRORS_HPP_
#define DDPH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ddph {

// Invalid or inconsistent configuration (bad ranges, unknown keys, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values produced during training (usually a divergent step size).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Privacy budget exhausted; training must stop.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while executing a federated run or sweep.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void Require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace ddph

#endif  // DDPH_ERRORS_HPP_
