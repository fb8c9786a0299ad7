// Copyright 2026 The robust_psi Authors.
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

namespace robust_psi {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parameters violate the admissibility conditions of the sample complexity
// guarantee (h_eps must stay strictly below t_bar).
class AdmissibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Algorithm state does not allow the requested step.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed dataset file. Carries the offending 1-based line number (0 when
// the problem is not tied to a single line).
class IngestionError : public std::runtime_error {
 public:
  IngestionError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Invalid run configuration file; the message names the key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robust_psi
