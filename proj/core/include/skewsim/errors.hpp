// Copyright 2026 The skewsim Authors. All rights reserved.
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

#ifndef SKEWSIM_ERRORS_HPP_
#define SKEWSIM_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skewsim {

// Invalid configuration or input data. The CLI maps this family to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range values in otherwise well-formed input.
class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Malformed text input; carries the 1-based line number.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// File could not be opened, read or written. Exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skewsim

#endif  // SKEWSIM_ERRORS_HPP_
