// Copyright 2026 The Arcoref Authors.
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

#ifndef ARCOREF_ERROR_HPP_
#define ARCOREF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace arcoref {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data: CoNLL files, embedding files, mention files,
// checkpoints, or cluster sets that violate their invariants.
class DataError : public Error {
 public:
  using Error::Error;
};

// A located parse failure. line() is 1-based; 0 means "end of input".
class ParseError : public DataError {
 public:
  ParseError(const std::string& message, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operand shapes do not match an operation's requirements.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or other numerical failures during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace arcoref

#endif  // ARCOREF_ERROR_HPP_
