// Copyright 2026 The coheval Authors.
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

#ifndef COHEVAL_ERROR_H_
#define COHEVAL_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coheval {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input. `line` is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Requested label ratios cannot be realized from the generated pools.
class UnreachableRatioError : public Error {
 public:
  UnreachableRatioError(const std::string& label, const std::string& what)
      : Error(what), label_(label) {}

  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// Predictions, scores and ratings share no conversation id.
class NoMatchError : public Error {
 public:
  explicit NoMatchError(const std::string& what) : Error(what) {}
};

// Failure talking to the inference bridge.
class BridgeError : public Error {
 public:
  explicit BridgeError(const std::string& what) : Error(what) {}
};

}  // namespace coheval

#endif  // COHEVAL_ERROR_H_
