// Copyright 2026 The Walkguard Authors.
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

#ifndef WALKGUARD_ERRORS_HPP_
#define WALKGUARD_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace walkguard {

// Malformed input file. line() is 1-based; 0 means "not line specific".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class OutOfVocabularyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace walkguard

#endif  // WALKGUARD_ERRORS_HPP_
