// Copyright 2026 The relaxtag Authors.
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

#ifndef RELAXTAG_ERROR_H_
#define RELAXTAG_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relaxtag {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. Carries the 1-based line number
// when the problem can be pinned to a line (0 otherwise).
class DataError : public Error {
 public:
  explicit DataError(const std::string &message, std::size_t line = 0)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Invalid configuration: bad algorithm names, inconsistent option values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace relaxtag

#endif  // RELAXTAG_ERROR_H_
