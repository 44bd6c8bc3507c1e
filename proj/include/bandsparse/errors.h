// Copyright 2026 The BandSparse Authors
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


#ifndef BANDSPARSE_ERRORS_H_
#define BANDSPARSE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace bandsparse {

// Operand shapes do not agree, or an operand is empty where it must not be.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// A configuration value violates its documented range.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Softmax over a row with no admissible entry, or sparse attention for a
// token whose selected key set is empty.
class EmptyRowError : public std::domain_error {
 public:
  explicit EmptyRowError(const std::string& what) : std::domain_error(what) {}
};

// Malformed or unreadable tensor / mask file.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bandsparse

#endif  // BANDSPARSE_ERRORS_H_
