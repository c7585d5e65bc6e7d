// Copyright 2026 The kmstep Authors.
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

#ifndef KMSTEP_ERRORS_HPP_
#define KMSTEP_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kmstep {

// Shapes of two operands disagree (n, d or k).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller-supplied parameter is outside the range an operation accepts.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed CSV input. `row()` is the 1-based line number in the source.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t row, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// A data-dependent quantity is undefined, e.g. an empty induced cluster.
// `cluster()` is the 0-based index of the offending cluster when known.
class DiagnosticError : public std::runtime_error {
 public:
  static constexpr std::size_t kNoCluster = static_cast<std::size_t>(-1);

  explicit DiagnosticError(const std::string& what, std::size_t cluster = kNoCluster)
      : std::runtime_error(what), cluster_(cluster) {}
  std::size_t cluster() const noexcept { return cluster_; }

 private:
  std::size_t cluster_;
};

// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kmstep

#endif  // KMSTEP_ERRORS_HPP_
