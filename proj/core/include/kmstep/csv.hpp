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

#ifndef KMSTEP_CSV_HPP_
#define KMSTEP_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kmstep/types.hpp"

namespace kmstep {

// Parses comma-separated numeric rows into a matrix. Blank lines are skipped.
// Throws ParseError naming the 1-based line on ragged rows, non-numeric
// fields, or when no data rows are present.
Matrix parse_csv(std::istream& in, bool has_header, const std::string& source = "<stream>");

DataSet load_csv(const std::filesystem::path& path, bool has_header = false);

// Centers files share the data layout: k rows, d columns.
Centers load_centers_csv(const std::filesystem::path& path, bool has_header = false);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

void write_csv(std::ostream& out, const Matrix& rows,
               const std::vector<std::string>& header = {});
void write_csv(const std::filesystem::path& path, const Matrix& rows,
               const std::vector<std::string>& header = {});

}  // namespace kmstep

#endif  // KMSTEP_CSV_HPP_
