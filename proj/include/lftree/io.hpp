// Copyright 2026 The lftree Authors
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

#ifndef LFTREE_IO_HPP
#define LFTREE_IO_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lftree {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line of the record start
  std::vector<std::string> fields;
};

/// RFC 4180 style: comma separated, double-quoted fields may hold commas,
/// newlines and doubled quotes. Blank lines are skipped.
std::vector<CsvRecord> parse_csv(std::string_view content);
std::string csv_escape(std::string_view field);

std::string trim(std::string_view text);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace lftree

#endif  // LFTREE_IO_HPP
