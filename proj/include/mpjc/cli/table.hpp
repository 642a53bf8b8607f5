// Copyright 2026 The mpjc Authors
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


#ifndef MPJC_CLI_TABLE_HPP
#define MPJC_CLI_TABLE_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "mpjc/error.hpp"

namespace mpjc::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

struct OutputTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  /// Written as "# key: value" lines above the header.
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<Cell> row) {
    if (row.size() != header.size()) {
      throw DimensionError("OutputTable: row has " + std::to_string(row.size()) +
                           " cells, header has " + std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    throw DimensionError("OutputTable: no column '" + name + "'");
  }

  std::vector<double> numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      const Cell& cell = row[c];
      if (const double* d = std::get_if<double>(&cell)) out.push_back(*d);
      else if (const auto* i = std::get_if<std::int64_t>(&cell)) out.push_back(static_cast<double>(*i));
      else throw DimensionError("OutputTable: column '" + name + "' is not numeric");
    }
    return out;
  }
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else return quote_csv(v);
      },
      cell);
}

inline void write_csv(std::ostream& out, const OutputTable& table) {
  std::set<std::string> seen;
  for (const std::string& h : table.header) {
    if (!seen.insert(h).second) throw DimensionError("OutputTable: duplicate column '" + h + "'");
  }
  for (const auto& [key, value] : table.metadata) {
    std::string line = value;
    for (char& c : line) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    out << "# " << key << ": " << line << '\n';
  }
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    out << (c ? "," : "") << quote_csv(table.header[c]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
    out << '\n';
  }
}

inline void write_csv(const std::filesystem::path& path, const OutputTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_csv(out, table);
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

}  // namespace mpjc::cli

#endif  // MPJC_CLI_TABLE_HPP
