/*
 * Copyright 2026 The PIA Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pia/attributes.h"

#include <fstream>
#include <sstream>

#include "pia/error.h"

namespace pia {
namespace {

std::vector<std::string> SplitWhitespace(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> tokens;
  std::string t;
  while (is >> t) tokens.push_back(std::move(t));
  return tokens;
}

bool IsBlank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

AttributeTable::AttributeTable(std::vector<std::string> names)
    : names_(std::move(names)) {}

std::optional<std::size_t> AttributeTable::ColumnIndex(
    std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t AttributeTable::RequireColumn(std::string_view name) const {
  if (auto i = ColumnIndex(name)) return *i;
  throw ConfigError("attribute '" + std::string(name) +
                    "' is not in the attribute table");
}

void AttributeTable::AddRow(std::string filename,
                            std::vector<std::int8_t> values) {
  if (values.size() != names_.size()) {
    throw DataError("row for " + filename + " has " +
                    std::to_string(values.size()) + " values, expected " +
                    std::to_string(names_.size()));
  }
  for (std::int8_t v : values) {
    if (v != 1 && v != -1) {
      throw DataError("row for " + filename + " holds a value other than +-1");
    }
  }
  if (!index_.emplace(filename, filenames_.size()).second) {
    throw DataError("duplicate filename " + filename);
  }
  filenames_.push_back(std::move(filename));
  rows_.push_back(std::move(values));
}

const std::vector<std::int8_t>& AttributeTable::Row(
    std::string_view filename) const {
  auto it = index_.find(std::string(filename));
  if (it == index_.end()) {
    throw DataError("no attribute row for " + std::string(filename));
  }
  return rows_[it->second];
}

AttributeTable ParseAttributeFile(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(1, "missing row count");
  ++line_no;
  std::size_t declared = 0;
  {
    const auto tokens = SplitWhitespace(line);
    std::size_t consumed = 0;
    try {
      if (tokens.size() != 1) throw std::invalid_argument("count");
      if (tokens[0].find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument("count");
      }
      declared = std::stoull(tokens[0], &consumed);
    } catch (const std::exception&) {
      throw ParseError(line_no, "expected a non-negative row count, got '" +
                                    line + "'");
    }
  }

  if (!std::getline(in, line)) {
    throw ParseError(line_no + 1, "missing attribute-name header");
  }
  ++line_no;
  AttributeTable table(SplitWhitespace(line));
  if (table.attribute_names().empty()) {
    throw ParseError(line_no, "attribute-name header is empty");
  }
  const std::size_t width = table.attribute_names().size();

  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    if (table.size() == declared) {
      throw ParseError(line_no, "more rows than the declared count " +
                                    std::to_string(declared));
    }
    auto tokens = SplitWhitespace(line);
    if (tokens.size() != width + 1) {
      throw ParseError(line_no, "expected filename and " +
                                    std::to_string(width) + " values, got " +
                                    std::to_string(tokens.size()) + " tokens");
    }
    std::vector<std::int8_t> values;
    values.reserve(width);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      if (tokens[i] == "1") {
        values.push_back(1);
      } else if (tokens[i] == "-1") {
        values.push_back(-1);
      } else {
        throw ParseError(line_no, "malformed token '" + tokens[i] +
                                      "' for attribute " +
                                      table.attribute_names()[i - 1]);
      }
    }
    try {
      table.AddRow(std::move(tokens[0]), std::move(values));
    } catch (const DataError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (table.size() != declared) {
    throw ParseError(line_no + 1, "end of stream after " +
                                      std::to_string(table.size()) +
                                      " rows, declared " +
                                      std::to_string(declared));
  }
  return table;
}

AttributeTable ParseAttributeFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open attribute file " + path);
  return ParseAttributeFile(in);
}

std::string SerializeAttributeTable(const AttributeTable& table) {
  std::ostringstream os;
  os << table.size() << "\n";
  for (std::size_t i = 0; i < table.attribute_names().size(); ++i) {
    if (i) os << ' ';
    os << table.attribute_names()[i];
  }
  os << "\n";
  for (std::size_t r = 0; r < table.size(); ++r) {
    os << table.filenames()[r];
    for (std::int8_t v : table.Row(r)) os << ' ' << (v > 0 ? "1" : "-1");
    os << "\n";
  }
  return os.str();
}

}  // namespace pia
