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

#ifndef PIA_ATTRIBUTES_H_
#define PIA_ATTRIBUTES_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pia {

// CelebA-style attribute list:
//   line 1: row count
//   line 2: whitespace-separated attribute names
//   rows:   filename followed by one "1" / "-1" token per attribute
class AttributeTable {
 public:
  AttributeTable() = default;
  explicit AttributeTable(std::vector<std::string> names);

  const std::vector<std::string>& attribute_names() const { return names_; }
  const std::vector<std::string>& filenames() const { return filenames_; }
  std::size_t size() const { return filenames_.size(); }

  std::optional<std::size_t> ColumnIndex(std::string_view name) const;
  // ConfigError when the attribute is absent.
  std::size_t RequireColumn(std::string_view name) const;

  // Values are +1 / -1. Throws on duplicate filename or wrong row width.
  void AddRow(std::string filename, std::vector<std::int8_t> values);
  const std::vector<std::int8_t>& Row(std::size_t index) const {
    return rows_[index];
  }
  const std::vector<std::int8_t>& Row(std::string_view filename) const;
  std::int8_t Value(std::size_t row, std::size_t column) const {
    return rows_[row][column];
  }

  bool operator==(const AttributeTable&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::string> filenames_;
  std::vector<std::vector<std::int8_t>> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Throws ParseError with the 1-based line number on malformed input.
AttributeTable ParseAttributeFile(std::istream& in);
AttributeTable ParseAttributeFile(const std::string& path);

std::string SerializeAttributeTable(const AttributeTable& table);

}  // namespace pia

#endif  // PIA_ATTRIBUTES_H_
