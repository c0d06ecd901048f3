// Copyright 2026 The mdalab Authors
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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace mdalab {

/// A table cell: integers stay exact, reals print with 17 significant digits.
using Cell = std::variant<std::int64_t, double, std::string>;

std::string format_cell(const Cell& c);
/// %.17g in the classic locale.
std::string format_double(double v);

struct TableMetadata {
  std::string name;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::string config_hash;
  unsigned threads = 1;
  double wall_seconds = 0.0;
};

/// Rows of cells plus a summary map. The data block (columns, rows, summary)
/// depends only on inputs and seed; timing and thread count live in metadata.
class ExperimentTable {
 public:
  ExperimentTable() = default;
  explicit ExperimentTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  /// Throws InvalidArgument when the row width does not match the columns.
  void add_row(std::vector<Cell> row);
  void set_summary(const std::string& key, Cell value) { summary_[key] = std::move(value); }

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::map<std::string, Cell>& summary() const { return summary_; }
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const Cell* summary_value(const std::string& key) const;

  TableMetadata& metadata() { return meta_; }
  const TableMetadata& metadata() const { return meta_; }

  /// Metadata as '#' lines, then the header and rows; summary as '#' lines.
  std::string to_csv(bool with_metadata = true) const;
  std::string to_json(bool with_metadata = true) const;
  /// Data block only; equal across thread counts for the same seed and config.
  std::string data_fingerprint() const { return to_csv(false); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::map<std::string, Cell> summary_;
  TableMetadata meta_;
};

const char* version_string();
const char* git_revision();

}  // namespace mdalab
