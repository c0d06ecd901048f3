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

#include "mdalab/table.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "mdalab/errors.hpp"

#ifndef MDALAB_VERSION
#define MDALAB_VERSION "0.0.0"
#endif
#ifndef MDALAB_GIT_REVISION
#define MDALAB_GIT_REVISION "unknown"
#endif

namespace mdalab {

const char* version_string() { return MDALAB_VERSION; }
const char* git_revision() { return MDALAB_GIT_REVISION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // snprintf ignores the global locale only for "C"; the library never calls setlocale.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

void ExperimentTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw InvalidArgument("row has " + std::to_string(row.size()) + " cells, table has " +
                          std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

std::size_t ExperimentTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    if (columns_[k] == name) return k;
  }
  throw InvalidArgument("no column named " + name);
}

double ExperimentTable::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows_.at(row).at(column(name));
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  throw InvalidArgument("column " + name + " is not numeric");
}

const Cell* ExperimentTable::summary_value(const std::string& key) const {
  auto it = summary_.find(key);
  return it == summary_.end() ? nullptr : &it->second;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return format_double(*d);
    return *d;
  }
  return std::get<std::string>(c);
}

}  // namespace

std::string ExperimentTable::to_csv(bool with_metadata) const {
  std::ostringstream os;
  if (with_metadata) {
    os << "# name: " << meta_.name << "\n"
       << "# version: " << version_string() << "\n"
       << "# git_revision: " << git_revision() << "\n"
       << "# seed: " << meta_.seed << "\n"
       << "# samples: " << meta_.samples << "\n"
       << "# config_hash: " << meta_.config_hash << "\n"
       << "# threads: " << meta_.threads << "\n"
       << "# wall_seconds: " << format_double(meta_.wall_seconds) << "\n";
  }
  for (const auto& [k, v] : summary_) os << "# summary." << k << ": " << format_cell(v) << "\n";
  for (std::size_t k = 0; k < columns_.size(); ++k) os << (k ? "," : "") << csv_escape(columns_[k]);
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_escape(format_cell(row[k]));
    os << "\n";
  }
  return os.str();
}

std::string ExperimentTable::to_json(bool with_metadata) const {
  nlohmann::ordered_json j;
  if (with_metadata) {
    j["metadata"] = {{"name", meta_.name},
                     {"version", version_string()},
                     {"git_revision", git_revision()},
                     {"seed", meta_.seed},
                     {"samples", meta_.samples},
                     {"config_hash", meta_.config_hash},
                     {"threads", meta_.threads},
                     {"wall_seconds", meta_.wall_seconds}};
  }
  j["columns"] = columns_;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  auto summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary_) summary[k] = cell_json(v);
  j["summary"] = std::move(summary);
  return j.dump(2) + "\n";
}

}  // namespace mdalab
