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

/// @file config.hpp
/// @brief Flat `key = value` configuration files with `[section]` headers.
///
/// Lines starting with '#' or ';' are comments. Every key of a section may be
/// overridden by the environment variable MDALAB_<SECTION>_<KEY> (upper case,
/// non-alphanumerics replaced by '_'). Unknown keys are rejected.

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mdalab/expression.hpp"

namespace mdalab {

class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, std::map<std::string, std::string> values)
      : name_(std::move(name)), values_(std::move(values)) {}

  const std::string& name() const { return name_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Throws ConfigError on any key outside `allowed`, then applies
  /// environment overrides for every allowed key.
  void resolve(std::initializer_list<std::string_view> allowed);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  /// Comma-separated list of numbers, e.g. "3, 3".
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
  Expression get_expression(const std::string& key, const std::string& fallback) const;

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
};

class Config {
 public:
  /// Throws ConfigError; `origin` names the source in messages.
  static Config parse(std::string_view text, std::string_view origin = "<config>");
  static Config load(const std::string& path);

  const std::vector<ConfigSection>& sections() const { return sections_; }
  std::vector<ConfigSection>& sections() { return sections_; }
  /// Throws ConfigError if absent.
  const ConfigSection& section(const std::string& name) const;
  bool has_section(const std::string& name) const;

  /// Canonical `[section]\nkey=value` rendering, sections in file order.
  std::string canonical() const;
  /// FNV-1a 64-bit hash of canonical(), as 16 hex digits.
  std::string hash() const;

 private:
  std::vector<ConfigSection> sections_;
};

std::vector<double> parse_number_list(std::string_view text);
double parse_number(std::string_view text);
std::string fnv1a_hex(std::string_view text);

}  // namespace mdalab
