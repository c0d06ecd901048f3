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

#include "mdalab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mdalab/errors.hpp"

namespace mdalab {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string env_name(const std::string& section, std::string_view key) {
  std::string out = "MDALAB_";
  auto push = [&out](std::string_view part) {
    for (char ch : part) {
      out.push_back(std::isalnum(static_cast<unsigned char>(ch))
                        ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch)))
                        : '_');
    }
  };
  push(section);
  out.push_back('_');
  push(key);
  return out;
}

}  // namespace

double parse_number(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    // Allow constant expressions such as "pow(2, -3)".
    try {
      return Expression::parse(text).evaluate(1.0);
    } catch (const ConfigError&) {
      throw ConfigError("not a number: '" + std::string(text) + "'");
    }
  }
  return v;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '(') ++depth;
    if (i < text.size() && text[i] == ')') --depth;
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      const auto item = trim(text.substr(start, i - start));
      if (!item.empty()) out.push_back(parse_number(item));
      start = i + 1;
    }
  }
  return out;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ConfigSection::resolve(std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
    }
  }
  for (std::string_view key : allowed) {
    if (const char* v = std::getenv(env_name(name_, key).c_str())) {
      values_[std::string(key)] = v;
    }
  }
}

std::string ConfigSection::get_string(const std::string& key,
                                      const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string ConfigSection::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
  return it->second;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number(it->second);
}

double ConfigSection::require_double(const std::string& key) const {
  return parse_number(require_string(key));
}

std::int64_t ConfigSection::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = parse_number(it->second);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw ConfigError("key '" + key + "' in [" + name_ + "] is not an integer");
  }
  return static_cast<std::int64_t>(v);
}

std::vector<double> ConfigSection::get_list(const std::string& key,
                                            std::vector<double> fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number_list(it->second);
}

Expression ConfigSection::get_expression(const std::string& key,
                                         const std::string& fallback) const {
  return Expression::parse(get_string(key, fallback));
}

Config Config::parse(std::string_view text, std::string_view origin) {
  Config cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto error = [&](const std::string& what) {
    return ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
  };
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw error("unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw error("empty section name");
      for (const auto& s : cfg.sections_) {
        if (s.name() == name) throw error("duplicate section [" + std::string(name) + "]");
      }
      cfg.sections_.emplace_back(std::string(name), std::map<std::string, std::string>{});
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw error("expected key = value");
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw error("empty key");
    if (cfg.sections_.empty()) {
      cfg.sections_.emplace_back("main", std::map<std::string, std::string>{});
    }
    auto& sec = cfg.sections_.back();
    if (sec.has(std::string(key))) throw error("duplicate key '" + std::string(key) + "'");
    sec.set(std::string(key), std::string(value));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const ConfigSection& Config::section(const std::string& name) const {
  for (const auto& s : sections_) {
    if (s.name() == name) return s;
  }
  throw ConfigError("missing section [" + name + "]");
}

bool Config::has_section(const std::string& name) const {
  return std::any_of(sections_.begin(), sections_.end(),
                     [&](const ConfigSection& s) { return s.name() == name; });
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& s : sections_) {
    out += "[" + s.name() + "]\n";
    for (const auto& [k, v] : s.values()) out += k + "=" + v + "\n";
  }
  return out;
}

std::string Config::hash() const { return fnv1a_hex(canonical()); }

}  // namespace mdalab
