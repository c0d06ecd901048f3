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

#include <memory>
#include <string>
#include <string_view>

namespace mdalab {

/// Arithmetic over numbers, + - * /, parentheses, pow(x, y), log(x) and the
/// identifier T. Used for schedules such as "pow(log(T), -3)".
class Expression {
 public:
  /// Throws ConfigError with the offending column on malformed input.
  static Expression parse(std::string_view text);

  /// A constant expression.
  static Expression constant(double value);

  double evaluate(double T) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace mdalab
