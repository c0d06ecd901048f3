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

#include "mdalab/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "mdalab/errors.hpp"

namespace mdalab {

struct Expression::Node {
  enum class Kind { kNumber, kT, kNeg, kAdd, kSub, kMul, kDiv, kPow, kLog };
  Kind kind = Kind::kNumber;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse_all() {
    NodePtr n = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const char* what) const {
    throw ConfigError(std::string("expression '") + std::string(s_) + "': " + what +
                      " at column " + std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(c == ')' ? "expected ')'" : c == '(' ? "expected '('" : "expected ','");
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) {
        n = make(Kind::kAdd, n, term());
      } else if (accept('-')) {
        n = make(Kind::kSub, n, term());
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) {
        n = make(Kind::kMul, n, unary());
      } else if (accept('/')) {
        n = make(Kind::kDiv, n, unary());
      } else {
        return n;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::kNeg, unary());
    if (accept('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char ch = s_[pos_];
    if (ch == '(') {
      ++pos_;
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view id = s_.substr(start, pos_ - start);
      if (id == "T") return make(Kind::kT);
      if (id == "log") {
        expect('(');
        NodePtr a = expr();
        expect(')');
        return make(Kind::kLog, a);
      }
      if (id == "pow") {
        expect('(');
        NodePtr a = expr();
        expect(',');
        NodePtr b = expr();
        expect(')');
        return make(Kind::kPow, a, b);
      }
      pos_ = start;
      fail("unknown identifier");
    }
    fail("unexpected character");
  }

  NodePtr number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return make(Kind::kNumber, nullptr, nullptr, v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, double T) {
  switch (n.kind) {
    case Kind::kNumber: return n.value;
    case Kind::kT: return T;
    case Kind::kNeg: return -eval(*n.lhs, T);
    case Kind::kAdd: return eval(*n.lhs, T) + eval(*n.rhs, T);
    case Kind::kSub: return eval(*n.lhs, T) - eval(*n.rhs, T);
    case Kind::kMul: return eval(*n.lhs, T) * eval(*n.rhs, T);
    case Kind::kDiv: return eval(*n.lhs, T) / eval(*n.rhs, T);
    case Kind::kPow: return std::pow(eval(*n.lhs, T), eval(*n.rhs, T));
    case Kind::kLog: return std::log(eval(*n.lhs, T));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.root_ = Parser(text).parse_all();
  e.text_ = std::string(text);
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  e.root_ = make(Kind::kNumber, nullptr, nullptr, value);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  e.text_ = buf;
  return e;
}

double Expression::evaluate(double T) const {
  if (!root_) throw InvalidArgument("empty expression");
  return eval(*root_, T);
}

}  // namespace mdalab
