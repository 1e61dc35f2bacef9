#pragma once

// Fixed-seed generator of random rational expressions, with a direct
// evaluator used as an oracle independent of the canonical form.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hamform/symexpr/expr.hpp"

namespace testing_support {

using hamform::sym::Rational;

struct RNode {
  char op = 'c';  // c constant, s symbol, + - * / ^, n negate
  Rational value;
  std::string name;
  int exponent = 0;
  std::vector<RNode> kids;
};

class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed, std::vector<std::string> names = {"x", "y", "z"})
      : rng_(seed), names_(std::move(names)) {}

  RNode node(int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    const int k = pick(rng_);
    RNode n;
    if (k == 0) {
      n.op = 'c';
      n.value = small_rational();
      return n;
    }
    if (k == 1) {
      n.op = 's';
      n.name = names_[std::uniform_int_distribution<std::size_t>(0, names_.size() - 1)(rng_)];
      return n;
    }
    static const char ops[] = {'+', '-', '*', '/', '^', 'n'};
    n.op = ops[k - 2];
    if (n.op == 'n') {
      n.kids.push_back(node(depth - 1));
    } else if (n.op == '^') {
      n.kids.push_back(node(depth - 1));
      n.exponent = std::uniform_int_distribution<int>(0, 3)(rng_);
    } else {
      n.kids.push_back(node(depth - 1));
      n.kids.push_back(node(depth - 1));
    }
    return n;
  }

  Rational small_rational() {
    const long num = std::uniform_int_distribution<long>(-6, 6)(rng_);
    const long den = std::uniform_int_distribution<long>(1, 4)(rng_);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  Rational point_rational() {
    const long num = std::uniform_int_distribution<long>(-40, 40)(rng_);
    const long den = std::uniform_int_distribution<long>(1, 9)(rng_);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> names_;
};

inline std::string to_text(const RNode& n) {
  switch (n.op) {
    case 'c': return "(" + n.value.get_str() + ")";
    case 's': return n.name;
    case 'n': return "(-" + to_text(n.kids[0]) + ")";
    case '^': return "(" + to_text(n.kids[0]) + ")^" + std::to_string(n.exponent);
    default: return "(" + to_text(n.kids[0]) + " " + std::string(1, n.op) + " " + to_text(n.kids[1]) + ")";
  }
}

// Empty when a division by zero occurs along the way.
inline std::optional<Rational> eval_node(const RNode& n, const std::map<std::string, Rational>& at) {
  switch (n.op) {
    case 'c': return n.value;
    case 's': return at.at(n.name);
    case 'n': {
      auto v = eval_node(n.kids[0], at);
      if (!v) return std::nullopt;
      return Rational(-*v);
    }
    case '^': {
      auto v = eval_node(n.kids[0], at);
      if (!v) return std::nullopt;
      Rational r = 1;
      for (int i = 0; i < n.exponent; ++i) r *= *v;
      return r;
    }
    default: break;
  }
  auto a = eval_node(n.kids[0], at);
  auto b = eval_node(n.kids[1], at);
  if (!a || !b) return std::nullopt;
  switch (n.op) {
    case '+': return Rational(*a + *b);
    case '-': return Rational(*a - *b);
    case '*': return Rational(*a * *b);
    default:
      if (*b == 0) return std::nullopt;
      return Rational(*a / *b);
  }
}

// Builds the expression through the arithmetic API rather than the parser.
inline std::optional<hamform::sym::Expr> build_node(const RNode& n) {
  using hamform::sym::Expr;
  switch (n.op) {
    case 'c': return Expr(n.value);
    case 's': return Expr::symbol(n.name);
    case 'n': {
      auto v = build_node(n.kids[0]);
      if (!v) return std::nullopt;
      return -*v;
    }
    case '^': {
      auto v = build_node(n.kids[0]);
      if (!v) return std::nullopt;
      return v->pow(n.exponent);
    }
    default: break;
  }
  auto a = build_node(n.kids[0]);
  auto b = build_node(n.kids[1]);
  if (!a || !b) return std::nullopt;
  switch (n.op) {
    case '+': return *a + *b;
    case '-': return *a - *b;
    case '*': return *a * *b;
    default:
      if (b->is_zero()) return std::nullopt;
      return *a / *b;
  }
}

}  // namespace testing_support
