#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hamform/symexpr/expr.hpp"

namespace hamform::sym {

/// Parse tree shared by the scalar and the differential-form grammars.
struct Ast {
  enum class Kind { Number, Ident, Neg, Add, Sub, Mul, Div, Pow, Wedge, Call };
  Kind kind = Kind::Number;
  Rational value;      // Number
  std::string name;    // Ident, Call
  std::vector<Ast> args;
  std::size_t offset = 0;
};

/// Grammar, loosest first: + -, * / (and /\ for forms), unary -, ^ (right
/// associative, exponent may carry a sign), then numbers, identifiers,
/// calls and parentheses. The wedge token is accepted only when allow_wedge.
Ast parse_ast(std::string_view text, bool allow_wedge = false);

using NameSet = std::set<std::string>;

/// Builds an Expr from a tree. Identifiers must be in known; calls must name
/// sin, cos, exp, sqrt or ln; exponents must be integer constants.
Expr build_expr(const Ast& ast, const NameSet& known);

/// Parse a scalar expression over the given names.
Expr parse_expr(std::string_view text, const NameSet& known);

/// Parse with any identifier accepted as a symbol.
Expr parse_expr(std::string_view text);

/// Integer exponent carried by a Pow node; throws SyntaxError otherwise.
long ast_integer_exponent(const Ast& exponent, const NameSet& known);

}  // namespace hamform::sym
