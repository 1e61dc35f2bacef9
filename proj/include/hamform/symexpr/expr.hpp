#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "hamform/symexpr/poly.hpp"

namespace hamform::sym {

/// Named scalar variable. The name must be an identifier.
class Symbol {
 public:
  explicit Symbol(std::string name);
  const std::string& name() const { return name_; }
  friend bool operator==(const Symbol& a, const Symbol& b) { return a.name_ == b.name_; }
  friend bool operator<(const Symbol& a, const Symbol& b) { return a.name_ < b.name_; }

 private:
  std::string name_;
};

bool is_identifier(std::string_view s);

using Bindings = std::map<std::string, class Expr>;

/// Exact rational function in symbols and function atoms, held as
/// numerator / denominator with gcd one and a monic denominator. Two values
/// are equal exactly when their difference normalizes to zero.
class Expr {
 public:
  Expr() = default;
  Expr(long v);  // NOLINT(google-explicit-constructor)
  Expr(Rational v);  // NOLINT(google-explicit-constructor)
  Expr(const Symbol& s);  // NOLINT(google-explicit-constructor)
  static Expr symbol(const std::string& name);
  static Expr apply(Func f, const Expr& arg);
  static Expr from_poly(Poly num, Poly den = Poly(Rational(1)));

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const;  // requires is_constant()
  bool is_polynomial() const { return den_.is_constant(); }

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }
  Expr pow(long n) const;

  friend bool operator==(const Expr& a, const Expr& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  /// Symbols occurring anywhere, including inside function arguments.
  std::set<std::string> free_symbols() const;
  bool depends_on(const std::string& name) const;

  std::string str() const;

 private:
  void normalize();
  Poly num_{};
  Poly den_{Rational(1)};
};

std::ostream& operator<<(std::ostream& os, const Expr& e);

Expr differentiate(const Expr& e, const std::string& name);
inline Expr differentiate(const Expr& e, const Symbol& s) { return differentiate(e, s.name()); }

/// Simultaneous substitution; results of bindings are not substituted again.
Expr substitute(const Expr& e, const Bindings& bindings);

inline bool equals_zero(const Expr& e) { return e.is_zero(); }
inline Expr canonicalize(const Expr& e) { return e; }

/// Exact evaluation; every symbol must be bound and no function atom may occur.
Rational evaluate(const Expr& e, const std::map<std::string, Rational>& point);

/// The numerator scaled to integer coefficients with unit content and a
/// positive leading coefficient. Used to present "expr = 0" constraints.
Expr constraint_normal_form(const Expr& e);

/// True when a / b is a nonzero constant.
bool proportional(const Expr& a, const Expr& b);

Rational parse_rational(std::string_view text);
std::string rational_str(const Rational& r);
double to_double(const Rational& r);

}  // namespace hamform::sym
