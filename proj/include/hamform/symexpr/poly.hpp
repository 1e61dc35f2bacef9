#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hamform::sym {

using Rational = mpq_class;

class Expr;

enum class Func { Sin, Cos, Exp, Sqrt, Ln };

const char* func_name(Func f);
std::optional<Func> func_from_name(const std::string& name);

/// A polynomial variable: either a named symbol or an elementary function
/// applied to a canonical expression. Atoms are ordered and compared by key,
/// which is the symbol name or the canonical rendering "f(arg)".
class Atom {
 public:
  static Atom symbol(std::string name);
  static Atom apply(Func f, const Expr& arg);

  const std::string& key() const { return *key_; }
  bool is_symbol() const { return !data_; }
  Func func() const;
  const Expr& arg() const;

  friend bool operator==(const Atom& a, const Atom& b) { return a.key() == b.key(); }
  friend bool operator<(const Atom& a, const Atom& b) { return a.key() < b.key(); }

 private:
  struct Data;
  std::shared_ptr<const std::string> key_;
  std::shared_ptr<const Data> data_;
};

/// Power product with atoms sorted by key, exponents strictly positive.
using Monomial = std::vector<std::pair<Atom, int>>;

/// Lex comparison with the lexicographically smaller atom name being the
/// more significant variable. Returns >0 when a precedes b.
int compare_monomials(const Monomial& a, const Monomial& b);
Monomial mul_monomials(const Monomial& a, const Monomial& b);
int total_degree(const Monomial& m);

struct Term {
  Monomial mono;
  Rational coef;
};

/// Sparse multivariate polynomial over Q. Terms are kept in strictly
/// decreasing monomial order with nonzero coefficients.
class Poly {
 public:
  Poly() = default;
  explicit Poly(Rational c);
  static Poly atom(const Atom& a, int exponent = 1);
  static Poly from_terms(std::vector<Term> terms);  // any order, merges duplicates

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty()); }
  Rational constant_value() const;  // requires is_constant()
  const Term& lead() const { return terms_.front(); }

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Rational& c) const;
  Poly times_monomial(const Monomial& m, const Rational& c) const;
  Poly pow(unsigned n) const;

  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  int degree_in(const Atom& v) const;
  /// Coefficients of v^0..v^deg; each coefficient is free of v.
  std::vector<Poly> coefficients_in(const Atom& v) const;
  static Poly from_coefficients(const std::vector<Poly>& coeffs, const Atom& v);

  std::vector<Atom> atoms() const;  // sorted, unique
  Poly monic() const;               // leading coefficient scaled to one

 private:
  std::vector<Term> terms_;
};

std::optional<Poly> try_divide(const Poly& a, const Poly& b);
Poly divide_exact(const Poly& a, const Poly& b);
/// Monic greatest common divisor over Q.
Poly gcd(const Poly& a, const Poly& b);

}  // namespace hamform::sym
