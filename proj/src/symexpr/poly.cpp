#include "hamform/symexpr/poly.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "hamform/symexpr/expr.hpp"

namespace hamform::sym {

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Sqrt: return "sqrt";
    case Func::Ln: return "ln";
  }
  return "?";
}

std::optional<Func> func_from_name(const std::string& name) {
  if (name == "sin") return Func::Sin;
  if (name == "cos") return Func::Cos;
  if (name == "exp") return Func::Exp;
  if (name == "sqrt") return Func::Sqrt;
  if (name == "ln") return Func::Ln;
  return std::nullopt;
}

struct Atom::Data {
  Func func;
  Expr arg;
};

Atom Atom::symbol(std::string name) {
  Atom a;
  a.key_ = std::make_shared<const std::string>(std::move(name));
  return a;
}

Atom Atom::apply(Func f, const Expr& arg) {
  Atom a;
  a.key_ = std::make_shared<const std::string>(std::string(func_name(f)) + "(" + arg.str() + ")");
  a.data_ = std::make_shared<const Data>(Data{f, arg});
  return a;
}

Func Atom::func() const {
  assert(data_);
  return data_->func;
}

const Expr& Atom::arg() const {
  assert(data_);
  return data_->arg;
}

int compare_monomials(const Monomial& a, const Monomial& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const int c = a[i].first.key().compare(b[j].first.key());
    if (c < 0) return 1;
    if (c > 0) return -1;
    if (a[i].second != b[j].second) return a[i].second > b[j].second ? 1 : -1;
    ++i;
    ++j;
  }
  if (i < a.size()) return 1;
  if (j < b.size()) return -1;
  return 0;
}

Monomial mul_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first.key() < b[j].first.key())) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first.key() < a[i].first.key()) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

int total_degree(const Monomial& m) {
  int d = 0;
  for (const auto& [atom, e] : m) d += e;
  return d;
}

Poly::Poly(Rational c) {
  if (c != 0) terms_.push_back(Term{{}, std::move(c)});
}

Poly Poly::atom(const Atom& a, int exponent) {
  Poly p;
  p.terms_.push_back(Term{{{a, exponent}}, Rational(1)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return compare_monomials(x.mono, y.mono) > 0; });
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && compare_monomials(p.terms_.back().mono, t.mono) == 0) {
      p.terms_.back().coef += t.coef;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coef == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coef == 0) p.terms_.pop_back();
  return p;
}

Rational Poly::constant_value() const {
  assert(is_constant());
  return terms_.empty() ? Rational(0) : terms_[0].coef;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coef = -t.coef;
  return p;
}

namespace {

Poly merge(const Poly& a, const Poly& b, bool subtract) {
  std::vector<Term> out;
  const auto& x = a.terms();
  const auto& y = b.terms();
  out.reserve(x.size() + y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() || j < y.size()) {
    int c;
    if (i == x.size()) {
      c = -1;
    } else if (j == y.size()) {
      c = 1;
    } else {
      c = compare_monomials(x[i].mono, y[j].mono);
    }
    if (c > 0) {
      out.push_back(x[i++]);
    } else if (c < 0) {
      out.push_back(y[j++]);
      if (subtract) out.back().coef = -out.back().coef;
    } else {
      Rational s = subtract ? Rational(x[i].coef - y[j].coef) : Rational(x[i].coef + y[j].coef);
      if (s != 0) out.push_back(Term{x[i].mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  // Already ordered and merged.
  Poly p;
  if (out.empty()) return p;
  return Poly::from_terms(std::move(out));
}

}  // namespace

Poly operator+(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return merge(a, b, false);
}

Poly operator-(const Poly& a, const Poly& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return merge(a, b, true);
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.is_constant()) return b.scaled(a.constant_value());
  if (b.is_constant()) return a.scaled(b.constant_value());
  std::vector<Term> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& s : a.terms()) {
    for (const auto& t : b.terms()) {
      out.push_back(Term{mul_monomials(s.mono, t.mono), s.coef * t.coef});
    }
  }
  return Poly::from_terms(std::move(out));
}

Poly Poly::scaled(const Rational& c) const {
  if (c == 0) return Poly();
  Poly p = *this;
  for (auto& t : p.terms_) t.coef *= c;
  return p;
}

Poly Poly::times_monomial(const Monomial& m, const Rational& c) const {
  if (c == 0) return Poly();
  Poly p;
  p.terms_.reserve(terms_.size());
  // Multiplying by a monomial preserves the term order.
  for (const auto& t : terms_) p.terms_.push_back(Term{mul_monomials(t.mono, m), t.coef * c});
  return p;
}

Poly Poly::pow(unsigned n) const {
  Poly result(Rational(1));
  Poly base = *this;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].coef != b.terms_[i].coef) return false;
    if (compare_monomials(a.terms_[i].mono, b.terms_[i].mono) != 0) return false;
  }
  return true;
}

int Poly::degree_in(const Atom& v) const {
  int d = 0;
  for (const auto& t : terms_) {
    for (const auto& [a, e] : t.mono) {
      if (a == v) d = std::max(d, e);
    }
  }
  return d;
}

std::vector<Poly> Poly::coefficients_in(const Atom& v) const {
  std::vector<std::vector<Term>> buckets(static_cast<std::size_t>(degree_in(v)) + 1);
  for (const auto& t : terms_) {
    Monomial rest;
    int e = 0;
    for (const auto& f : t.mono) {
      if (f.first == v) {
        e = f.second;
      } else {
        rest.push_back(f);
      }
    }
    buckets[static_cast<std::size_t>(e)].push_back(Term{std::move(rest), t.coef});
  }
  std::vector<Poly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(Poly::from_terms(std::move(b)));
  return out;
}

Poly Poly::from_coefficients(const std::vector<Poly>& coeffs, const Atom& v) {
  Poly out;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k].is_zero()) continue;
    if (k == 0) {
      out = out + coeffs[k];
    } else {
      out = out + coeffs[k].times_monomial({{v, static_cast<int>(k)}}, Rational(1));
    }
  }
  return out;
}

std::vector<Atom> Poly::atoms() const {
  std::vector<Atom> out;
  for (const auto& t : terms_) {
    for (const auto& f : t.mono) out.push_back(f.first);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  const Rational lc = lead().coef;
  if (lc == 1) return *this;
  return scaled(Rational(1) / lc);
}

namespace {

std::optional<Monomial> divide_monomial(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t j = 0;
  for (const auto& [atom, e] : a) {
    if (j < b.size() && b[j].first.key() < atom.key()) return std::nullopt;
    if (j < b.size() && b[j].first == atom) {
      if (b[j].second > e) return std::nullopt;
      if (b[j].second < e) out.emplace_back(atom, e - b[j].second);
      ++j;
    } else {
      out.emplace_back(atom, e);
    }
  }
  if (j != b.size()) return std::nullopt;
  return out;
}

}  // namespace

std::optional<Poly> try_divide(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (b.is_constant()) return a.scaled(Rational(1) / b.constant_value());
  std::vector<Term> quotient;
  Poly rem = a;
  while (!rem.is_zero()) {
    auto m = divide_monomial(rem.lead().mono, b.lead().mono);
    if (!m) return std::nullopt;
    Rational c = rem.lead().coef / b.lead().coef;
    rem = rem - b.times_monomial(*m, c);
    quotient.push_back(Term{std::move(*m), std::move(c)});
  }
  return Poly::from_terms(std::move(quotient));
}

Poly divide_exact(const Poly& a, const Poly& b) {
  auto q = try_divide(a, b);
  if (!q) throw std::logic_error("inexact polynomial division");
  return *q;
}

namespace {

Poly monomial_gcd(const Poly& single, const Poly& other) {
  Monomial m = single.lead().mono;
  for (const auto& t : other.terms()) {
    Monomial next;
    std::size_t j = 0;
    for (const auto& [atom, e] : m) {
      while (j < t.mono.size() && t.mono[j].first.key() < atom.key()) ++j;
      if (j < t.mono.size() && t.mono[j].first == atom) next.emplace_back(atom, std::min(e, t.mono[j].second));
    }
    m = std::move(next);
    if (m.empty()) break;
  }
  return Poly::from_terms({Term{std::move(m), Rational(1)}});
}

Poly content_in(const Poly& p, const Atom& v) {
  Poly g;
  for (const auto& c : p.coefficients_in(v)) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) return Poly(Rational(1));
  }
  return g;
}

Poly primitive_part(const Poly& p, const Atom& v) {
  const Poly c = content_in(p, v);
  return c.is_constant() ? p.monic() : divide_exact(p, c);
}

Poly lead_coefficient(const Poly& p, const Atom& v) { return p.coefficients_in(v).back(); }

Poly pseudo_remainder(const Poly& a, const Poly& b, const Atom& v) {
  const int db = b.degree_in(v);
  const Poly lcb = lead_coefficient(b, v);
  Poly r = a;
  while (!r.is_zero()) {
    const int dr = r.degree_in(v);
    if (dr < db) break;
    const Poly lcr = lead_coefficient(r, v);
    Poly shifted = dr > db ? b.times_monomial({{v, dr - db}}, Rational(1)) : b;
    r = lcb * r - lcr * shifted;
  }
  return r;
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly(Rational(1));
  if (a.terms().size() == 1) return monomial_gcd(a, b);
  if (b.terms().size() == 1) return monomial_gcd(b, a);
  if (try_divide(a, b)) return b.monic();
  if (try_divide(b, a)) return a.monic();

  // Main variable: the most significant atom present in either polynomial.
  const auto atoms_a = a.atoms();
  const auto atoms_b = b.atoms();
  const Atom v = std::min(atoms_a.front(), atoms_b.front());

  if (a.degree_in(v) == 0) return gcd(a, content_in(b, v));
  if (b.degree_in(v) == 0) return gcd(content_in(a, v), b);

  const Poly ca = content_in(a, v);
  const Poly cb = content_in(b, v);
  Poly pa = ca.is_constant() ? a : divide_exact(a, ca);
  Poly pb = cb.is_constant() ? b : divide_exact(b, cb);
  const Poly c = gcd(ca, cb);

  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  while (!pb.is_zero()) {
    Poly r = pseudo_remainder(pa, pb, v);
    pa = pb;
    if (r.is_zero()) break;
    if (r.degree_in(v) == 0) {
      pa = Poly(Rational(1));
      break;
    }
    pb = primitive_part(r, v);
  }
  const Poly g = pa.is_constant() ? Poly(Rational(1)) : primitive_part(pa, v);
  return (c * g).monic();
}

}  // namespace hamform::sym
