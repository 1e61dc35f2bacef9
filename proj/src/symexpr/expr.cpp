#include "hamform/symexpr/expr.hpp"

#include <cctype>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "hamform/errors.hpp"

namespace hamform::sym {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

Symbol::Symbol(std::string name) : name_(std::move(name)) {
  if (!is_identifier(name_)) throw SyntaxError("invalid symbol name '" + name_ + "'", 0);
}

Expr::Expr(long v) : num_(Rational(v)) {}
Expr::Expr(Rational v) : num_(std::move(v)) {}
Expr::Expr(const Symbol& s) : num_(Poly::atom(Atom::symbol(s.name()))) {}

Expr Expr::symbol(const std::string& name) { return Expr(Symbol(name)); }

Expr Expr::apply(Func f, const Expr& arg) {
  // A few exact simplifications at zero keep constant folding honest.
  if (arg.is_zero()) {
    switch (f) {
      case Func::Sin:
      case Func::Sqrt: return Expr(0L);
      case Func::Cos:
      case Func::Exp: return Expr(1L);
      case Func::Ln: throw DomainError("ln(0)");
    }
  }
  if (f == Func::Ln && arg.is_constant() && arg.constant_value() == 1) return Expr(0L);
  Expr e;
  e.num_ = Poly::atom(Atom::apply(f, arg));
  return e;
}

Expr Expr::from_poly(Poly num, Poly den) {
  if (den.is_zero()) throw DomainError("division by zero");
  Expr e;
  e.num_ = std::move(num);
  e.den_ = std::move(den);
  e.normalize();
  return e;
}

void Expr::normalize() {
  if (num_.is_zero()) {
    den_ = Poly(Rational(1));
    return;
  }
  if (den_.is_constant()) {
    const Rational c = den_.constant_value();
    if (c != 1) {
      num_ = num_.scaled(Rational(1) / c);
      den_ = Poly(Rational(1));
    }
    return;
  }
  const Poly g = gcd(num_, den_);
  if (!g.is_constant()) {
    num_ = divide_exact(num_, g);
    den_ = divide_exact(den_, g);
  }
  const Rational lc = den_.lead().coef;
  if (lc != 1) {
    num_ = num_.scaled(Rational(1) / lc);
    den_ = den_.scaled(Rational(1) / lc);
  }
  if (den_.is_constant()) den_ = Poly(Rational(1));
}

Rational Expr::constant_value() const {
  if (!is_constant()) throw DomainError("expression is not constant: " + str());
  return num_.constant_value() / den_.constant_value();
}

Expr Expr::operator-() const {
  Expr e = *this;
  e.num_ = -e.num_;
  return e;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_polynomial() && b.is_polynomial()) {
    Expr e;
    e.num_ = a.num_ + b.num_;
    return e;
  }
  if (a.den_ == b.den_) return Expr::from_poly(a.num_ + b.num_, a.den_);
  const Poly g = gcd(a.den_, b.den_);
  if (g.is_constant()) return Expr::from_poly(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  const Poly ca = divide_exact(b.den_, g);
  const Poly cb = divide_exact(a.den_, g);
  return Expr::from_poly(a.num_ * ca + b.num_ * cb, a.den_ * ca);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_polynomial() && b.is_polynomial()) {
    Expr e;
    e.num_ = a.num_ * b.num_;
    return e;
  }
  Poly an = a.num_;
  Poly ad = a.den_;
  Poly bn = b.num_;
  Poly bd = b.den_;
  const Poly g1 = gcd(an, bd);
  if (!g1.is_constant()) {
    an = divide_exact(an, g1);
    bd = divide_exact(bd, g1);
  }
  const Poly g2 = gcd(bn, ad);
  if (!g2.is_constant()) {
    bn = divide_exact(bn, g2);
    ad = divide_exact(ad, g2);
  }
  Expr e;
  e.num_ = an * bn;
  e.den_ = ad * bd;
  const Rational lc = e.den_.lead().coef;
  if (lc != 1) {
    e.num_ = e.num_.scaled(Rational(1) / lc);
    e.den_ = e.den_.scaled(Rational(1) / lc);
  }
  if (e.den_.is_constant()) e.den_ = Poly(Rational(1));
  return e;
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  Expr inv;
  inv.num_ = b.den_;
  inv.den_ = b.num_;
  const Rational lc = inv.den_.lead().coef;
  if (lc != 1) {
    inv.num_ = inv.num_.scaled(Rational(1) / lc);
    inv.den_ = inv.den_.scaled(Rational(1) / lc);
  }
  if (inv.den_.is_constant()) inv.den_ = Poly(Rational(1));
  return a * inv;
}

Expr Expr::pow(long n) const {
  if (n == 0) return Expr(1L);
  if (n < 0) {
    if (is_zero()) throw DomainError("zero raised to a negative power");
    return Expr(1L) / pow(-n);
  }
  Expr e;
  e.num_ = num_.pow(static_cast<unsigned>(n));
  e.den_ = den_.pow(static_cast<unsigned>(n));
  return e;
}

namespace {

void collect_symbols(const Poly& p, std::set<std::string>& out) {
  for (const auto& a : p.atoms()) {
    if (a.is_symbol()) {
      out.insert(a.key());
    } else {
      const auto inner = a.arg().free_symbols();
      out.insert(inner.begin(), inner.end());
    }
  }
}

}  // namespace

std::set<std::string> Expr::free_symbols() const {
  std::set<std::string> out;
  collect_symbols(num_, out);
  collect_symbols(den_, out);
  return out;
}

bool Expr::depends_on(const std::string& name) const { return free_symbols().count(name) > 0; }

std::string rational_str(const Rational& r) { return r.get_str(); }

double to_double(const Rational& r) { return r.get_d(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw SyntaxError("empty rational", 0);
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  const std::string body = s.substr(i);
  Rational r;
  const auto slash = body.find('/');
  const auto dot = body.find('.');
  auto all_digits = [](const std::string& t) {
    if (t.empty()) return false;
    for (char c : t) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  if (slash != std::string::npos) {
    const std::string n = body.substr(0, slash);
    const std::string d = body.substr(slash + 1);
    if (!all_digits(n) || !all_digits(d)) throw SyntaxError("malformed rational '" + s + "'", 0);
    mpz_class den(d);
    if (den == 0) throw DomainError("zero denominator in '" + s + "'");
    r = Rational(mpz_class(n), den);
    r.canonicalize();
  } else if (dot != std::string::npos) {
    const std::string ip = body.substr(0, dot);
    const std::string fp = body.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty())) {
      throw SyntaxError("malformed rational '" + s + "'", 0);
    }
    mpz_class scale = 1;
    for (std::size_t k = 0; k < fp.size(); ++k) scale *= 10;
    r = Rational(mpz_class((ip.empty() ? "0" : ip) + fp), scale);
    r.canonicalize();
  } else {
    if (!all_digits(body)) throw SyntaxError("malformed rational '" + s + "'", 0);
    r = Rational(mpz_class(body));
  }
  return neg ? Rational(-r) : r;
}

// ---------------------------------------------------------------- rendering

namespace {

std::string atom_power_str(const Atom& a, int e) {
  std::string s = a.key();
  if (e != 1) s += "^" + std::to_string(e);
  return s;
}

std::string render_poly(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    const bool neg = sgn(t.coef) < 0;
    const Rational mag = abs(t.coef);
    std::string body;
    if (t.mono.empty()) {
      body = rational_str(mag);
    } else {
      std::string factors;
      for (const auto& [a, e] : t.mono) {
        if (!factors.empty()) factors += "*";
        factors += atom_power_str(a, e);
      }
      body = mag == 1 ? factors : rational_str(mag) + "*" + factors;
    }
    if (first) {
      out = neg ? "-" + body : body;
      first = false;
    } else {
      out += neg ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

// Positive rational c with p / c having coprime integer coefficients.
Rational poly_content(const Poly& p) {
  mpz_class g = 0;
  mpz_class l = 1;
  for (const auto& t : p.terms()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
  }
  if (g == 0) return Rational(1);
  Rational c(g, l);
  c.canonicalize();
  return c;
}

}  // namespace

std::string Expr::str() const {
  if (is_polynomial()) return render_poly(num_);
  const Rational c = poly_content(den_);
  Poly d = den_.scaled(Rational(1) / c);
  Poly n = num_.scaled(Rational(1) / c);
  mpz_class l = 1;
  for (const auto& t : n.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
  if (l != 1) {
    n = n.scaled(Rational(l));
    d = d.scaled(Rational(l));
  }
  std::string ns = render_poly(n);
  std::string ds = render_poly(d);
  if (n.terms().size() > 1) ns = "(" + ns + ")";
  const bool bare = d.terms().size() == 1 &&
                    (d.lead().mono.empty() || (d.lead().coef == 1 && d.lead().mono.size() == 1));
  if (!bare) ds = "(" + ds + ")";
  return ns + "/" + ds;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

// ---------------------------------------------------------------- calculus

namespace {

Expr atom_derivative(const Atom& a, const std::string& name) {
  if (a.is_symbol()) return a.key() == name ? Expr(1L) : Expr();
  const Expr& g = a.arg();
  const Expr dg = differentiate(g, name);
  if (dg.is_zero()) return Expr();
  switch (a.func()) {
    case Func::Sin: return Expr::apply(Func::Cos, g) * dg;
    case Func::Cos: return -(Expr::apply(Func::Sin, g) * dg);
    case Func::Exp: return Expr::apply(Func::Exp, g) * dg;
    case Func::Sqrt: return dg / (Expr(2L) * Expr::apply(Func::Sqrt, g));
    case Func::Ln: return dg / g;
  }
  return Expr();
}

Expr monomial_expr(const Monomial& m, const Rational& c) {
  return Expr::from_poly(Poly::from_terms({Term{m, c}}));
}

Expr poly_derivative(const Poly& p, const std::string& name) {
  std::vector<Term> direct;
  Expr rest;
  std::unordered_map<std::string, Expr> cache;
  for (const auto& t : p.terms()) {
    for (std::size_t j = 0; j < t.mono.size(); ++j) {
      const auto& [a, e] = t.mono[j];
      Monomial reduced_mono = t.mono;
      if (e == 1) {
        reduced_mono.erase(reduced_mono.begin() + static_cast<std::ptrdiff_t>(j));
      } else {
        reduced_mono[j].second = e - 1;
      }
      const Rational c = t.coef * e;
      if (a.is_symbol()) {
        if (a.key() == name) direct.push_back(Term{std::move(reduced_mono), c});
        continue;
      }
      auto it = cache.find(a.key());
      if (it == cache.end()) it = cache.emplace(a.key(), atom_derivative(a, name)).first;
      if (it->second.is_zero()) continue;
      rest += monomial_expr(reduced_mono, c) * it->second;
    }
  }
  return Expr::from_poly(Poly::from_terms(std::move(direct))) + rest;
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& name) {
  const Expr dn = poly_derivative(e.num(), name);
  if (e.is_polynomial()) return dn;
  const Expr dd = poly_derivative(e.den(), name);
  const Expr n = Expr::from_poly(e.num());
  const Expr d = Expr::from_poly(e.den());
  if (dd.is_zero()) return dn / d;
  return (dn * d - n * dd) / (d * d);
}

namespace {

class Substituter {
 public:
  explicit Substituter(const Bindings& b) : bindings_(b) {}

  Expr poly(const Poly& p) {
    if (!touched(p)) return Expr::from_poly(p);
    Expr out;
    for (const auto& t : p.terms()) {
      Expr term(t.coef);
      for (const auto& [a, e] : t.mono) term *= atom(a).pow(e);
      out += term;
    }
    return out;
  }

  const Expr& atom(const Atom& a) {
    auto it = cache_.find(a.key());
    if (it != cache_.end()) return it->second;
    Expr v;
    if (a.is_symbol()) {
      auto b = bindings_.find(a.key());
      v = b != bindings_.end() ? b->second : Expr::symbol(a.key());
    } else {
      v = Expr::apply(a.func(), substitute(a.arg(), bindings_));
    }
    return cache_.emplace(a.key(), std::move(v)).first->second;
  }

 private:
  bool touched(const Poly& p) const {
    for (const auto& a : p.atoms()) {
      if (!a.is_symbol()) return true;
      if (bindings_.count(a.key()) != 0) return true;
    }
    return false;
  }

  const Bindings& bindings_;
  std::unordered_map<std::string, Expr> cache_;
};

}  // namespace

Expr substitute(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  Substituter s(bindings);
  const Expr n = s.poly(e.num());
  if (e.is_polynomial()) return n;
  return n / s.poly(e.den());
}

namespace {

Rational eval_poly(const Poly& p, const std::map<std::string, Rational>& point) {
  Rational sum = 0;
  for (const auto& t : p.terms()) {
    Rational v = t.coef;
    for (const auto& [a, e] : t.mono) {
      if (!a.is_symbol()) throw DomainError("cannot evaluate " + a.key() + " exactly");
      auto it = point.find(a.key());
      if (it == point.end()) throw DomainError("unbound symbol '" + a.key() + "'");
      Rational pw = 1;
      for (int k = 0; k < e; ++k) pw *= it->second;
      v *= pw;
    }
    sum += v;
  }
  return sum;
}

}  // namespace

Rational evaluate(const Expr& e, const std::map<std::string, Rational>& point) {
  const Rational d = eval_poly(e.den(), point);
  if (d == 0) throw DomainError("denominator vanishes at evaluation point");
  return eval_poly(e.num(), point) / d;
}

Expr constraint_normal_form(const Expr& e) {
  Poly n = e.num();
  if (n.is_zero()) return Expr();
  const Rational c = poly_content(n);
  n = n.scaled(Rational(1) / c);
  if (sgn(n.lead().coef) < 0) n = -n;
  return Expr::from_poly(std::move(n));
}

bool proportional(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  return (a / b).is_constant();
}

}  // namespace hamform::sym
