#include "hamform/cartan/form.hpp"

#include <algorithm>
#include <ostream>

#include "hamform/errors.hpp"

namespace hamform::cartan {

namespace {

void require_same(const ChartPtr& a, const ChartPtr& b, const char* op) {
  if (!same_chart(a, b)) throw ChartMismatch(std::string(op) + ": operands live on different charts");
}

// Sorts idx in place; returns the permutation sign, or 0 on a repeated index.
int sort_with_sign(DiffForm::Index& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] == idx[i - 1]) return 0;
  }
  return sign;
}

}  // namespace

DiffForm::DiffForm(ChartPtr chart, int degree) : chart_(std::move(chart)), degree_(degree) {
  if (!chart_) throw ChartMismatch("form without a chart");
  if (degree < 0) throw DimensionMismatch("negative form degree");
}

DiffForm DiffForm::scalar(ChartPtr chart, const Expr& f) {
  DiffForm w(std::move(chart), 0);
  if (!f.is_zero()) w.terms_.emplace(Index{}, f);
  return w;
}

DiffForm DiffForm::differential(ChartPtr chart, const std::string& name) {
  const int i = static_cast<int>(chart->index(name));
  DiffForm w(std::move(chart), 1);
  w.terms_.emplace(Index{i}, Expr(1L));
  return w;
}

void DiffForm::add_term(Index idx, const Expr& c) {
  if (static_cast<int>(idx.size()) != degree_) throw DimensionMismatch("term degree does not match form degree");
  for (int i : idx) {
    if (i < 0 || static_cast<std::size_t>(i) >= chart_->dim()) throw ChartMismatch("coordinate index out of range");
  }
  if (c.is_zero()) return;
  const int sign = sort_with_sign(idx);
  if (sign == 0) return;
  auto it = terms_.find(idx);
  const Expr v = sign > 0 ? c : -c;
  if (it == terms_.end()) {
    terms_.emplace(std::move(idx), v);
  } else {
    it->second += v;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Expr DiffForm::coefficient(const Index& sorted) const {
  auto it = terms_.find(sorted);
  return it == terms_.end() ? Expr() : it->second;
}

Expr DiffForm::coefficient(const std::vector<std::string>& names) const {
  Index idx;
  for (const auto& n : names) idx.push_back(static_cast<int>(chart_->index(n)));
  const int sign = sort_with_sign(idx);
  if (sign == 0) return Expr();
  const Expr c = coefficient(idx);
  return sign > 0 ? c : -c;
}

Expr DiffForm::value() const {
  if (degree_ != 0) throw DimensionMismatch("value() of a form of positive degree");
  return coefficient(Index{});
}

DiffForm DiffForm::operator-() const {
  DiffForm w = *this;
  for (auto& [idx, c] : w.terms_) c = -c;
  return w;
}

DiffForm operator+(const DiffForm& a, const DiffForm& b) {
  require_same(a.chart_, b.chart_, "sum");
  if (a.degree_ != b.degree_) {
    // A zero form of the wrong degree is still the additive identity.
    if (b.is_zero()) return a;
    if (a.is_zero()) return b;
    throw DimensionMismatch("sum of forms of different degree");
  }
  DiffForm w = a;
  for (const auto& [idx, c] : b.terms_) {
    auto it = w.terms_.find(idx);
    if (it == w.terms_.end()) {
      w.terms_.emplace(idx, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) w.terms_.erase(it);
    }
  }
  return w;
}

DiffForm operator-(const DiffForm& a, const DiffForm& b) { return a + (-b); }

DiffForm operator*(const Expr& f, const DiffForm& a) {
  DiffForm w(a.chart_, a.degree_);
  if (f.is_zero()) return w;
  for (const auto& [idx, c] : a.terms_) {
    Expr v = f * c;
    if (!v.is_zero()) w.terms_.emplace(idx, std::move(v));
  }
  return w;
}

DiffForm DiffForm::map_coefficients(const sym::Bindings& b) const {
  DiffForm w(chart_, degree_);
  for (const auto& [idx, c] : terms_) {
    Expr v = sym::substitute(c, b);
    if (!v.is_zero()) w.terms_.emplace(idx, std::move(v));
  }
  return w;
}

bool operator==(const DiffForm& a, const DiffForm& b) {
  if (!same_chart(a.chart_, b.chart_)) return false;
  if (a.is_zero() && b.is_zero()) return true;
  return a.degree_ == b.degree_ && a.terms_ == b.terms_;
}

std::string DiffForm::str() const {
  if (terms_.empty()) return "0";
  if (degree_ == 0) return terms_.begin()->second.str();
  std::string out;
  bool first = true;
  for (const auto& [idx, c] : terms_) {
    std::string basis;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k > 0) basis += "/\\";
      basis += "d(" + chart_->name(static_cast<std::size_t>(idx[k])) + ")";
    }
    // A single-term numerator carries its sign into the joining operator.
    const bool simple = c.num().terms().size() == 1;
    const bool neg = simple && sgn(c.num().lead().coef) < 0;
    const Expr mag = neg ? -c : c;
    std::string coef;
    if (mag == Expr(1L)) {
      coef = "";
    } else if (simple || !mag.is_polynomial()) {
      coef = mag.str() + "*";
    } else {
      coef = "(" + mag.str() + ")*";
    }
    if (first) {
      out = (neg ? "-" : "") + coef + basis;
      first = false;
    } else {
      out += (neg ? " - " : " + ") + coef + basis;
    }
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const DiffForm& f) { return os << f.str(); }

VectorField::VectorField(ChartPtr chart, std::map<std::string, Expr> components)
    : chart_(std::move(chart)) {
  for (auto& [name, e] : components) {
    chart_->index(name);
    if (!e.is_zero()) components_.emplace(name, std::move(e));
  }
}

VectorField VectorField::coordinate(ChartPtr chart, const std::string& name) {
  return VectorField(std::move(chart), {{name, Expr(1L)}});
}

Expr VectorField::component(std::size_t i) const {
  auto it = components_.find(chart_->name(i));
  return it == components_.end() ? Expr() : it->second;
}

ChartMap::ChartMap(ChartPtr source, ChartPtr target, std::map<std::string, Expr> assignment)
    : source_(std::move(source)), target_(std::move(target)), assignment_(std::move(assignment)) {
  for (const auto& c : target_->coords()) {
    if (assignment_.count(c.name) == 0) throw ChartMismatch("map leaves target coordinate '" + c.name + "' unassigned");
  }
  const auto known = source_->known_names();
  for (const auto& [name, e] : assignment_) {
    if (!target_->has(name)) throw ChartMismatch("map assigns '" + name + "', which is not a target coordinate");
    for (const auto& s : e.free_symbols()) {
      if (known.count(s) == 0) throw ChartMismatch("image of '" + name + "' uses '" + s + "', unknown on the source");
    }
  }
}

ChartMap ChartMap::identity(ChartPtr chart) {
  std::map<std::string, Expr> a;
  for (const auto& c : chart->coords()) a.emplace(c.name, Expr::symbol(c.name));
  return ChartMap(chart, chart, std::move(a));
}

ChartMap ChartMap::embedding(ChartPtr source, ChartPtr target, const std::map<std::string, Expr>& solved) {
  std::map<std::string, Expr> a;
  for (const auto& c : target->coords()) {
    auto it = solved.find(c.name);
    if (it != solved.end()) {
      a.emplace(c.name, it->second);
    } else if (source->has(c.name)) {
      a.emplace(c.name, Expr::symbol(c.name));
    } else {
      throw ChartMismatch("embedding has no image for '" + c.name + "'");
    }
  }
  return ChartMap(std::move(source), std::move(target), std::move(a));
}

ChartMap ChartMap::projection(ChartPtr source, ChartPtr target) {
  std::map<std::string, Expr> a;
  for (const auto& c : target->coords()) {
    if (!source->has(c.name)) throw ChartMismatch("projection target coordinate '" + c.name + "' missing in source");
    a.emplace(c.name, Expr::symbol(c.name));
  }
  return ChartMap(std::move(source), std::move(target), std::move(a));
}

sym::Bindings ChartMap::bindings() const { return sym::Bindings(assignment_.begin(), assignment_.end()); }

ChartMap compose(const ChartMap& g, const ChartMap& f) {
  require_same(g.source(), f.target(), "compose");
  const auto b = f.bindings();
  std::map<std::string, Expr> a;
  for (const auto& [name, e] : g.assignment()) a.emplace(name, sym::substitute(e, b));
  return ChartMap(f.source(), g.target(), std::move(a));
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
  require_same(a.chart(), b.chart(), "wedge");
  DiffForm w(a.chart(), a.degree() + b.degree());
  if (a.degree() + b.degree() > static_cast<int>(a.chart()->dim())) return w;
  for (const auto& [ia, ca] : a.terms()) {
    for (const auto& [ib, cb] : b.terms()) {
      DiffForm::Index idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      w.add_term(std::move(idx), ca * cb);
    }
  }
  return w;
}

DiffForm exterior_derivative(const DiffForm& w) {
  const auto& chart = w.chart();
  DiffForm out(chart, w.degree() + 1);
  if (w.degree() + 1 > static_cast<int>(chart->dim())) return out;
  for (const auto& [idx, c] : w.terms()) {
    for (const auto& s : c.free_symbols()) {
      const auto i = chart->find(s);
      if (!i) continue;
      const Expr dc = sym::differentiate(c, s);
      if (dc.is_zero()) continue;
      DiffForm::Index j{static_cast<int>(*i)};
      j.insert(j.end(), idx.begin(), idx.end());
      out.add_term(std::move(j), dc);
    }
  }
  return out;
}

DiffForm interior_product(const VectorField& x, const DiffForm& w) {
  require_same(x.chart(), w.chart(), "interior product");
  if (w.degree() == 0) return DiffForm(w.chart(), 0);
  DiffForm out(w.chart(), w.degree() - 1);
  for (const auto& [idx, c] : w.terms()) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const Expr xk = x.component(static_cast<std::size_t>(idx[k]));
      if (xk.is_zero()) continue;
      DiffForm::Index rest = idx;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      const Expr v = xk * c;
      out.add_term(std::move(rest), k % 2 == 0 ? v : -v);
    }
  }
  return out;
}

DiffForm lie_derivative(const VectorField& x, const DiffForm& w) {
  const DiffForm dw = exterior_derivative(w);
  DiffForm out = interior_product(x, dw);
  if (w.degree() > 0) out += exterior_derivative(interior_product(x, w));
  return out;
}

DiffForm pullback(const ChartMap& phi, const DiffForm& w) {
  require_same(phi.target(), w.chart(), "pullback");
  const auto& src = phi.source();
  const auto b = phi.bindings();
  std::map<int, DiffForm> dphi;
  auto differential_of = [&](int i) -> const DiffForm& {
    auto it = dphi.find(i);
    if (it != dphi.end()) return it->second;
    const Expr& image = phi.assignment().at(w.chart()->name(static_cast<std::size_t>(i)));
    return dphi.emplace(i, exterior_derivative(DiffForm::scalar(src, image))).first->second;
  };
  DiffForm out(src, w.degree());
  for (const auto& [idx, c] : w.terms()) {
    DiffForm term = DiffForm::scalar(src, sym::substitute(c, b));
    for (int i : idx) {
      if (term.is_zero()) break;
      term = wedge(term, differential_of(i));
    }
    if (!term.is_zero()) out += term;
  }
  return out;
}

DiffForm transfer(const DiffForm& w, const ChartPtr& to) {
  if (same_chart(w.chart(), to)) return w;
  DiffForm out(to, w.degree());
  for (const auto& [idx, c] : w.terms()) {
    DiffForm::Index j;
    for (int i : idx) j.push_back(static_cast<int>(to->index(w.chart()->name(static_cast<std::size_t>(i)))));
    out.add_term(std::move(j), c);
  }
  return out;
}

std::vector<Expr> coefficient_equations(const DiffForm& w) {
  std::vector<Expr> out;
  out.reserve(w.terms().size());
  for (const auto& [idx, c] : w.terms()) out.push_back(c);
  return out;
}

DiffForm volume_form(const ChartPtr& chart) {
  DiffForm w(chart, chart->base_dim());
  DiffForm::Index idx;
  for (int i = 0; i < chart->base_dim(); ++i) idx.push_back(i);
  w.add_term(std::move(idx), Expr(1L));
  return w;
}

DiffForm volume_contraction(const ChartPtr& chart, int i) {
  if (i < 0 || i >= chart->base_dim()) throw DimensionMismatch("volume contraction index out of range");
  return interior_product(VectorField::coordinate(chart, chart->name(static_cast<std::size_t>(i))), volume_form(chart));
}

namespace {

DiffForm build_form(const sym::Ast& a, const ChartPtr& chart, const sym::NameSet& known) {
  using K = sym::Ast::Kind;
  auto scalar_of = [&](const sym::Ast& node) -> Expr {
    DiffForm f = build_form(node, chart, known);
    if (f.degree() != 0) throw SyntaxError("expected a scalar operand", node.offset);
    return f.value();
  };
  switch (a.kind) {
    case K::Number:
    case K::Ident: return DiffForm::scalar(chart, sym::build_expr(a, known));
    case K::Neg: return -build_form(a.args[0], chart, known);
    case K::Add:
    case K::Sub: {
      DiffForm l = build_form(a.args[0], chart, known);
      DiffForm r = build_form(a.args[1], chart, known);
      if (l.degree() != r.degree() && !(l.is_zero() && r.is_zero())) {
        if (l.is_zero()) return a.kind == K::Add ? r : -r;
        if (r.is_zero()) return l;
        throw SyntaxError("sum of forms of different degree", a.offset);
      }
      return a.kind == K::Add ? l + r : l - r;
    }
    case K::Mul:
    case K::Wedge: return wedge(build_form(a.args[0], chart, known), build_form(a.args[1], chart, known));
    case K::Div: {
      DiffForm l = build_form(a.args[0], chart, known);
      const Expr d = scalar_of(a.args[1]);
      if (d.is_zero()) throw DomainError("division by zero at byte " + std::to_string(a.offset));
      return (Expr(1L) / d) * l;
    }
    case K::Pow: {
      const Expr base = scalar_of(a.args[0]);
      return DiffForm::scalar(chart, base.pow(sym::ast_integer_exponent(a.args[1], known)));
    }
    case K::Call: {
      if (a.name == "d") {
        const auto& arg = a.args[0];
        if (arg.kind != K::Ident) throw SyntaxError("d(...) takes a coordinate name", arg.offset);
        if (!chart->has(arg.name)) throw UnknownIdentifier(arg.name, arg.offset);
        return DiffForm::differential(chart, arg.name);
      }
      return DiffForm::scalar(chart, sym::build_expr(a, known));
    }
  }
  return DiffForm(chart, 0);
}

}  // namespace

DiffForm parse_form(const std::string& text, const ChartPtr& chart) {
  return build_form(sym::parse_ast(text, true), chart, chart->known_names());
}

}  // namespace hamform::cartan
