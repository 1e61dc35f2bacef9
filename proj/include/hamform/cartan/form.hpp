#pragma once

#include <map>
#include <string>
#include <vector>

#include "hamform/cartan/chart.hpp"

namespace hamform::cartan {

/// Homogeneous differential form of a fixed degree. Terms are keyed by
/// strictly increasing coordinate index tuples; zero coefficients are never
/// stored.
class DiffForm {
 public:
  using Index = std::vector<int>;

  DiffForm(ChartPtr chart, int degree);
  static DiffForm scalar(ChartPtr chart, const Expr& f);
  /// The 1-form d(name).
  static DiffForm differential(ChartPtr chart, const std::string& name);

  const ChartPtr& chart() const { return chart_; }
  int degree() const { return degree_; }
  const std::map<Index, Expr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c times d(x_i1)/\.../\d(x_ik) for indices in any order.
  void add_term(Index idx, const Expr& c);
  Expr coefficient(const Index& sorted) const;
  /// Coefficient of the differentials named, in the given order.
  Expr coefficient(const std::vector<std::string>& names) const;
  /// Value of a degree-0 form.
  Expr value() const;

  DiffForm operator-() const;
  friend DiffForm operator+(const DiffForm& a, const DiffForm& b);
  friend DiffForm operator-(const DiffForm& a, const DiffForm& b);
  friend DiffForm operator*(const Expr& f, const DiffForm& a);
  DiffForm& operator+=(const DiffForm& b) { return *this = *this + b; }
  DiffForm& operator-=(const DiffForm& b) { return *this = *this - b; }

  /// Applies the substitution to every coefficient (differentials untouched).
  DiffForm map_coefficients(const sym::Bindings& b) const;

  friend bool operator==(const DiffForm& a, const DiffForm& b);
  friend bool operator!=(const DiffForm& a, const DiffForm& b) { return !(a == b); }

  /// Terms in index order, e.g. "p*d(x) - H*d(t)" or "d(t)/\d(x)".
  std::string str() const;

 private:
  ChartPtr chart_;
  int degree_;
  std::map<Index, Expr> terms_;
};

std::ostream& operator<<(std::ostream& os, const DiffForm& f);

/// Vector field with components on chart coordinates; absent components are zero.
class VectorField {
 public:
  explicit VectorField(ChartPtr chart, std::map<std::string, Expr> components = {});
  /// The coordinate field d/d(name).
  static VectorField coordinate(ChartPtr chart, const std::string& name);

  const ChartPtr& chart() const { return chart_; }
  const std::map<std::string, Expr>& components() const { return components_; }
  Expr component(std::size_t i) const;

 private:
  ChartPtr chart_;
  std::map<std::string, Expr> components_;
};

/// Map from source to target given by target coordinate -> expression over
/// source coordinates and shared parameters.
class ChartMap {
 public:
  ChartMap(ChartPtr source, ChartPtr target, std::map<std::string, Expr> assignment);
  static ChartMap identity(ChartPtr chart);
  /// Target coordinates present in the source map to themselves; the rest
  /// must be given in solved.
  static ChartMap embedding(ChartPtr source, ChartPtr target, const std::map<std::string, Expr>& solved);
  /// Forgets coordinates: every target coordinate must be a source coordinate.
  static ChartMap projection(ChartPtr source, ChartPtr target);

  const ChartPtr& source() const { return source_; }
  const ChartPtr& target() const { return target_; }
  const std::map<std::string, Expr>& assignment() const { return assignment_; }
  /// Bindings that send every target coordinate to its image.
  sym::Bindings bindings() const;

 private:
  ChartPtr source_;
  ChartPtr target_;
  std::map<std::string, Expr> assignment_;
};

/// g after f: source of f to target of g.
ChartMap compose(const ChartMap& g, const ChartMap& f);

DiffForm wedge(const DiffForm& a, const DiffForm& b);
DiffForm exterior_derivative(const DiffForm& w);
DiffForm interior_product(const VectorField& x, const DiffForm& w);
DiffForm lie_derivative(const VectorField& x, const DiffForm& w);
DiffForm pullback(const ChartMap& phi, const DiffForm& w);
/// Re-expresses a form on another chart sharing the coordinate names it uses.
DiffForm transfer(const DiffForm& w, const ChartPtr& to);
/// Stored coefficients in index order.
std::vector<Expr> coefficient_equations(const DiffForm& w);

/// d(x^1)/\.../\d(x^m) over the base coordinates.
DiffForm volume_form(const ChartPtr& chart);
/// d/dx^i contracted into the volume form.
DiffForm volume_contraction(const ChartPtr& chart, int i);

/// Parse a form: scalar grammar plus d(coord) and the wedge operator "/\".
/// "*" also wedges; "/" needs a scalar divisor.
DiffForm parse_form(const std::string& text, const ChartPtr& chart);

}  // namespace hamform::cartan
