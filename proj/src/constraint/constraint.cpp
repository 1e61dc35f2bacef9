#include "hamform/constraint/constraint.hpp"

#include <algorithm>

#include "hamform/errors.hpp"
#include "hamform/symexpr/solve.hpp"

namespace hamform::constraint {

using cartan::Role;

namespace {

std::vector<std::string> keys_in_chart_order(const cartan::Chart& chart, const std::map<std::string, Expr>& m) {
  std::vector<std::string> out;
  for (const auto& name : chart.coordinate_names()) {
    if (m.count(name) != 0) out.push_back(name);
  }
  return out;
}

ChartPtr retained_chart(const ChartPtr& ambient, const std::map<std::string, Expr>& solved) {
  for (const auto& [name, value] : solved) {
    const auto i = ambient->index(name);
    if (ambient->coord(i).role == Role::Base) throw ChartMismatch("cannot solve for base coordinate '" + name + "'");
    for (const auto& s : value.free_symbols()) {
      if (solved.count(s) != 0) throw ChartMismatch("value of '" + name + "' uses solved coordinate '" + s + "'");
    }
  }
  return cartan::drop_coordinates(ambient, keys_in_chart_order(*ambient, solved));
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<Expr> volume_index_coefficient(const DiffForm& w) {
  DiffForm::Index eta;
  for (int i = 0; i < w.chart()->base_dim(); ++i) eta.push_back(i);
  if (w.terms().size() == 1 && w.terms().begin()->first == eta) return {w.terms().begin()->second};
  return {};
}

// Row echelon set over the field of rational functions.
class Echelon {
 public:
  explicit Echelon(std::size_t n) : n_(n) {}

  bool add(std::vector<Expr> v) {
    for (const auto& [col, row] : rows_) {
      if (v[col].is_zero()) continue;
      const Expr f = v[col];
      for (std::size_t j = 0; j < n_; ++j) {
        if (!row[j].is_zero()) v[j] -= f * row[j];
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (v[j].is_zero()) continue;
      const Expr inv = Expr(1L) / v[j];
      for (auto& x : v) x = x * inv;
      // Keep earlier rows reduced so that later reductions stay single-pass.
      for (auto& [col, row] : rows_) {
        if (row[j].is_zero()) continue;
        const Expr f = row[j];
        for (std::size_t k = 0; k < n_; ++k) {
          if (!v[k].is_zero()) row[k] -= f * v[k];
        }
      }
      rows_.emplace_back(j, std::move(v));
      return true;
    }
    return false;
  }

  std::size_t rank() const { return rows_.size(); }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::vector<Expr>>> rows_;
};

std::vector<Expr> unit(std::size_t n, std::size_t i) {
  std::vector<Expr> v(n);
  v[i] = Expr(1L);
  return v;
}

// TP + ker Tp at a generic point of P.
Echelon tangent_span(const UnifiedSpace& us, const SubmanifoldChart& P) {
  const auto& amb = *us.chart;
  const std::size_t n = amb.dim();
  Echelon e(n);
  for (const auto& r : P.retained()) {
    std::vector<Expr> v = unit(n, amb.index(r));
    for (const auto& [s, value] : P.solved()) v[amb.index(s)] = sym::differentiate(value, r);
    e.add(std::move(v));
  }
  for (const auto& d : us.dropped) e.add(unit(n, amb.index(d)));
  return e;
}

Role role_of(const cartan::Chart& c, const std::string& name) { return c.coord(c.index(name)).role; }

template <class F>
auto at_level(int level, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (Error& e) {
    if (e.level() < 0) e.set_level(level);
    throw;
  }
}

}  // namespace

SubmanifoldChart::SubmanifoldChart(ChartPtr ambient) : SubmanifoldChart(std::move(ambient), {}) {}

SubmanifoldChart::SubmanifoldChart(ChartPtr ambient, std::map<std::string, Expr> solved)
    : ambient_(std::move(ambient)),
      solved_(std::move(solved)),
      chart_(retained_chart(ambient_, solved_)),
      embedding_(ChartMap::embedding(chart_, ambient_, solved_)) {}

std::vector<Expr> SubmanifoldChart::defining_equations() const {
  std::vector<Expr> out;
  for (const auto& name : keys_in_chart_order(*ambient_, solved_)) {
    out.push_back(Expr::symbol(name) - solved_.at(name));
  }
  return out;
}

SubmanifoldChart SubmanifoldChart::restrict(const std::map<std::string, Expr>& more) const {
  for (const auto& [name, value] : more) {
    if (!chart_->has(name)) throw ChartMismatch("'" + name + "' is not a retained coordinate");
  }
  const sym::Bindings b(more.begin(), more.end());
  std::map<std::string, Expr> all;
  for (const auto& [name, value] : solved_) all.emplace(name, sym::substitute(value, b));
  for (const auto& [name, value] : more) all.emplace(name, value);
  return SubmanifoldChart(ambient_, std::move(all));
}

SubmanifoldChart first_constraint_manifold(const UnifiedSpace& us) {
  std::vector<Expr> equations;
  for (const auto& z : us.dropped) {
    const auto Z = VectorField::coordinate(us.chart, z);
    for (const auto& c : cartan::coefficient_equations(cartan::interior_product(Z, us.theta))) equations.push_back(c);
    for (const auto& c : cartan::coefficient_equations(cartan::lie_derivative(Z, us.theta))) equations.push_back(c);
  }

  // Dropped coordinates first, each stage latest coordinate first.
  std::vector<sym::Symbol> dropped;
  std::vector<sym::Symbol> others;
  const auto fiber = us.chart->fiber_names();
  for (auto it = fiber.rbegin(); it != fiber.rend(); ++it) {
    (contains(us.dropped, *it) ? dropped : others).emplace_back(*it);
  }
  const auto first = sym::solve_affine(equations, dropped);
  const auto second = sym::solve_affine(first.residual_constraints, others);
  for (const auto& r : second.residual_constraints) {
    throw Inconsistent("first constraint reduces to " + r.str() + " = 0");
  }
  const sym::Bindings b(second.solved.begin(), second.solved.end());
  std::map<std::string, Expr> solved = second.solved;
  for (const auto& [name, value] : first.solved) solved.emplace(name, sym::substitute(value, b));
  return SubmanifoldChart(us.chart, std::move(solved));
}

HamiltonianData factor_through_projection(const UnifiedSpace& us, const SubmanifoldChart& P) {
  if (!cartan::same_chart(P.ambient(), us.chart)) throw ChartMismatch("submanifold lives in another chart");
  const DiffForm theta0 = cartan::pullback(P.embedding(), us.theta);
  const auto& pc = *P.chart();

  std::vector<std::string> vertical;
  for (const auto& d : us.dropped) {
    if (pc.has(d)) vertical.push_back(d);
  }
  for (const auto& [idx, coef] : theta0.terms()) {
    for (int i : idx) {
      const auto& name = pc.name(static_cast<std::size_t>(i));
      if (contains(vertical, name)) throw NotBasic("restricted form has a d(" + name + ") term");
    }
    for (const auto& v : vertical) {
      if (coef.depends_on(v)) throw NotBasic("coefficient " + coef.str() + " depends on " + v);
    }
  }

  std::map<std::string, Expr> c_solved;
  for (const auto& [name, value] : P.solved()) {
    if (contains(us.dropped, name)) continue;
    for (const auto& v : vertical) {
      if (value.depends_on(v)) throw NotBasic("constraint " + name + " = " + value.str() + " depends on " + v);
    }
    c_solved.emplace(name, value);
  }
  SubmanifoldChart C(us.target, std::move(c_solved));
  DiffForm theta_h = cartan::transfer(theta0, C.chart());
  if (cartan::pullback(ChartMap::projection(P.chart(), C.chart()), theta_h) != theta0) {
    throw NotBasic("pullback of the Hamiltonian form differs from the restricted form");
  }

  Expr h;
  if (theta_h.degree() == us.chart->base_dim()) {
    DiffForm::Index eta;
    for (int i = 0; i < theta_h.degree(); ++i) eta.push_back(i);
    h = -theta_h.coefficient(eta);
  }
  return {std::move(C), std::move(theta_h), std::move(h)};
}

EquationSystem field_equations(const DiffForm& theta, const std::vector<std::string>& directions) {
  const DiffForm dtheta = cartan::exterior_derivative(theta);
  EquationSystem es;
  for (const auto& d : directions) {
    es.equations.push_back({d, cartan::interior_product(VectorField::coordinate(theta.chart(), d), dtheta)});
  }
  return es;
}

EquationSystem field_equations(const DiffForm& theta) {
  return field_equations(theta, theta.chart()->fiber_names());
}

std::vector<Expr> consistency_constraints(const EquationSystem& es, const ChartPtr& chart) {
  std::vector<Expr> raw = es.scalar_equations;
  if (chart->base_dim() == 1) {
    std::vector<Expr> eqs;
    std::vector<sym::Symbol> unknowns;
    for (const auto& y : chart->fiber_names()) unknowns.emplace_back("__dt_" + y);
    for (const auto& eq : es.equations) {
      const DiffForm& w = eq.residual;
      if (w.degree() != 1) throw DimensionMismatch("equation for " + eq.direction + " is not a 1-form");
      Expr e;
      for (const auto& [idx, coef] : w.terms()) {
        const auto i = static_cast<std::size_t>(idx[0]);
        e += i == 0 ? coef : coef * Expr::symbol("__dt_" + chart->name(i));
      }
      eqs.push_back(e);
    }
    for (const auto& r : sym::solve_affine(eqs, unknowns).residual_constraints) raw.push_back(r);
  } else {
    for (const auto& eq : es.equations) {
      for (const auto& c : volume_index_coefficient(eq.residual)) raw.push_back(c);
    }
  }
  std::vector<Expr> out;
  for (const auto& r : raw) {
    const Expr n = sym::constraint_normal_form(r);
    if (n.is_zero()) continue;
    if (std::none_of(out.begin(), out.end(), [&](const Expr& e) { return sym::proportional(e, n); })) {
      out.push_back(n);
    }
  }
  return out;
}

std::vector<DiffForm> admissible_lift_equations(const UnifiedSpace& us, const SubmanifoldChart& P,
                                                const std::vector<std::string>& complement) {
  Echelon span = tangent_span(us, P);
  const std::size_t n = us.chart->dim();
  const std::size_t needed = n - span.rank();
  if (complement.size() != needed) {
    throw DimensionMismatch("complement needs " + std::to_string(needed) + " fields, got " +
                            std::to_string(complement.size()));
  }
  for (const auto& z : complement) {
    if (!span.add(unit(n, us.chart->index(z)))) {
      throw DimensionMismatch("d/d" + z + " is not transverse to TP + ker Tp");
    }
  }
  const DiffForm dtheta = cartan::exterior_derivative(us.theta);
  std::vector<DiffForm> out;
  for (const auto& z : complement) {
    out.push_back(cartan::pullback(P.embedding(),
                                   cartan::interior_product(VectorField::coordinate(us.chart, z), dtheta)));
  }
  return out;
}

std::vector<std::string> default_complement(const UnifiedSpace& us, const SubmanifoldChart& P) {
  const auto& amb = *us.chart;
  std::vector<std::string> proposals;
  for (const auto& name : keys_in_chart_order(amb, P.solved())) {
    if (contains(us.dropped, name)) continue;
    const Role role = role_of(amb, name);
    const auto symbols = P.solved().at(name).free_symbols();
    std::string pick = name;
    for (const auto& c : amb.coordinate_names()) {
      if (symbols.count(c) != 0 && role_of(amb, c) == role) {
        pick = c;
        break;
      }
    }
    if (!contains(proposals, pick)) proposals.push_back(pick);
  }
  std::sort(proposals.begin(), proposals.end(),
            [&](const std::string& a, const std::string& b) { return amb.index(a) < amb.index(b); });

  Echelon span = tangent_span(us, P);
  const std::size_t n = amb.dim();
  std::vector<std::string> out;
  auto consider = [&](const std::string& c) {
    if (span.rank() == n || contains(out, c)) return;
    if (span.add(unit(n, amb.index(c)))) out.push_back(c);
  };
  for (const auto& p : proposals) consider(p);
  for (const auto& c : amb.fiber_names()) consider(c);
  std::sort(out.begin(), out.end(),
            [&](const std::string& a, const std::string& b) { return amb.index(a) < amb.index(b); });
  return out;
}

ConstraintReport run_constraint_algorithm(const UnifiedSpace& us, const AlgorithmOptions& options) {
  ConstraintReport report;
  SubmanifoldChart P = at_level(0, [&] { return first_constraint_manifold(us); });
  for (int l = 0; l < options.max_iter; ++l) {
    Level level = at_level(l, [&] {
      HamiltonianData data = factor_through_projection(us, P);
      EquationSystem es = field_equations(data.theta_h);
      std::vector<Expr> cons = consistency_constraints(es, data.C.chart());
      return Level{l, P, std::move(data), std::move(es), std::move(cons)};
    });
    report.levels.push_back(level);
    if (level.constraints.empty()) {
      report.terminated = true;
      report.final_index = l;
      break;
    }
    P = at_level(l + 1, [&] {
      const auto& cc = *level.data.C.chart();
      std::vector<sym::Symbol> unknowns;
      const auto fiber = cc.fiber_names();
      for (auto it = fiber.rbegin(); it != fiber.rend(); ++it) unknowns.emplace_back(*it);
      const auto solved = sym::solve_affine(level.constraints, unknowns);
      for (const auto& r : solved.residual_constraints) {
        throw Inconsistent("constraint " + r.str() + " = 0 cannot be imposed");
      }
      return P.restrict(solved.solved);
    });
  }
  if (report.terminated) {
    const Level& last = report.levels.back();
    at_level(last.index, [&] {
      report.complement = options.complement.empty() ? default_complement(us, last.P) : options.complement;
      report.lift_forms = admissible_lift_equations(us, last.P, report.complement);
      return 0;
    });
  }
  return report;
}

}  // namespace hamform::constraint
