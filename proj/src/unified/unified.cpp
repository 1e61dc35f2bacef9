#include "hamform/unified/unified.hpp"

#include <algorithm>

#include "hamform/errors.hpp"

namespace hamform::unified {

using cartan::Coordinate;
using cartan::Role;
using jets::JetChart;
using jets::MultiIndex;

const char* builder_name(Builder b) {
  switch (b) {
    case Builder::Classical: return "classical";
    case Builder::General: return "general";
    case Builder::Herglotz: return "herglotz";
  }
  return "?";
}

std::vector<VectorField> UnifiedSpace::vertical_fields() const {
  std::vector<VectorField> out;
  for (const auto& d : dropped) out.push_back(VectorField::coordinate(chart, d));
  return out;
}

namespace {

void require_known(const Expr& e, const cartan::Chart& chart, const char* what) {
  const auto known = chart.known_names();
  for (const auto& s : e.free_symbols()) {
    if (known.count(s) == 0) throw ChartMismatch(std::string(what) + " depends on unknown symbol '" + s + "'");
  }
}

DiffForm eta_i(const ChartPtr& chart, int i) { return cartan::volume_contraction(chart, i); }

// Increasing tuples of size r from {0..m-1}.
std::vector<std::vector<int>> increasing_tuples(int m, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == r) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < m; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

DiffForm eta_tuple(const ChartPtr& chart, const std::vector<int>& idx) {
  DiffForm w = cartan::volume_form(chart);
  for (int i : idx) w = cartan::interior_product(VectorField::coordinate(chart, chart->name(static_cast<std::size_t>(i))), w);
  return w;
}

ChartPtr target_chart(const ChartPtr& chart, const std::vector<std::string>& drop) {
  for (const auto& d : drop) {
    const auto i = chart->index(d);
    if (chart->coord(i).role == Role::Base) throw ChartMismatch("cannot drop base coordinate '" + d + "'");
  }
  return cartan::drop_coordinates(chart, drop);
}

}  // namespace

UnifiedSpace build_classical_unified(const JetChart& jc, const Expr& L, int k, std::string label) {
  if (k < 0) throw DimensionMismatch("order k must be non-negative");
  JetChart full = jets::build_jet_chart(jc.m(), jc.fields(), k + 1, k, jc.chart()->parameters(), jc.base());
  const ChartPtr& chart = full.chart();
  require_known(L, *chart, "Lagrangian");

  DiffForm theta = L * cartan::volume_form(chart);
  const int nf = static_cast<int>(full.fields().size());
  for (int r = 0; r <= k; ++r) {
    for (int a = 0; a < nf; ++a) {
      for (const auto& I : jets::multi_indices(full.m(), r)) {
        DiffForm contact = DiffForm::differential(chart, full.coordinate(a, I));
        for (int j = 0; j < full.m(); ++j) {
          contact -= Expr::symbol(full.coordinate(a, I.plus(j))) *
                     DiffForm::differential(chart, full.base()[static_cast<std::size_t>(j)]);
        }
        for (int i = 0; i < full.m(); ++i) {
          theta += Expr::symbol(full.momentum(a, I, i)) * cartan::wedge(contact, eta_i(chart, i));
        }
      }
    }
  }

  std::vector<std::string> drop;
  for (int a = 0; a < nf; ++a) {
    for (const auto& I : jets::multi_indices(full.m(), k + 1)) drop.push_back(full.coordinate(a, I));
  }

  UnifiedSpace us{std::move(label), Builder::Classical, chart, std::move(theta), target_chart(chart, drop), drop,
                  full, L, k};
  return us;
}

UnifiedSpace build_general_unified(const VariationalProblem& vp) {
  const ChartPtr& base_chart = vp.chart;
  const int m = base_chart->base_dim();
  if (vp.lambda.degree() != m && !vp.lambda.is_zero()) throw DimensionMismatch("Lagrangian form must have degree m");
  if (!cartan::same_chart(vp.lambda.chart(), base_chart)) throw ChartMismatch("Lagrangian form lives on another chart");

  struct Slot {
    std::size_t generator;
    std::vector<int> tuple;
    std::string name;
  };
  std::vector<Slot> slots;
  std::vector<Coordinate> extra;
  for (std::size_t g = 0; g < vp.generators.size(); ++g) {
    const auto& gen = vp.generators[g];
    if (!cartan::same_chart(gen.form.chart(), base_chart)) throw ChartMismatch("generator lives on another chart");
    const int d = gen.form.degree();
    if (d > m) throw DimensionMismatch("generator " + std::to_string(g + 1) + " has degree above m");
    const auto tuples = increasing_tuples(m, d);
    if (!gen.multipliers.empty() && gen.multipliers.size() != tuples.size()) {
      throw DimensionMismatch("generator " + std::to_string(g + 1) + " needs " + std::to_string(tuples.size()) +
                              " multipliers");
    }
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      std::string name;
      if (!gen.multipliers.empty()) {
        name = gen.multipliers[t];
      } else {
        name = "l" + std::to_string(g + 1);
        if (!tuples[t].empty()) {
          name += "_";
          for (int i : tuples[t]) name += base_chart->name(static_cast<std::size_t>(i));
        }
      }
      slots.push_back({g, tuples[t], name});
      extra.push_back({name, Role::Multiplier, 0});
    }
  }
  const ChartPtr chart = cartan::extend_chart(base_chart, extra);

  DiffForm theta = vp.lambda.is_zero() ? DiffForm(chart, m) : cartan::transfer(vp.lambda, chart);
  for (const auto& s : slots) {
    const DiffForm gen = cartan::transfer(vp.generators[s.generator].form, chart);
    theta += Expr::symbol(s.name) * cartan::wedge(gen, eta_tuple(chart, s.tuple));
  }

  for (const auto& d : vp.drop) {
    if (!base_chart->has(d)) throw ChartMismatch("dropped coordinate '" + d + "' is not in the problem chart");
  }
  UnifiedSpace us{vp.label, Builder::General, chart, std::move(theta), target_chart(chart, vp.drop), vp.drop,
                  std::nullopt, Expr(), 0};
  return us;
}

std::vector<std::string> herglotz_z_names(const std::vector<std::string>& base) {
  if (base.size() == 1) return {"z"};
  std::vector<std::string> out;
  for (const auto& b : base) out.push_back("z" + b);
  return out;
}

UnifiedSpace build_herglotz_unified(const JetChart& jc, const Expr& L, std::string label) {
  const int m = jc.m();
  const JetChart velocities = jets::build_jet_chart(m, jc.fields(), 1, 0, jc.chart()->parameters(), jc.base());
  const auto z = herglotz_z_names(jc.base());

  std::vector<Coordinate> coords;
  for (const auto& c : velocities.chart()->coords()) {
    if (c.role != Role::Momentum) coords.push_back(c);
  }
  for (const auto& zn : z) coords.push_back({zn, Role::Auxiliary, 0});
  for (const auto& c : velocities.chart()->coords()) {
    if (c.role == Role::Momentum) coords.push_back(c);
  }
  coords.push_back({"mu", Role::Multiplier, 0});
  const ChartPtr chart = cartan::make_chart(std::move(coords), jc.chart()->parameters());
  require_known(L, *chart, "Lagrangian");

  const Expr mu = Expr::symbol("mu");
  const DiffForm eta = cartan::volume_form(chart);
  DiffForm dz_eta(chart, m);
  for (int i = 0; i < m; ++i) {
    dz_eta += cartan::wedge(DiffForm::differential(chart, z[static_cast<std::size_t>(i)]), eta_i(chart, i));
  }
  DiffForm theta = dz_eta + mu * (L * eta - dz_eta);
  const auto zero = MultiIndex::zero(m);
  std::vector<std::string> drop;
  for (int a = 0; a < static_cast<int>(jc.fields().size()); ++a) {
    DiffForm contact = DiffForm::differential(chart, velocities.coordinate(a, zero));
    for (int j = 0; j < m; ++j) {
      contact -= Expr::symbol(velocities.coordinate(a, zero.plus(j))) *
                 DiffForm::differential(chart, jc.base()[static_cast<std::size_t>(j)]);
      drop.push_back(velocities.coordinate(a, zero.plus(j)));
    }
    for (int i = 0; i < m; ++i) {
      theta += Expr::symbol(velocities.momentum(a, zero, i)) * cartan::wedge(contact, eta_i(chart, i));
    }
  }
  UnifiedSpace us{std::move(label), Builder::Herglotz, chart, std::move(theta), target_chart(chart, drop), drop,
                  std::nullopt, L, 0};
  return us;
}

std::map<std::string, Expr> legendre_components(const UnifiedSpace& us) {
  if (us.builder != Builder::Classical || !us.jets) {
    throw DomainError("legendre_components requires a classical unified space");
  }
  const JetChart& jc = *us.jets;
  std::map<std::string, Expr> out;
  Expr q = us.lagrangian;
  for (int r = 0; r <= us.k; ++r) {
    for (int a = 0; a < static_cast<int>(jc.fields().size()); ++a) {
      for (const auto& I : jets::multi_indices(jc.m(), r)) {
        for (int i = 0; i < jc.m(); ++i) {
          q -= jets::symmetric_part(jc, a, I, i) * Expr::symbol(jc.coordinate(a, I.plus(i)));
          const std::string& p = jc.momentum(a, I, i);
          out.emplace("q" + p.substr(1), Expr::symbol(p));
        }
      }
    }
  }
  out.emplace("q", q);
  return out;
}

CompatibilityReport check_compatibility(const UnifiedSpace& us) {
  CompatibilityReport report;
  for (const auto& zn : us.dropped) {
    const auto Z = VectorField::coordinate(us.chart, zn);
    const DiffForm contraction = cartan::interior_product(Z, us.theta);
    if (!contraction.is_zero()) report.violations.push_back({zn, "", contraction});
    const DiffForm lie = cartan::lie_derivative(Z, us.theta);
    for (const auto& yn : us.chart->fiber_names()) {
      const DiffForm f = cartan::interior_product(VectorField::coordinate(us.chart, yn), lie);
      if (!f.is_zero()) report.violations.push_back({zn, yn, f});
    }
  }
  report.compatible = report.violations.empty();
  return report;
}

std::map<std::string, Expr> lift_multipliers(const JetChart& jc, const Expr& L, int k,
                                             const std::map<std::string, Expr>& c) {
  if (k < 0) throw DimensionMismatch("order k must be non-negative");
  const JetChart ext = jets::build_jet_chart(jc.m(), jc.fields(), 2 * k + 1, k, jc.chart()->parameters(), jc.base());
  require_known(L, *ext.chart(), "Lagrangian");
  for (const auto& s : L.free_symbols()) {
    if (auto jcoord = ext.jet_coordinate(s); jcoord && jcoord->index.order() > k + 1) {
      throw DomainError("Lagrangian depends on '" + s + "' beyond order k+1");
    }
  }
  for (const auto& [name, value] : c) {
    if (!ext.momentum_coordinate(name)) throw ChartMismatch("'" + name + "' is not a momentum coordinate");
  }
  auto c_of = [&](int a, const MultiIndex& I, int i) {
    auto it = c.find(ext.momentum(a, I, i));
    return it == c.end() ? Expr() : it->second;
  };
  const int nf = static_cast<int>(ext.fields().size());
  for (int a = 0; a < nf; ++a) {
    for (int r = 0; r <= k; ++r) {
      for (const auto& I : jets::multi_indices(ext.m(), r)) {
        for (int i = 0; i < ext.m(); ++i) {
          const Expr sp = jets::symmetric_part_of(ext, I, i, [&](const MultiIndex& J, int j) { return c_of(a, J, j); });
          if (!sp.is_zero()) throw DomainError("c has nonzero symmetric part at " + ext.momentum(a, I, i));
        }
      }
    }
  }

  std::map<std::string, Expr> out;
  for (int a = 0; a < nf; ++a) {
    for (int r = k; r >= 0; --r) {
      for (const auto& I : jets::multi_indices(ext.m(), r)) {
        for (int i = 0; i < ext.m(); ++i) {
          const MultiIndex next = I.plus(i);
          Expr value = sym::differentiate(L, ext.coordinate(a, next)) + c_of(a, I, i);
          if (r < k) {
            for (int j = 0; j < ext.m(); ++j) {
              value += jets::total_derivative(ext, out.at(ext.momentum(a, next, j)), j);
            }
          }
          out.emplace(ext.momentum(a, I, i), value);
        }
      }
    }
  }
  return out;
}

}  // namespace hamform::unified
