#include <doctest.h>

#include <random>

#include "hamform/constraint/constraint.hpp"
#include "hamform/errors.hpp"
#include "hamform/symexpr/solve.hpp"

using namespace hamform;
using namespace hamform::constraint;
using cartan::parse_form;
using cartan::parse_scalar;
using jets::build_jet_chart;

namespace {

const std::vector<std::string> kSpringParams{"m", "g", "k1", "k2", "l1", "l2"};
const char* kSpringL = "m/2*(x1_t+x2_t)^2 + m*g*(x1+x2) - k1/2*(x1-l1)^2 - k2/2*(x2-l2)^2";

UnifiedSpace springs() {
  const auto jc = build_jet_chart(1, {"x1", "x2"}, 1, -1, kSpringParams);
  return unified::build_classical_unified(jc, parse_scalar(kSpringL, *jc.chart()), 0, "springs");
}

UnifiedSpace wave() {
  std::vector<cartan::Coordinate> cs{{"t", cartan::Role::Base, 0},         {"x", cartan::Role::Base, 0},
                                     {"u", cartan::Role::Field, 0},        {"u_t", cartan::Role::Derivative, 1},
                                     {"u_x", cartan::Role::Derivative, 1}, {"u_tt", cartan::Role::Derivative, 2},
                                     {"u_tx", cartan::Role::Derivative, 2}};
  const auto r = cartan::make_chart(cs);
  return unified::build_general_unified({"wave",
                                         r,
                                         DiffForm(r, 2),
                                         {{parse_form("d(u) - u_t*d(t) - u_x*d(x)", r), {"p1", "p2"}},
                                          {parse_form("d(u_t) - u_tt*d(t) - u_tx*d(x)", r), {"p11", "p12"}},
                                          {parse_form("d(u_x) - u_tx*d(t) - u_tt*d(x)", r), {"p21", "p22"}}},
                                         {"u_tt", "u_tx"}});
}

UnifiedSpace mechanics(const std::string& L, std::vector<std::string> params = {}) {
  const auto jc = build_jet_chart(1, {"x"}, 1, -1, params);
  return unified::build_classical_unified(jc, parse_scalar(L, *jc.chart()), 0);
}

bool same_up_to_sign(const DiffForm& a, const DiffForm& b) { return a == b || a == -b; }

const DiffForm& equation_for(const EquationSystem& es, const std::string& dir) {
  for (const auto& e : es.equations) {
    if (e.direction == dir) return e.residual;
  }
  throw std::runtime_error("no equation for " + dir);
}

// Solves the m = 1 equations for the velocities of the fiber coordinates.
std::map<std::string, Expr> velocities(const EquationSystem& es, const ChartPtr& chart) {
  std::vector<Expr> eqs;
  std::vector<sym::Symbol> unknowns;
  for (const auto& y : chart->fiber_names()) unknowns.emplace_back("v_" + y);
  for (const auto& e : es.equations) {
    Expr s;
    for (const auto& [idx, c] : e.residual.terms()) {
      s += idx[0] == 0 ? c : c * Expr::symbol("v_" + chart->name(static_cast<std::size_t>(idx[0])));
    }
    eqs.push_back(s);
  }
  const auto r = sym::solve_affine(eqs, unknowns);
  REQUIRE(r.residual_constraints.empty());
  REQUIRE(r.free_unknowns.empty());
  return r.solved;
}

}  // namespace

TEST_CASE("submanifold charts") {
  const auto us = springs();
  SubmanifoldChart P(us.chart, {{"px2__t", Expr::symbol("px1__t")}});
  CHECK(P.retained() == std::vector<std::string>{"t", "x1", "x2", "x1_t", "x2_t", "px1__t"});
  CHECK(P.defining_equations() == std::vector<Expr>{Expr::symbol("px2__t") - Expr::symbol("px1__t")});
  const auto Q = P.restrict({{"px1__t", Expr::symbol("x1")}});
  CHECK(Q.solved().at("px2__t") == Expr::symbol("x1"));
  CHECK_THROWS_AS(P.restrict({{"px2__t", Expr()}}), ChartMismatch);
  CHECK_THROWS_AS(SubmanifoldChart(us.chart, {{"t", Expr()}}), ChartMismatch);
  CHECK_THROWS_AS(SubmanifoldChart(us.chart, {{"x1", Expr::symbol("x2")}, {"x2", Expr()}}), ChartMismatch);
  CHECK(SubmanifoldChart(us.chart).retained() == us.chart->coordinate_names());
}

TEST_CASE("springs pipeline") {
  const auto us = springs();
  const auto& c = *us.chart;
  const auto P0 = first_constraint_manifold(us);
  CHECK(P0.retained() == std::vector<std::string>{"t", "x1", "x2", "x1_t", "px1__t"});
  CHECK(P0.solved().at("x2_t") == parse_scalar("px1__t/m - x1_t", c));
  CHECK(P0.solved().at("px2__t") == Expr::symbol("px1__t"));
  // p1 = p2 = m(x1_t + x2_t) hold on P0.
  const auto b = P0.embedding().bindings();
  CHECK(sym::substitute(parse_scalar("px1__t - m*(x1_t + x2_t)", c), b).is_zero());
  CHECK(sym::substitute(parse_scalar("px2__t - m*(x1_t + x2_t)", c), b).is_zero());

  const auto data = factor_through_projection(us, P0);
  const auto& cc = data.C.chart();
  CHECK(cc->coordinate_names() == std::vector<std::string>{"t", "x1", "x2", "px1__t"});
  const Expr H0 = parse_scalar("px1__t^2/(2*m) - m*g*(x1 + x2) + k1/2*(x1-l1)^2 + k2/2*(x2-l2)^2", *cc);
  CHECK(data.hamiltonian == H0);
  CHECK(data.theta_h == -H0 * cartan::volume_form(cc) + parse_form("px1__t*(d(x1) + d(x2))", cc));

  const auto es = field_equations(data.theta_h);
  REQUIRE(es.equations.size() == 3);
  CHECK(same_up_to_sign(equation_for(es, "x1"), parse_form("d(px1__t) - (m*g - k1*(x1-l1))*d(t)", cc)));
  CHECK(same_up_to_sign(equation_for(es, "x2"), parse_form("d(px1__t) - (m*g - k2*(x2-l2))*d(t)", cc)));
  CHECK(same_up_to_sign(equation_for(es, "px1__t"), parse_form("d(x1) + d(x2) - px1__t/m*d(t)", cc)));

  const auto cons = consistency_constraints(es, cc);
  REQUIRE(cons.size() == 1);
  CHECK(sym::proportional(cons[0], parse_scalar("k1*(x1-l1) - k2*(x2-l2)", *cc)));

  const auto report = run_constraint_algorithm(us);
  CHECK(report.terminated);
  CHECK(report.final_index == 1);
  REQUIRE(report.levels.size() == 2);
  const auto& l1 = report.levels[1];
  CHECK(l1.data.C.chart()->coordinate_names() == std::vector<std::string>{"t", "x1", "px1__t"});
  const Expr H1 = parse_scalar(
      "-m*g/k2*((k1+k2)*x1 + l2*k2 - k1*l1) + k1*(k1+k2)/(2*k2)*(x1-l1)^2 + px1__t^2/(2*m)", *l1.data.C.chart());
  CHECK(l1.data.hamiltonian == H1);
  CHECK(l1.data.theta_h == -H1 * cartan::volume_form(l1.data.C.chart()) +
                               parse_form("(k1+k2)*px1__t/k2*d(x1)", l1.data.C.chart()));
  CHECK(l1.constraints.empty());

  // The secondary constraint is preserved along the C1 flow.
  const auto v = velocities(l1.equations, l1.data.C.chart());
  const Expr x2 = l1.P.solved().at("x2");
  const Expr x2_dot = sym::differentiate(x2, "x1") * v.at("v_x1");
  CHECK((parse_scalar("k1", c) * v.at("v_x1") - parse_scalar("k2", c) * x2_dot).is_zero());

  CHECK(report.complement == std::vector<std::string>{"x1", "px1__t"});
  const auto pf = l1.P.chart();
  REQUIRE(report.lift_forms.size() == 2);
  CHECK(report.lift_forms[1] == parse_form("d(x1) - x1_t*d(t)", pf));
  CHECK(same_up_to_sign(report.lift_forms[0], parse_form("d(px1__t) - (m*g - k1*(x1-l1))*d(t)", pf)));
}

TEST_CASE("wave pipeline") {
  const auto us = wave();
  const auto P0 = first_constraint_manifold(us);
  CHECK(P0.solved().size() == 2);
  CHECK(P0.solved().at("p22") == -Expr::symbol("p11"));
  CHECK(P0.solved().at("p21") == -Expr::symbol("p12"));

  const auto data = factor_through_projection(us, P0);
  const auto& cc = data.C.chart();
  CHECK(cc->coordinate_names() == std::vector<std::string>{"t", "x", "u", "u_t", "u_x", "p1", "p2", "p11", "p12"});
  CHECK(data.theta_h == parse_form("-(p1*u_t + p2*u_x)*d(t)/\\d(x) + p1*d(u)/\\d(x) - p2*d(u)/\\d(t)"
                                   " + p11*(d(u_t)/\\d(x) + d(u_x)/\\d(t)) - p12*(d(u_t)/\\d(t) + d(u_x)/\\d(x))",
                                   cc));
  CHECK(data.hamiltonian == parse_scalar("p1*u_t + p2*u_x", *cc));

  const auto es = field_equations(data.theta_h);
  REQUIRE(es.equations.size() == 7);
  const std::vector<std::pair<std::string, std::string>> expected{
      {"u", "d(p1)/\\d(x) - d(p2)/\\d(t)"},
      {"u_t", "-p1*d(t)/\\d(x) - d(p11)/\\d(x) + d(p12)/\\d(t)"},
      {"u_x", "-p2*d(t)/\\d(x) - d(p11)/\\d(t) + d(p12)/\\d(x)"},
      {"p1", "-u_t*d(t)/\\d(x) + d(u)/\\d(x)"},
      {"p2", "-u_x*d(t)/\\d(x) - d(u)/\\d(t)"},
      {"p11", "d(u_t)/\\d(x) + d(u_x)/\\d(t)"},
      {"p12", "d(u_t)/\\d(t) + d(u_x)/\\d(x)"}};
  for (const auto& [dir, text] : expected) {
    INFO(dir);
    CHECK(same_up_to_sign(equation_for(es, dir), parse_form(text, cc)));
  }
  CHECK(consistency_constraints(es, cc).empty());

  const auto report = run_constraint_algorithm(us);
  CHECK(report.terminated);
  CHECK(report.final_index == 0);
  CHECK(report.complement == std::vector<std::string>{"p11", "p12"});
  const auto& pc = report.levels[0].P.chart();
  REQUIRE(report.lift_forms.size() == 2);
  CHECK(report.lift_forms[0] == parse_form("-u_tt*d(t)/\\d(x) + d(u_t)/\\d(x)", pc));
  CHECK(same_up_to_sign(report.lift_forms[1], parse_form("u_tx*d(t)/\\d(x) + d(u_t)/\\d(t)", pc)));
}

TEST_CASE("Herglotz contact mechanics") {
  const auto jc = build_jet_chart(1, {"u"}, 1, -1, {"k", "c"});
  const Expr L = parse_scalar("u_t^2/2 - k*u^2/2 - c*z", *cartan::extend_chart(jc.chart(), {{"z", cartan::Role::Auxiliary, 0}}));
  const auto us = unified::build_herglotz_unified(jc, L);
  const auto P0 = first_constraint_manifold(us);
  CHECK(P0.solved().at("u_t") == parse_scalar("pu__t/mu", *us.chart));
  CHECK(sym::substitute(Expr::symbol("pu__t") - Expr::symbol("mu") * sym::differentiate(L, "u_t"),
                        P0.embedding().bindings())
            .is_zero());

  const auto data = factor_through_projection(us, P0);
  const auto& cc = data.C.chart();
  CHECK(cc->coordinate_names() == std::vector<std::string>{"t", "u", "z", "pu__t", "mu"});
  const Expr Ht = sym::substitute(parse_scalar("pu__t*u_t", *us.chart) - Expr::symbol("mu") * L,
                                  P0.embedding().bindings());
  CHECK(data.hamiltonian == Ht);
  CHECK(data.theta_h == -Ht * cartan::volume_form(cc) + parse_form("pu__t*d(u) + (1 - mu)*d(z)", cc));

  const auto es = field_equations(data.theta_h);
  const Expr Lc = sym::substitute(L, P0.embedding().bindings());
  CHECK(same_up_to_sign(equation_for(es, "mu"), parse_form("d(z)", cc) - Lc * cartan::volume_form(cc)));
  CHECK(same_up_to_sign(equation_for(es, "z"),
                        parse_form("d(mu)", cc) - sym::differentiate(Ht, "z") * cartan::volume_form(cc)));
  CHECK(consistency_constraints(es, cc).empty());
  const auto report = run_constraint_algorithm(us);
  CHECK(report.final_index == 0);
}

TEST_CASE("regular mechanics stops at the first level") {
  const auto us = mechanics("x_t^2/2");
  const auto report = run_constraint_algorithm(us);
  CHECK(report.terminated);
  CHECK(report.final_index == 0);
  CHECK(report.levels[0].data.C.solved().empty());
  CHECK(report.levels[0].data.C.chart()->coordinate_names() == std::vector<std::string>{"t", "x", "px__t"});
  CHECK(report.complement.empty());
  CHECK(report.lift_forms.empty());
}

TEST_CASE("closed forms give empty equations") {
  const auto c = cartan::make_chart({{"t", cartan::Role::Base, 0}, {"x", cartan::Role::Field, 0}});
  const auto es = field_equations(parse_form("x*d(x) + d(t)", c));
  REQUIRE(es.equations.size() == 1);
  CHECK(es.equations[0].residual.is_zero());
  CHECK(consistency_constraints(es, c).empty());
}

TEST_CASE("pipeline errors") {
  SUBCASE("non-affine first constraint") {
    try {
      run_constraint_algorithm(mechanics("x_t^3"));
      FAIL("expected NonAffine");
    } catch (const NonAffine& e) {
      CHECK(e.level() == 0);
    }
  }
  SUBCASE("inconsistent secondary constraint") {
    // L = x: the momentum equation forces 1 = 0.
    try {
      run_constraint_algorithm(mechanics("x"));
      FAIL("expected Inconsistent");
    } catch (const Inconsistent& e) {
      CHECK(e.level() == 1);
    }
  }
  SUBCASE("not basic") {
    const auto c = cartan::make_chart({{"t", cartan::Role::Base, 0},
                                       {"x", cartan::Role::Field, 0},
                                       {"v", cartan::Role::Derivative, 1}});
    const auto us = unified::build_general_unified({"bad", c, parse_form("v*x*d(x)", c), {}, {"v"}});
    CHECK_THROWS_AS(factor_through_projection(us, SubmanifoldChart(us.chart)), NotBasic);
  }
  SUBCASE("bad complement") {
    const auto us = springs();
    AlgorithmOptions o;
    o.complement = {"px1__t"};
    CHECK_THROWS_AS(run_constraint_algorithm(us, o), DimensionMismatch);
    o.complement = {"x1_t", "px1__t"};
    CHECK_THROWS_AS(run_constraint_algorithm(us, o), DimensionMismatch);
    o.complement = {"x2", "px2__t"};
    CHECK_NOTHROW(run_constraint_algorithm(us, o));
  }
  SUBCASE("iteration limit") {
    AlgorithmOptions o;
    o.max_iter = 1;
    const auto report = run_constraint_algorithm(springs(), o);
    CHECK_FALSE(report.terminated);
    CHECK(report.final_index == -1);
    CHECK(report.levels.size() == 1);
  }
}

TEST_CASE("property: canonical equations for L = m/2 x_t^2 - V(x)") {
  std::mt19937_64 rng(0xc0457001);
  for (int i = 0; i < 25; ++i) {
    Expr V;
    const int deg = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int d = 0; d <= deg; ++d) {
      V += Expr(std::uniform_int_distribution<long>(-6, 6)(rng)) * Expr::symbol("x").pow(d);
    }
    const auto us = mechanics("m/2*x_t^2 - (" + V.str() + ")", {"m"});
    const auto report = run_constraint_algorithm(us);
    REQUIRE(report.final_index == 0);
    const auto& cc = report.levels[0].data.C.chart();
    const auto& es = report.levels[0].equations;
    const Expr dV = sym::differentiate(V, "x");
    CHECK(same_up_to_sign(equation_for(es, "x"), parse_form("d(px__t)", cc) + dV * cartan::volume_form(cc)));
    CHECK(same_up_to_sign(equation_for(es, "px__t"), parse_form("d(x) - px__t/m*d(t)", cc)));
  }
}

TEST_CASE("property: classical Hamiltonian form for random regular Lagrangians") {
  std::mt19937_64 rng(0xc0457002);
  auto coef = [&] { return Expr(std::uniform_int_distribution<long>(-3, 3)(rng)); };
  for (int i = 0; i < 30; ++i) {
    const int m = std::uniform_int_distribution<int>(1, 2)(rng);
    const auto jc = build_jet_chart(m, {"u"}, 1);
    const auto& base = jc.base();
    // Positive definite kinetic part plus random lower-order terms.
    Expr L;
    std::vector<Expr> vel;
    for (int d = 0; d < m; ++d) vel.push_back(Expr::symbol("u_" + base[static_cast<std::size_t>(d)]));
    for (int d = 0; d < m; ++d) {
      L += Expr(std::uniform_int_distribution<long>(1, 4)(rng)) * vel[static_cast<std::size_t>(d)].pow(2);
      L += coef() * Expr::symbol("u") * vel[static_cast<std::size_t>(d)];
    }
    if (m == 2) L += Expr(std::uniform_int_distribution<long>(-1, 1)(rng)) * vel[0] * vel[1];
    for (int p = 0; p < 4; ++p) L += coef() * Expr::symbol("u").pow(p) * Expr::symbol(base[0]).pow(p % 2);

    const auto us = unified::build_classical_unified(jc, L, 0);
    const auto P0 = first_constraint_manifold(us);
    const auto data = factor_through_projection(us, P0);
    const auto b = P0.embedding().bindings();
    Expr H = -L;
    DiffForm expected(data.C.chart(), m);
    for (int d = 0; d < m; ++d) {
      const std::string p = us.jets->momentum(0, jets::MultiIndex::zero(m), d);
      H += Expr::symbol(p) * vel[static_cast<std::size_t>(d)];
      expected += Expr::symbol(p) * cartan::wedge(DiffForm::differential(data.C.chart(), "u"),
                                                  cartan::volume_contraction(data.C.chart(), d));
    }
    H = sym::substitute(H, b);
    expected -= H * cartan::volume_form(data.C.chart());
    CHECK(data.hamiltonian == H);
    CHECK(data.theta_h == expected);
  }
}

TEST_CASE("property: factorization identity and monotone chains") {
  for (const auto& us : {springs(), wave(), mechanics("x_t^2/2 - x^4")}) {
    const auto report = run_constraint_algorithm(us);
    for (std::size_t l = 0; l < report.levels.size(); ++l) {
      const auto& lv = report.levels[l];
      const DiffForm theta0 = cartan::pullback(lv.P.embedding(), us.theta);
      CHECK(cartan::pullback(ChartMap::projection(lv.P.chart(), lv.data.C.chart()), lv.data.theta_h) == theta0);
      if (l > 0) CHECK(lv.data.C.chart()->dim() < report.levels[l - 1].data.C.chart()->dim());
    }
  }
}
