#include <doctest.h>

#include "hamform/errors.hpp"
#include "hamform/symexpr/parser.hpp"
#include "hamform/symexpr/solve.hpp"
#include "random_expr.hpp"

using namespace hamform;
using namespace hamform::sym;
using testing_support::ExprGen;

namespace {

Expr P(const std::string& s) { return parse_expr(s); }

}  // namespace

TEST_CASE("parse and render") {
  const NameSet names{"m", "dx1", "dx2"};
  const Expr e = parse_expr("m/2*(dx1+dx2)^2", names);
  CHECK(e.str() == "1/2*dx1^2*m + dx1*dx2*m + 1/2*dx2^2*m");
  CHECK(parse_expr(e.str(), names) == e);

  const Expr spring = P("k_1*(x_1 - l_1)^2/2");
  CHECK(spring == P("k_1*x_1^2/2 - k_1*x_1*l_1 + k_1*l_1^2/2"));

  CHECK(P("2^-1") == Expr(Rational(1, 2)));
  CHECK(P("-x^2") == -(P("x") * P("x")));
  CHECK(P("2^3^2") == Expr(512L));
  CHECK(P("a - b - c") == P("a") - P("b") - P("c"));
  CHECK(P("a/b/c") == P("a") / (P("b") * P("c")));
  CHECK(P("3/4") == Expr(Rational(3, 4)));
  CHECK(P("p/(m*k)").str() == "p/(k*m)");
  CHECK(P("(a+b)/(c+d)").str() == "(a + b)/(c + d)");
  CHECK(P("x/(2*y)").str() == "x/(2*y)");
  CHECK(P("-x/y").str() == "-x/y");
}

TEST_CASE("parse errors") {
  const NameSet names{"x"};
  try {
    parse_expr("x + * 2", names);
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    parse_expr("x + y", names);
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.name() == "y");
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse_expr("foo(x)", names), UnknownIdentifier);
  CHECK_THROWS_AS(parse_expr("x^x", names), SyntaxError);
  CHECK_THROWS_AS(parse_expr("(x", names), SyntaxError);
  CHECK_THROWS_AS(parse_expr("x /\\ x", names), SyntaxError);
  CHECK_THROWS_AS(parse_expr("", names), SyntaxError);
}

TEST_CASE("no trigonometric simplification") {
  const Expr e = P("sin(x)^2 + cos(x)^2");
  CHECK_FALSE(equals_zero(e - Expr(1L)));
  CHECK(e == P("cos(x)^2 + sin(x)^2"));
  CHECK(P("sin(x+y)") == P("sin(y+x)"));
  CHECK_FALSE(equals_zero(P("sin(x)")));
}

TEST_CASE("zero test") {
  CHECK(equals_zero(P("(x+1)^2 - x^2 - 2*x - 1")));
  CHECK(equals_zero(P("1/(x-1) - 1/(x+1) - 2/(x^2-1)")));
  CHECK(equals_zero(P("(x^2-y^2)/(x-y) - x - y")));
}

TEST_CASE("differentiate") {
  CHECK(differentiate(P("x^2"), "x") == P("2*x"));
  CHECK(differentiate(P("exp(2*t)"), "t") == P("2*exp(2*t)"));
  CHECK(differentiate(P("sin(x^2)"), "x") == P("2*x*cos(x^2)"));
  CHECK(differentiate(P("cos(x)"), "x") == P("-sin(x)"));
  CHECK(differentiate(P("sqrt(x)"), "x") == P("1/(2*sqrt(x))"));
  CHECK(differentiate(P("ln(x^2+1)"), "x") == P("2*x/(x^2+1)"));
  CHECK(differentiate(P("1/x"), "x") == P("-1/x^2"));
  const Expr L = P("m/2*(x1_t + x2_t)^2 - k1/2*(x1-l1)^2 - k2/2*(x2-x1-l2)^2 + m*g*x2");
  CHECK(differentiate(L, "x1_t") == P("m*(x1_t + x2_t)"));
  CHECK(differentiate(L, "y").is_zero());
}

TEST_CASE("substitute") {
  const Expr e = P("x1_t + x2_t");
  CHECK(substitute(e, {{"x2_t", P("p/m - x1_t")}}) == P("p/m"));
  CHECK(substitute(e, {}) == e);
  CHECK(substitute(P("x + 2*y"), {{"x", P("y")}, {"y", P("x")}}) == P("y + 2*x"));
  CHECK(substitute(P("sin(x)"), {{"x", P("2*t")}}) == P("sin(2*t)"));
  CHECK(substitute(P("x/y"), {{"y", P("x")}}) == Expr(1L));
}

TEST_CASE("evaluate and helpers") {
  CHECK(evaluate(P("x^2/y + 1/3"), {{"x", Rational(2)}, {"y", Rational(3)}}) == Rational(5, 3));
  CHECK_THROWS_AS(evaluate(P("1/(x-1)"), {{"x", Rational(1)}}), DomainError);
  CHECK(constraint_normal_form(P("-x/2 + y/3")) == P("3*x - 2*y"));
  CHECK(proportional(P("2*x - 2*y"), P("y - x")));
  CHECK_FALSE(proportional(P("x"), P("y")));
  CHECK(parse_rational("49/5") == Rational(49, 5));
  CHECK(parse_rational("-1.25") == Rational(-5, 4));
  CHECK(parse_rational("7") == Rational(7));
  CHECK_THROWS(parse_rational("a"));
}

TEST_CASE("solve_affine") {
  SUBCASE("springs momenta") {
    const auto r = solve_affine({P("p1 - m*(x1_t + x2_t)"), P("p2 - m*(x1_t + x2_t)")},
                                {Symbol("p1"), Symbol("p2")});
    CHECK(r.solved.at("p1") == P("m*(x1_t + x2_t)"));
    CHECK(r.solved.at("p2") == P("m*(x1_t + x2_t)"));
    CHECK(r.residual_constraints.empty());
    CHECK(r.free_unknowns.empty());
  }
  SUBCASE("residual") {
    const auto r = solve_affine({P("p - k*x"), P("p - k*y")}, {Symbol("p")});
    CHECK(r.solved.at("p") == P("k*x"));
    REQUIRE(r.residual_constraints.size() == 1);
    CHECK(proportional(r.residual_constraints[0], P("k*(x - y)")));
  }
  SUBCASE("empty") {
    const auto r = solve_affine({}, {});
    CHECK(r.solved.empty());
    CHECK(r.residual_constraints.empty());
  }
  SUBCASE("free unknowns") {
    const auto r = solve_affine({P("a + b - 1")}, {Symbol("a"), Symbol("b")});
    CHECK(r.solved.at("a") == P("1 - b"));
    CHECK(r.free_unknowns == std::vector<std::string>{"b"});
  }
  SUBCASE("non affine") {
    try {
      solve_affine({P("a - 1"), P("a*b - 2")}, {Symbol("a"), Symbol("b")});
      FAIL("expected NonAffine");
    } catch (const NonAffine& e) {
      CHECK(e.index() == 1);
    }
  }
}

TEST_CASE("property: commutativity and distributivity") {
  ExprGen gen(0x5eed0001);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    auto a = build_node(gen.node(3));
    auto b = build_node(gen.node(3));
    auto c = build_node(gen.node(2));
    if (!a || !b || !c) continue;
    ++checked;
    CHECK(*a + *b == *b + *a);
    CHECK(*a * *b == *b * *a);
    CHECK(equals_zero(*a * (*b + *c) - *a * *b - *a * *c));
    CHECK(canonicalize(canonicalize(*a)) == canonicalize(*a));
  }
  CHECK(checked > 150);
}

TEST_CASE("property: Leibniz rule") {
  ExprGen gen(0x5eed0002);
  for (int i = 0; i < 200; ++i) {
    auto a = build_node(gen.node(3));
    auto b = build_node(gen.node(3));
    if (!a || !b) continue;
    for (const char* s : {"x", "y"}) {
      const Expr lhs = differentiate(*a * *b, s);
      const Expr rhs = differentiate(*a, s) * *b + *a * differentiate(*b, s);
      CHECK(equals_zero(lhs - rhs));
    }
  }
}

TEST_CASE("property: canonical form agrees with direct evaluation at 16 points") {
  ExprGen gen(0x5eed0003);
  int cases = 0;
  for (int i = 0; i < 200; ++i) {
    const auto tree = gen.node(4);
    std::optional<Expr> e;
    try {
      e = parse_expr(testing_support::to_text(tree));
    } catch (const DomainError&) {
      continue;
    }
    ++cases;
    int points = 0;
    for (int attempt = 0; points < 16 && attempt < 64; ++attempt) {
      const std::map<std::string, Rational> at{
          {"x", gen.point_rational()}, {"y", gen.point_rational()}, {"z", gen.point_rational()}};
      const auto direct = testing_support::eval_node(tree, at);
      if (!direct) continue;
      Rational canonical;
      try {
        canonical = evaluate(*e, at);
      } catch (const DomainError&) {
        continue;
      }
      CHECK(canonical == *direct);
      ++points;
    }
    CHECK(points == 16);
  }
  CHECK(cases > 150);
}

TEST_CASE("property: solve_affine re-substitution leaves only residuals") {
  ExprGen gen(0x5eed0004, {"a", "b"});
  const std::vector<Symbol> unknowns{Symbol("u"), Symbol("v"), Symbol("w")};
  for (int i = 0; i < 200; ++i) {
    const int neq = std::uniform_int_distribution<int>(1, 4)(gen.rng());
    std::vector<Expr> eqs;
    for (int k = 0; k < neq; ++k) {
      Expr e;
      for (const auto& u : unknowns) {
        if (std::uniform_int_distribution<int>(0, 2)(gen.rng()) == 0) continue;
        auto c = build_node(gen.node(1));
        if (c) e += *c * Expr(u);
      }
      auto c0 = build_node(gen.node(2));
      if (c0) e += *c0;
      eqs.push_back(e);
    }
    const auto r = solve_affine(eqs, unknowns);
    Bindings b(r.solved.begin(), r.solved.end());
    for (const auto& [name, value] : r.solved) {
      for (const auto& [other, v] : r.solved) CHECK_FALSE(value.depends_on(other));
    }
    for (const auto& res : r.residual_constraints) {
      for (const auto& u : unknowns) CHECK_FALSE(res.depends_on(u.name()));
    }
    for (const auto& e : eqs) {
      const Expr reduced = substitute(e, b);
      if (reduced.is_zero()) continue;
      // Otherwise a combination of residual constraints.
      for (const auto& u : unknowns) CHECK_FALSE(reduced.depends_on(u.name()));
      CHECK_FALSE(r.residual_constraints.empty());
    }
  }
}
