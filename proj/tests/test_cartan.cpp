#include <doctest.h>

#include <random>

#include "hamform/cartan/form.hpp"
#include "hamform/errors.hpp"

using namespace hamform;
using namespace hamform::cartan;
using sym::Expr;

namespace {

ChartPtr chart_of(const std::vector<std::string>& base, const std::vector<std::string>& fiber,
                  std::vector<std::string> params = {}) {
  std::vector<Coordinate> cs;
  for (const auto& b : base) cs.push_back({b, Role::Base, 0});
  for (const auto& f : fiber) cs.push_back({f, Role::Auxiliary, 0});
  return make_chart(std::move(cs), std::move(params));
}

class FormGen {
 public:
  FormGen(std::uint64_t seed, ChartPtr chart) : rng_(seed), chart_(std::move(chart)) {}

  Expr poly() {
    Expr e;
    const int terms = std::uniform_int_distribution<int>(0, 3)(rng_);
    for (int t = 0; t < terms; ++t) {
      Expr m(std::uniform_int_distribution<long>(-5, 5)(rng_));
      const int factors = std::uniform_int_distribution<int>(0, 2)(rng_);
      for (int f = 0; f < factors; ++f) m *= Expr::symbol(chart_->name(pick()));
      e += m;
    }
    return e;
  }

  DiffForm form(int degree) {
    DiffForm w(chart_, degree);
    const int terms = std::uniform_int_distribution<int>(1, 3)(rng_);
    for (int t = 0; t < terms; ++t) {
      DiffForm::Index idx;
      for (int k = 0; k < degree; ++k) idx.push_back(static_cast<int>(pick()));
      w.add_term(idx, poly());
    }
    return w;
  }

  VectorField field() {
    std::map<std::string, Expr> comps;
    for (std::size_t i = 0; i < chart_->dim(); ++i) {
      if (std::uniform_int_distribution<int>(0, 1)(rng_) == 0) comps.emplace(chart_->name(i), poly());
    }
    return VectorField(chart_, comps);
  }

  int degree(int max) { return std::uniform_int_distribution<int>(0, max)(rng_); }

 private:
  std::size_t pick() { return std::uniform_int_distribution<std::size_t>(0, chart_->dim() - 1)(rng_); }
  std::mt19937_64 rng_;
  ChartPtr chart_;
};

int sign_pow(int a, int b) { return (a * b) % 2 == 0 ? 1 : -1; }

}  // namespace

TEST_CASE("wedge basics") {
  auto c = chart_of({"x"}, {"y", "p"});
  const auto dx = DiffForm::differential(c, "x");
  const auto dy = DiffForm::differential(c, "y");
  const auto xy = wedge(dx, dy);
  CHECK(xy.degree() == 2);
  CHECK(xy.coefficient(std::vector<std::string>{"x", "y"}) == Expr(1L));
  CHECK(xy.coefficient(std::vector<std::string>{"y", "x"}) == Expr(-1L));
  CHECK(wedge(dx, dx).is_zero());
  CHECK(wedge(dy, dx) == -xy);
  CHECK(xy.str() == "d(x)/\\d(y)");
  CHECK(wedge(wedge(dx, dy), DiffForm::differential(c, "p")).str() == "d(x)/\\d(y)/\\d(p)");
  CHECK(wedge(xy, DiffForm::differential(c, "p")).degree() == 3);
  CHECK(wedge(xy, xy).is_zero());

  auto other = chart_of({"x"}, {"z"});
  CHECK_THROWS_AS(wedge(dx, DiffForm::differential(other, "z")), ChartMismatch);
}

TEST_CASE("springs: the velocity term cancels against the contact part") {
  auto c = chart_of({"t"}, {"x1", "x2", "x1_t", "x2_t", "p1", "p2"}, {"m", "g", "k1", "k2", "l1", "l2"});
  const auto theta = parse_form(
      "(m/2*(x1_t+x2_t)^2 - k1/2*(x1-l1)^2 - k2/2*(x2-x1-l2)^2 + m*g*x2)*d(t)"
      " + p1*(d(x1) - x1_t*d(t)) + p2*(d(x2) - x2_t*d(t))",
      c);
  CHECK(theta.coefficient(std::vector<std::string>{"t"}) ==
        parse_scalar("m/2*(x1_t+x2_t)^2 - k1/2*(x1-l1)^2 - k2/2*(x2-x1-l2)^2 + m*g*x2 - p1*x1_t - p2*x2_t", *c));
  const auto lz = lie_derivative(VectorField::coordinate(c, "x1_t"), theta);
  CHECK(lz == parse_form("(m*(x1_t+x2_t) - p1)*d(t)", c));
  const auto eqs = coefficient_equations(lz);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0] == parse_scalar("m*(x1_t+x2_t) - p1", *c));
}

TEST_CASE("exterior derivative and contraction") {
  auto c = chart_of({"x"}, {"y", "p"});
  CHECK(exterior_derivative(parse_form("p*d(x)", c)) == parse_form("d(p)/\\d(x)", c));
  CHECK(exterior_derivative(parse_form("x^2*d(y)", c)) == parse_form("2*x*d(x)/\\d(y)", c));
  CHECK(interior_product(VectorField::coordinate(c, "p"), parse_form("d(p)/\\d(x)", c)) == parse_form("d(x)", c));
  CHECK(exterior_derivative(DiffForm::scalar(c, Expr::symbol("x") * Expr::symbol("p"))) ==
        parse_form("p*d(x) + x*d(p)", c));
  CHECK(lie_derivative(VectorField::coordinate(c, "x"), parse_form("3*d(y)/\\d(p)", c)).is_zero());

  // d(dz/\eta_t) over (t,x,z): dz/\dx is closed.
  auto h = chart_of({"t", "x"}, {"zt", "zx"});
  const auto lam = wedge(DiffForm::differential(h, "zt"), volume_contraction(h, 0)) +
                   wedge(DiffForm::differential(h, "zx"), volume_contraction(h, 1));
  CHECK(exterior_derivative(lam).is_zero());
  CHECK(volume_contraction(h, 0) == parse_form("d(x)", h));
  CHECK(volume_contraction(h, 1) == parse_form("-d(t)", h));
}

TEST_CASE("form rendering and parsing") {
  auto c = chart_of({"t"}, {"x", "p"}, {"m"});
  const auto w = parse_form("p*d(x) - (p^2/(2*m) + x)*d(t)", c);
  CHECK(w.str() == "(-2*m*x - p^2)/(2*m)*d(t) + p*d(x)");
  CHECK(parse_form("(x + p)*d(t)", c).str() == "(p + x)*d(t)");
  CHECK(parse_form(w.str(), c) == w);
  CHECK(parse_form("-d(t) + d(x)", c).str() == "-d(t) + d(x)");
  CHECK(parse_form("-2*x*d(t) - d(x)", c).str() == "-2*x*d(t) - d(x)");
  CHECK(DiffForm(c, 2).str() == "0");
  CHECK_THROWS_AS(parse_form("d(q)", c), UnknownIdentifier);
  CHECK_THROWS_AS(parse_form("d(x) + x", c), SyntaxError);
  CHECK_THROWS_AS(parse_form("x/d(t)", c), SyntaxError);
}

TEST_CASE("pullback") {
  auto w = chart_of({"t"}, {"x1", "x2", "x1_t", "x2_t", "p1", "p2"}, {"m"});
  auto p0 = chart_of({"t"}, {"x1", "x2", "x1_t", "p"}, {"m"});
  const auto i0 = ChartMap::embedding(
      p0, w, {{"p1", Expr::symbol("p")}, {"p2", Expr::symbol("p")}, {"x2_t", parse_scalar("p/m - x1_t", *p0)}});
  const auto theta = parse_form("p1*(d(x1) - x1_t*d(t)) + p2*(d(x2) - x2_t*d(t))", w);
  CHECK(pullback(i0, theta) == parse_form("-p^2/m*d(t) + p*d(x1) + p*d(x2)", p0));
  CHECK(pullback(ChartMap::identity(w), theta) == theta);
  CHECK_THROWS_AS(pullback(i0, parse_form("d(x1)", p0)), ChartMismatch);
  CHECK_THROWS_AS(ChartMap::embedding(p0, w, {}), ChartMismatch);
}

TEST_CASE("property: exterior algebra identities on random forms") {
  auto c = chart_of({"t", "x"}, {"u", "v", "p", "q"});
  FormGen gen(0xca57a001, c);
  for (int i = 0; i < 200; ++i) {
    const int da = gen.degree(3);
    const int db = gen.degree(2);
    const auto a = gen.form(da);
    const auto b = gen.form(db);
    const auto x = gen.field();
    CHECK(exterior_derivative(exterior_derivative(a)).is_zero());
    CHECK(wedge(a, b) == Expr(sign_pow(da, db)) * wedge(b, a));
    CHECK(exterior_derivative(wedge(a, b)) ==
          wedge(exterior_derivative(a), b) + Expr(da % 2 == 0 ? 1L : -1L) * wedge(a, exterior_derivative(b)));
    if (da + db > 0) {
      CHECK(interior_product(x, wedge(a, b)) ==
            wedge(interior_product(x, a), b) + Expr(da % 2 == 0 ? 1L : -1L) * wedge(a, interior_product(x, b)));
    }
    CHECK(interior_product(x, interior_product(x, a)).is_zero());
    CHECK(lie_derivative(x, exterior_derivative(a)) == exterior_derivative(lie_derivative(x, a)));
    CHECK(lie_derivative(x, a) ==
          exterior_derivative(interior_product(x, a)) + interior_product(x, exterior_derivative(a)));
  }
}

TEST_CASE("property: pullback commutes with d") {
  auto src = chart_of({"s"}, {"a", "b"});
  auto tgt = chart_of({"t"}, {"u", "v"});
  FormGen src_gen(0xca57a002, src);
  FormGen tgt_gen(0xca57a003, tgt);
  for (int i = 0; i < 200; ++i) {
    const ChartMap phi(src, tgt, {{"t", src_gen.poly()}, {"u", src_gen.poly()}, {"v", src_gen.poly()}});
    const auto w = tgt_gen.form(1);
    CHECK(pullback(phi, exterior_derivative(w)) == exterior_derivative(pullback(phi, w)));
    const auto f = tgt_gen.form(0);
    CHECK(pullback(phi, exterior_derivative(f)) == exterior_derivative(pullback(phi, f)));
  }
}
