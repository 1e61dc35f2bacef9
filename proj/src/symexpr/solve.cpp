#include "hamform/symexpr/solve.hpp"

#include "hamform/errors.hpp"

namespace hamform::sym {

LinearSolveResult solve_affine(const std::vector<Expr>& equations, const std::vector<Symbol>& unknowns) {
  const std::size_t n = unknowns.size();
  struct Row {
    std::vector<Expr> a;
    Expr b;
  };
  std::vector<Row> rows;
  rows.reserve(equations.size());

  for (std::size_t i = 0; i < equations.size(); ++i) {
    const Expr& e = equations[i];
    const auto syms = e.free_symbols();
    Row r;
    r.a.resize(n);
    Expr linear;
    for (std::size_t j = 0; j < n; ++j) {
      if (syms.count(unknowns[j].name()) == 0) continue;
      r.a[j] = differentiate(e, unknowns[j]);
      linear += r.a[j] * Expr(unknowns[j]);
    }
    r.b = e - linear;
    auto mentions_unknown = [&](const Expr& x) {
      if (x.is_constant()) return false;
      const auto s = x.free_symbols();
      for (const auto& u : unknowns) {
        if (s.count(u.name()) != 0) return true;
      }
      return false;
    };
    for (const auto& c : r.a) {
      if (mentions_unknown(c)) throw NonAffine(e.str(), i);
    }
    if (mentions_unknown(r.b)) throw NonAffine(e.str(), i);
    rows.push_back(std::move(r));
  }

  std::vector<bool> used(rows.size(), false);
  std::vector<long> pivot_row(n, -1);
  LinearSolveResult out;

  for (std::size_t j = 0; j < n; ++j) {
    std::size_t r = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!used[i] && !rows[i].a[j].is_zero()) {
        r = i;
        break;
      }
    }
    if (r == rows.size()) continue;
    const Expr inv = Expr(1L) / rows[r].a[j];
    for (auto& c : rows[r].a) {
      if (!c.is_zero()) c = c * inv;
    }
    rows[r].b = rows[r].b * inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i].a[j].is_zero()) continue;
      const Expr f = rows[i].a[j];
      for (std::size_t k = 0; k < n; ++k) {
        if (!rows[r].a[k].is_zero()) rows[i].a[k] = rows[i].a[k] - f * rows[r].a[k];
      }
      rows[i].b = rows[i].b - f * rows[r].b;
    }
    used[r] = true;
    pivot_row[j] = static_cast<long>(r);
    out.pivots.push_back(unknowns[j].name());
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (pivot_row[j] < 0) out.free_unknowns.push_back(unknowns[j].name());
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (pivot_row[j] < 0) continue;
    const Row& r = rows[static_cast<std::size_t>(pivot_row[j])];
    Expr value = -r.b;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j && !r.a[k].is_zero()) value = value - r.a[k] * Expr(unknowns[k]);
    }
    out.solved.emplace(unknowns[j].name(), value);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!used[i] && !rows[i].b.is_zero()) out.residual_constraints.push_back(rows[i].b);
  }
  return out;
}

}  // namespace hamform::sym
