#pragma once

#include <map>
#include <string>
#include <vector>

#include "hamform/symexpr/expr.hpp"

namespace hamform::sym {

struct LinearSolveResult {
  /// Pivot unknown -> value; values never mention another pivot unknown.
  std::map<std::string, Expr> solved;
  /// Pivot unknowns in the order they were eliminated.
  std::vector<std::string> pivots;
  /// Leftover equations free of every unknown, each meaning "expr = 0".
  std::vector<Expr> residual_constraints;
  /// Unknowns that received no pivot; they may occur in solved values.
  std::vector<std::string> free_unknowns;
};

/// Gauss-Jordan elimination of a system affine in the unknowns. Columns are
/// taken in the given order and each pivots on the first remaining equation
/// with a nonzero coefficient. Throws NonAffine when a coefficient depends
/// on an unknown.
LinearSolveResult solve_affine(const std::vector<Expr>& equations, const std::vector<Symbol>& unknowns);

}  // namespace hamform::sym
