#pragma once

#include <map>
#include <string>
#include <vector>

#include "hamform/unified/unified.hpp"

namespace hamform::constraint {

using cartan::ChartMap;
using cartan::ChartPtr;
using cartan::DiffForm;
using cartan::VectorField;
using sym::Expr;
using unified::UnifiedSpace;

/// Submanifold of an ambient chart cut out by solving some coordinates in
/// terms of the retained ones.
class SubmanifoldChart {
 public:
  /// Whole ambient chart.
  explicit SubmanifoldChart(ChartPtr ambient);
  /// Values must depend only on retained coordinates and parameters.
  SubmanifoldChart(ChartPtr ambient, std::map<std::string, Expr> solved);

  const ChartPtr& ambient() const { return ambient_; }
  /// Chart on the retained coordinates.
  const ChartPtr& chart() const { return chart_; }
  const std::map<std::string, Expr>& solved() const { return solved_; }
  std::vector<std::string> retained() const { return chart_->coordinate_names(); }
  const ChartMap& embedding() const { return embedding_; }
  /// One expression per solved coordinate: coordinate minus its value.
  std::vector<Expr> defining_equations() const;
  /// Further restriction by solving retained coordinates; values may use
  /// the remaining retained coordinates.
  SubmanifoldChart restrict(const std::map<std::string, Expr>& more) const;

 private:
  ChartPtr ambient_;
  std::map<std::string, Expr> solved_;
  ChartPtr chart_;
  ChartMap embedding_;
};

struct FieldEquation {
  std::string direction;
  DiffForm residual;
};

struct EquationSystem {
  std::vector<FieldEquation> equations;
  std::vector<Expr> scalar_equations;
};

struct HamiltonianData {
  SubmanifoldChart C;
  DiffForm theta_h;
  /// Minus the coefficient of the volume form.
  Expr hamiltonian;
};

/// Solves the coefficients of L_Z Theta and Z _| Theta over the dropped
/// coordinate fields. Dropped coordinates are tried first, latest first;
/// then the remaining fiber coordinates, latest first.
SubmanifoldChart first_constraint_manifold(const UnifiedSpace& us);

/// Theta_h on the projection of P: requires the restriction of Theta to P
/// to be basic for the projection and checks the pullback identity.
HamiltonianData factor_through_projection(const UnifiedSpace& us, const SubmanifoldChart& P);

/// X _| d(theta) for each direction, theta and the directions living on chart.
EquationSystem field_equations(const DiffForm& theta, const std::vector<std::string>& directions);
/// Same, over every fiber coordinate of the form's chart.
EquationSystem field_equations(const DiffForm& theta);

/// New constraints implied by the equations. For m = 1 the residuals are
/// read as affine equations in the first derivatives of the fiber
/// coordinates; for m > 1 only residuals proportional to the volume form
/// count. Constraints are returned in normal form.
std::vector<Expr> consistency_constraints(const EquationSystem& es, const ChartPtr& chart);

/// Z _| d(Theta) pulled back to P for Z over the given coordinate fields.
/// Throws DimensionMismatch unless the fields complete TP + ker Tp to the
/// whole tangent space, without redundancy, at a generic point.
std::vector<DiffForm> admissible_lift_equations(const UnifiedSpace& us, const SubmanifoldChart& P,
                                                const std::vector<std::string>& complement);

/// Complement used when none is given. Each solved coordinate that is not
/// dropped proposes the first coordinate of the same role in its value;
/// proposals are kept while independent, then coordinate fields are added
/// in chart order until the span is complete.
std::vector<std::string> default_complement(const UnifiedSpace& us, const SubmanifoldChart& P);

struct Level {
  int index = 0;
  SubmanifoldChart P;
  HamiltonianData data;
  EquationSystem equations;
  std::vector<Expr> constraints;
};

struct ConstraintReport {
  std::vector<Level> levels;
  bool terminated = false;
  int final_index = -1;
  std::vector<std::string> complement;
  std::vector<DiffForm> lift_forms;
};

struct AlgorithmOptions {
  int max_iter = 16;
  /// Overrides the default complement at the final level.
  std::vector<std::string> complement;
};

/// Iterates first constraint, factorization, field equations and
/// consistency constraints until no new constraint appears. Errors carry
/// the level at which they occurred.
ConstraintReport run_constraint_algorithm(const UnifiedSpace& us, const AlgorithmOptions& options = {});

}  // namespace hamform::constraint
