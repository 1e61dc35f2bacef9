#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamform/cartan/form.hpp"
#include "hamform/jets/jet_chart.hpp"

namespace hamform::unified {

using cartan::ChartMap;
using cartan::ChartPtr;
using cartan::DiffForm;
using cartan::VectorField;
using sym::Expr;

enum class Builder { Classical, General, Herglotz };

const char* builder_name(Builder b);

/// An ideal generator together with the names of its multipliers. A
/// generator of degree d receives one multiplier per increasing d-tuple
/// of base directions; an empty list requests default names.
struct Generator {
  DiffForm form;
  std::vector<std::string> multipliers;
};

/// Chart, Lagrangian m-form, ideal generators and the coordinates dropped by
/// the projection onto the reduced space.
struct VariationalProblem {
  std::string label;
  ChartPtr chart;
  DiffForm lambda;
  std::vector<Generator> generators;
  std::vector<std::string> drop;
};

struct UnifiedSpace {
  std::string label;
  Builder builder = Builder::General;
  ChartPtr chart;
  DiffForm theta;
  /// Chart of the reduced space: chart minus dropped coordinates.
  ChartPtr target;
  std::vector<std::string> dropped;
  /// Set by the classical builder: order k+1 with momenta up to k.
  std::optional<jets::JetChart> jets;
  Expr lagrangian;
  int k = 0;

  ChartMap projection() const { return ChartMap::projection(chart, target); }
  /// Coordinate fields of the dropped coordinates.
  std::vector<VectorField> vertical_fields() const;
};

/// Theta_L = L eta + p^{I,i}_a theta^a_I /\ eta_i for |I| <= k on the chart of
/// order k+1 with momenta up to k; the top-order derivatives are dropped.
/// Base names, fields and parameters are taken from jc.
UnifiedSpace build_classical_unified(const jets::JetChart& jc, const Expr& L, int k, std::string label = {});

/// Theta = lambda + sum of multiplier * generator /\ eta_I.
UnifiedSpace build_general_unified(const VariationalProblem& vp);

/// Names used for the Herglotz action coordinates: "z" when m = 1, else
/// "z" + base name.
std::vector<std::string> herglotz_z_names(const std::vector<std::string>& base);

/// Theta_H = dz^i/\eta_i + p^i_a theta^a /\ eta_i + mu (L eta - dz^i/\eta_i) on
/// (base, fields, velocities, z, momenta, mu); the velocities are dropped.
UnifiedSpace build_herglotz_unified(const jets::JetChart& jc, const Expr& L, std::string label = {});

/// Components of the map onto the reduced multimomentum space: q and one
/// q-momentum per momentum ("q" replaces the leading "p" of the name).
std::map<std::string, Expr> legendre_components(const UnifiedSpace& us);

struct CompatibilityViolation {
  std::string z;
  std::string y;  // empty for a nonzero Z contraction of Theta
  DiffForm form;
};

struct CompatibilityReport {
  bool compatible = true;
  std::vector<CompatibilityViolation> violations;
};

/// Checks Z _| Theta = 0 and Y _| L_Z Theta = 0 for Z over the dropped
/// coordinate fields and Y over all fiber coordinate fields.
CompatibilityReport check_compatibility(const UnifiedSpace& us);

/// Multipliers lifting a Lagrangian extremal, keyed by momentum name:
/// dL/du_{I+1_i} + c for |I| = k and dL/du_{I+1_i} + D_j lambda^{I+1_i,j} + c
/// below. c must have zero symmetric part. Values live on the chart of
/// order 2k+1.
std::map<std::string, Expr> lift_multipliers(const jets::JetChart& jc, const Expr& L, int k,
                                             const std::map<std::string, Expr>& c = {});

}  // namespace hamform::unified
