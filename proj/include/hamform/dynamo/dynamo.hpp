#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hamform/constraint/constraint.hpp"

namespace hamform::dynamo {

using sym::Expr;
using sym::Rational;

/// Expression compiled to a postfix sequence over numbered slots.
class Program {
 public:
  Program() = default;
  /// Every symbol of e must be one of the slot names.
  static Program compile(const Expr& e, const std::vector<std::string>& slots);
  double operator()(const double* slots) const;

 private:
  enum class Op { Const, Load, Add, Mul, Div, Pow, Call };
  struct Instr {
    Op op;
    double value = 0;
    int arg = 0;
  };
  void emit_poly(const sym::Poly& p, const std::vector<std::string>& slots);
  std::vector<Instr> code_;
  std::size_t depth_ = 0;
};

/// Explicit system y' = f(t, y) with monitored constraints and energy.
class OdeSystem {
 public:
  OdeSystem(std::string time, std::vector<std::string> state, std::vector<Expr> rhs, std::vector<Expr> constraints,
            Expr energy);

  const std::string& time() const { return time_; }
  const std::vector<std::string>& state() const { return state_; }
  const std::vector<Expr>& rhs() const { return rhs_; }
  const std::vector<Expr>& constraints() const { return constraints_; }
  const Expr& energy() const { return energy_; }

  void derivative(double t, const std::vector<double>& y, std::vector<double>& dy) const;
  std::vector<double> constraint_values(double t, const std::vector<double>& y) const;
  double energy_value(double t, const std::vector<double>& y) const;

 private:
  std::string time_;
  std::vector<std::string> state_;
  std::vector<Expr> rhs_;
  std::vector<Expr> constraints_;
  Expr energy_;
  std::vector<Program> rhs_code_;
  std::vector<Program> constraint_code_;
  Program energy_code_;
};

using Parameters = std::map<std::string, Rational>;

/// Solves the equations of a one-dimensional base for the derivatives of
/// every fiber coordinate of chart, substituting the parameters. Throws
/// NumericError when the derivative matrix is singular, a residual
/// constraint remains or a parameter is unbound.
OdeSystem compile_ode(const constraint::EquationSystem& es, const cartan::ChartPtr& chart, const Parameters& params,
                      const Expr& energy = {}, const std::vector<Expr>& constraints = {});

/// System on the fiber coordinates of the first level of a terminated
/// report: coordinates solved at later levels evolve by the chain rule, the
/// constraints of earlier levels are monitored and the energy is the final
/// Hamiltonian.
OdeSystem compile_report(const constraint::ConstraintReport& report, const Parameters& params);

struct Trajectory {
  double h = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

/// Classical fixed-step RK4 with floor((t1 - t0)/h) steps.
Trajectory integrate_rk4(const OdeSystem& sys, const std::vector<double>& y0, double t0, double t1, double h);

/// Maximum absolute constraint value over the samples.
double constraint_drift(const Trajectory& traj, const OdeSystem& sys);
/// Maximum absolute deviation of the energy from its initial value.
double energy_drift(const Trajectory& traj, const OdeSystem& sys);

/// Header "t,<state names>", 17 significant digits, LF line endings.
void write_csv(std::ostream& os, const Trajectory& traj, const OdeSystem& sys);

}  // namespace hamform::dynamo
