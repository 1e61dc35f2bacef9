#include "hamform/dynamo/dynamo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hamform/errors.hpp"
#include "hamform/symexpr/solve.hpp"

namespace hamform::dynamo {

namespace {

const char* kDerivativePrefix = "__dt_";

double apply_func(sym::Func f, double x) {
  switch (f) {
    case sym::Func::Sin: return std::sin(x);
    case sym::Func::Cos: return std::cos(x);
    case sym::Func::Exp: return std::exp(x);
    case sym::Func::Sqrt: return std::sqrt(x);
    case sym::Func::Ln: return std::log(x);
  }
  return std::nan("");
}

sym::Bindings parameter_bindings(const Parameters& params) {
  sym::Bindings b;
  for (const auto& [name, value] : params) b.emplace(name, Expr(value));
  return b;
}

void require_bound(const Expr& e, const std::vector<std::string>& slots, const std::string& what) {
  for (const auto& s : e.free_symbols()) {
    if (std::find(slots.begin(), slots.end(), s) == slots.end()) {
      throw NumericError(what + " depends on unbound symbol '" + s + "'");
    }
  }
}

std::vector<std::string> slots_of(const std::string& time, const std::vector<std::string>& state) {
  std::vector<std::string> slots{time};
  slots.insert(slots.end(), state.begin(), state.end());
  return slots;
}

}  // namespace

Program Program::compile(const Expr& e, const std::vector<std::string>& slots) {
  Program p;
  p.emit_poly(e.num(), slots);
  if (!(e.den().is_constant() && e.den().constant_value() == 1)) {
    p.emit_poly(e.den(), slots);
    p.code_.push_back({Op::Div});
  }
  std::size_t depth = 0;
  for (const auto& in : p.code_) {
    switch (in.op) {
      case Op::Const:
      case Op::Load: ++depth; break;
      case Op::Add:
      case Op::Mul:
      case Op::Div: --depth; break;
      case Op::Pow:
      case Op::Call: break;
    }
    p.depth_ = std::max(p.depth_, depth);
  }
  return p;
}

void Program::emit_poly(const sym::Poly& poly, const std::vector<std::string>& slots) {
  if (poly.is_zero()) {
    code_.push_back({Op::Const, 0.0});
    return;
  }
  bool first = true;
  for (const auto& term : poly.terms()) {
    code_.push_back({Op::Const, sym::to_double(term.coef)});
    for (const auto& [atom, exponent] : term.mono) {
      if (atom.is_symbol()) {
        const auto it = std::find(slots.begin(), slots.end(), atom.key());
        if (it == slots.end()) throw NumericError("unbound symbol '" + atom.key() + "'");
        code_.push_back({Op::Load, 0.0, static_cast<int>(it - slots.begin())});
      } else {
        const Expr& arg = atom.arg();
        emit_poly(arg.num(), slots);
        if (!(arg.den().is_constant() && arg.den().constant_value() == 1)) {
          emit_poly(arg.den(), slots);
          code_.push_back({Op::Div});
        }
        code_.push_back({Op::Call, 0.0, static_cast<int>(atom.func())});
      }
      if (exponent != 1) code_.push_back({Op::Pow, 0.0, exponent});
      code_.push_back({Op::Mul});
    }
    if (!first) code_.push_back({Op::Add});
    first = false;
  }
}

double Program::operator()(const double* slots) const {
  std::vector<double> stack;
  stack.reserve(depth_);
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const: stack.push_back(in.value); break;
      case Op::Load: stack.push_back(slots[in.arg]); break;
      case Op::Add: {
        const double b = stack.back();
        stack.pop_back();
        stack.back() += b;
        break;
      }
      case Op::Mul: {
        const double b = stack.back();
        stack.pop_back();
        stack.back() *= b;
        break;
      }
      case Op::Div: {
        const double b = stack.back();
        stack.pop_back();
        stack.back() /= b;
        break;
      }
      case Op::Pow: {
        double& x = stack.back();
        const int n = in.arg;
        double r = 1.0;
        double base = n < 0 ? 1.0 / x : x;
        for (int k = std::abs(n); k > 0; k >>= 1) {
          if (k & 1) r *= base;
          base *= base;
        }
        x = r;
        break;
      }
      case Op::Call: stack.back() = apply_func(static_cast<sym::Func>(in.arg), stack.back()); break;
    }
  }
  return stack.back();
}

OdeSystem::OdeSystem(std::string time, std::vector<std::string> state, std::vector<Expr> rhs,
                     std::vector<Expr> constraints, Expr energy)
    : time_(std::move(time)),
      state_(std::move(state)),
      rhs_(std::move(rhs)),
      constraints_(std::move(constraints)),
      energy_(std::move(energy)) {
  if (rhs_.size() != state_.size()) throw DimensionMismatch("one right-hand side per state coordinate is required");
  const auto slots = slots_of(time_, state_);
  for (std::size_t i = 0; i < rhs_.size(); ++i) {
    require_bound(rhs_[i], slots, "right-hand side of " + state_[i]);
    rhs_code_.push_back(Program::compile(rhs_[i], slots));
  }
  for (const auto& c : constraints_) {
    require_bound(c, slots, "constraint " + c.str());
    constraint_code_.push_back(Program::compile(c, slots));
  }
  require_bound(energy_, slots, "energy");
  energy_code_ = Program::compile(energy_, slots);
}

namespace {

std::vector<double> pack(double t, const std::vector<double>& y) {
  std::vector<double> s;
  s.reserve(y.size() + 1);
  s.push_back(t);
  s.insert(s.end(), y.begin(), y.end());
  return s;
}

}  // namespace

void OdeSystem::derivative(double t, const std::vector<double>& y, std::vector<double>& dy) const {
  const auto s = pack(t, y);
  dy.resize(rhs_code_.size());
  for (std::size_t i = 0; i < rhs_code_.size(); ++i) dy[i] = rhs_code_[i](s.data());
}

std::vector<double> OdeSystem::constraint_values(double t, const std::vector<double>& y) const {
  const auto s = pack(t, y);
  std::vector<double> out;
  for (const auto& c : constraint_code_) out.push_back(c(s.data()));
  return out;
}

double OdeSystem::energy_value(double t, const std::vector<double>& y) const {
  const auto s = pack(t, y);
  return energy_code_(s.data());
}

OdeSystem compile_ode(const constraint::EquationSystem& es, const cartan::ChartPtr& chart, const Parameters& params,
                      const Expr& energy, const std::vector<Expr>& constraints) {
  if (chart->base_dim() != 1) throw DimensionMismatch("numeric integration requires base dimension 1");
  const auto state = chart->fiber_names();
  std::vector<sym::Symbol> unknowns;
  for (const auto& y : state) unknowns.emplace_back(kDerivativePrefix + y);
  std::vector<Expr> eqs;
  for (const auto& eq : es.equations) {
    Expr e;
    for (const auto& [idx, coef] : eq.residual.terms()) {
      const auto i = static_cast<std::size_t>(idx.at(0));
      e += i == 0 ? coef : coef * Expr::symbol(kDerivativePrefix + chart->name(i));
    }
    eqs.push_back(e);
  }
  const auto solved = sym::solve_affine(eqs, unknowns);
  if (!solved.residual_constraints.empty()) {
    throw NumericError("residual constraint " + solved.residual_constraints.front().str() +
                       " = 0 remains; run the constraint algorithm to completion");
  }
  if (!solved.free_unknowns.empty()) {
    throw NumericError("singular derivative matrix: the derivative of " +
                       solved.free_unknowns.front().substr(std::string(kDerivativePrefix).size()) +
                       " is not determined");
  }
  const auto b = parameter_bindings(params);
  std::vector<Expr> rhs;
  for (const auto& y : state) rhs.push_back(sym::substitute(solved.solved.at(kDerivativePrefix + y), b));
  std::vector<Expr> cons;
  for (const auto& c : constraints) cons.push_back(sym::substitute(c, b));
  return OdeSystem(chart->base_names().front(), state, std::move(rhs), std::move(cons), sym::substitute(energy, b));
}

OdeSystem compile_report(const constraint::ConstraintReport& report, const Parameters& params) {
  if (!report.terminated) throw NumericError("the constraint algorithm did not terminate");
  const auto& final_level = report.levels.at(static_cast<std::size_t>(report.final_index));
  const auto& first = report.levels.front();
  const auto& chart = final_level.data.C.chart();
  if (chart->base_dim() != 1) throw DimensionMismatch("numeric integration requires base dimension 1");
  std::vector<Expr> constraints;
  for (const auto& lv : report.levels) {
    if (lv.index < report.final_index) constraints.insert(constraints.end(), lv.constraints.begin(), lv.constraints.end());
  }
  const OdeSystem inner = compile_ode(final_level.equations, chart, params, final_level.data.hamiltonian, {});

  const auto b = parameter_bindings(params);
  const std::string& t = inner.time();
  std::map<std::string, Expr> rate;
  for (std::size_t i = 0; i < inner.state().size(); ++i) rate.emplace(inner.state()[i], inner.rhs()[i]);

  const auto state = first.data.C.chart()->fiber_names();
  std::vector<Expr> rhs;
  for (const auto& y : state) {
    if (auto it = rate.find(y); it != rate.end()) {
      rhs.push_back(it->second);
      continue;
    }
    const auto sv = final_level.P.solved().find(y);
    if (sv == final_level.P.solved().end()) throw NumericError("no evolution law for " + y);
    const Expr f = sym::substitute(sv->second, b);
    Expr d = sym::differentiate(f, t);
    for (const auto& [name, r] : rate) d += sym::differentiate(f, name) * r;
    rhs.push_back(d);
  }
  std::vector<Expr> cons;
  for (const auto& c : constraints) cons.push_back(sym::substitute(c, b));
  return OdeSystem(t, state, std::move(rhs), std::move(cons), inner.energy());
}

Trajectory integrate_rk4(const OdeSystem& sys, const std::vector<double>& y0, double t0, double t1, double h) {
  if (!(h > 0)) throw NumericError("step size must be positive");
  if (!(t1 >= t0)) throw NumericError("final time precedes initial time");
  if (y0.size() != sys.state().size()) {
    throw DimensionMismatch("initial state has " + std::to_string(y0.size()) + " values, expected " +
                            std::to_string(sys.state().size()));
  }
  const auto steps = static_cast<std::size_t>(std::floor((t1 - t0) / h + 1e-9));
  Trajectory traj;
  traj.h = h;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(t0);
  traj.states.push_back(y0);

  const std::size_t n = y0.size();
  std::vector<double> y = y0, k1, k2, k3, k4, tmp(n);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    sys.derivative(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    sys.derivative(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    sys.derivative(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    sys.derivative(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(y[i])) {
        throw NumericError("non-finite value in " + sys.state()[i] + " at step " + std::to_string(s + 1));
      }
    }
    traj.times.push_back(t0 + static_cast<double>(s + 1) * h);
    traj.states.push_back(y);
  }
  return traj;
}

double constraint_drift(const Trajectory& traj, const OdeSystem& sys) {
  double worst = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    for (double c : sys.constraint_values(traj.times[i], traj.states[i])) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

double energy_drift(const Trajectory& traj, const OdeSystem& sys) {
  if (traj.times.empty()) return 0;
  const double e0 = sys.energy_value(traj.times[0], traj.states[0]);
  double worst = 0;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    worst = std::max(worst, std::abs(sys.energy_value(traj.times[i], traj.states[i]) - e0));
  }
  return worst;
}

void write_csv(std::ostream& os, const Trajectory& traj, const OdeSystem& sys) {
  os << sys.time();
  for (const auto& s : sys.state()) os << ',' << s;
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
    os << buf;
    for (double v : traj.states[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace hamform::dynamo
