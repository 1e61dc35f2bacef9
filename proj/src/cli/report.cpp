#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "hamform/cli/problem.hpp"

namespace hamform::cli {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::pair<std::string, std::string>> solved_in_order(const constraint::SubmanifoldChart& P) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& name : P.ambient()->coordinate_names()) {
    const auto it = P.solved().find(name);
    if (it != P.solved().end()) out.emplace_back(name, it->second.str());
  }
  return out;
}

std::string join(const std::vector<std::string>& names, const char* sep = ", ") {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += sep;
    out += n;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Derivation derive(const ProblemFile& pf, int max_iter) {
  Derivation d{pf, instantiate(pf), {}, std::nullopt, std::nullopt};
  d.compatibility = unified::check_compatibility(d.space);
  if (!d.compatibility.compatible) return d;
  constraint::AlgorithmOptions options;
  options.max_iter = max_iter;
  options.complement = pf.complement;
  d.report = constraint::run_constraint_algorithm(d.space, options);
  return d;
}

std::pair<dynamo::OdeSystem, dynamo::Trajectory> integrate(Derivation& d) {
  if (d.space.chart->base_dim() != 1) throw DimensionMismatch("numeric integration requires base dimension 1");
  if (!d.problem.numeric) throw NumericError("problem has no numeric block");
  if (!d.report || !d.report->terminated) throw NumericError("derivation did not terminate");
  const auto& ns = *d.problem.numeric;

  auto sys = dynamo::compile_report(*d.report, d.problem.parameter_values());
  std::vector<double> y0;
  for (const auto& name : sys.state()) {
    const auto it = std::find_if(ns.initial.begin(), ns.initial.end(), [&](const auto& kv) { return kv.first == name; });
    if (it == ns.initial.end()) throw NumericError("initial value missing for " + name);
    y0.push_back(sym::to_double(it->second));
  }
  for (const auto& [name, _] : ns.initial) {
    if (std::find(sys.state().begin(), sys.state().end(), name) == sys.state().end()) {
      throw NumericError(name + " is not a state coordinate (state: " + join(sys.state()) + ")");
    }
  }
  const auto c0 = sys.constraint_values(ns.t0, y0);
  for (std::size_t i = 0; i < c0.size(); ++i) {
    if (!(std::abs(c0[i]) <= 1e-12)) {
      throw NumericError("initial state violates " + sys.constraints()[i].str() + " = 0 by " + format_double(c0[i]));
    }
  }

  auto traj = dynamo::integrate_rk4(sys, y0, ns.t0, ns.t1, ns.step());
  NumericSummary s;
  s.state = sys.state();
  s.h = traj.h;
  s.samples = traj.times.size();
  s.final_state = traj.states.back();
  s.constraint_drift = dynamo::constraint_drift(traj, sys);
  s.energy_drift = dynamo::energy_drift(traj, sys);
  d.numeric = std::move(s);
  return {std::move(sys), std::move(traj)};
}

std::string render_json(const Derivation& d) {
  json root;
  root["schema_version"] = kSchemaVersion;
  root["problem"] = json::parse(problem_to_json(d.problem));

  const auto& us = d.space;
  json space;
  space["builder"] = unified::builder_name(us.builder);
  json coords = json::array();
  for (const auto& c : us.chart->coords()) coords.push_back({{"name", c.name}, {"role", cartan::role_name(c.role)}});
  space["coordinates"] = std::move(coords);
  space["parameters"] = us.chart->parameters();
  space["theta"] = us.theta.str();
  space["dropped"] = us.dropped;
  root["unified"] = std::move(space);

  json compat;
  compat["compatible"] = d.compatibility.compatible;
  json violations = json::array();
  for (const auto& v : d.compatibility.violations) {
    violations.push_back({{"z", v.z}, {"y", v.y}, {"form", v.form.str()}});
  }
  compat["violations"] = std::move(violations);
  root["compatibility"] = std::move(compat);

  if (d.report) {
    const auto& r = *d.report;
    json levels = json::array();
    for (const auto& l : r.levels) {
      json lv;
      lv["index"] = l.index;
      json P = json::array();
      for (const auto& [name, value] : solved_in_order(l.P)) P.push_back({{"coordinate", name}, {"value", value}});
      lv["P"] = std::move(P);
      lv["C"] = l.data.C.chart()->coordinate_names();
      lv["hamiltonian"] = l.data.hamiltonian.str();
      lv["theta_h"] = l.data.theta_h.str();
      json eqs = json::array();
      for (const auto& e : l.equations.equations) eqs.push_back({{"direction", e.direction}, {"form", e.residual.str()}});
      lv["equations"] = std::move(eqs);
      json cons = json::array();
      for (const auto& c : l.constraints) cons.push_back(c.str());
      lv["constraints"] = std::move(cons);
      levels.push_back(std::move(lv));
    }
    root["levels"] = std::move(levels);
    root["terminated"] = r.terminated;
    root["final_index"] = r.final_index;
    root["complement"] = r.complement;
    json lifts = json::array();
    for (const auto& f : r.lift_forms) lifts.push_back(f.str());
    root["lift_forms"] = std::move(lifts);
  }

  if (d.numeric) {
    const auto& n = *d.numeric;
    json num;
    num["state"] = n.state;
    num["h"] = n.h;
    num["samples"] = n.samples;
    num["final_state"] = n.final_state;
    num["constraint_drift"] = n.constraint_drift;
    num["energy_drift"] = n.energy_drift;
    root["numeric"] = std::move(num);
  }
  return root.dump(2) + "\n";
}

std::string render_text(const Derivation& d) {
  std::ostringstream os;
  const auto& pf = d.problem;
  const auto& us = d.space;
  os << "problem " << (pf.name.empty() ? "(unnamed)" : pf.name) << " (" << unified::builder_name(pf.kind)
     << ", base dimension " << pf.base_dim << ", order " << pf.order << ")\n";
  os << "L = " << pf.lagrangian << "\n\n";
  os << "unified space: " << join(us.chart->coordinate_names()) << "\n";
  if (!us.chart->parameters().empty()) os << "parameters: " << join(us.chart->parameters()) << "\n";
  os << "Theta = " << us.theta << "\n";
  os << "dropped: " << join(us.dropped) << "\n";
  if (d.compatibility.compatible) {
    os << "compatibility: ok\n";
  } else {
    os << "compatibility: violated\n";
    for (const auto& v : d.compatibility.violations) {
      if (v.y.empty()) {
        os << "  d/d" << v.z << " _| Theta = " << v.form << "\n";
      } else {
        os << "  d/d" << v.y << " _| L_{d/d" << v.z << "} Theta = " << v.form << "\n";
      }
    }
  }

  if (d.report) {
    const auto& r = *d.report;
    for (const auto& l : r.levels) {
      os << "\nlevel " << l.index << "\n";
      os << "  P:\n";
      for (const auto& [name, value] : solved_in_order(l.P)) os << "    " << name << " = " << value << "\n";
      os << "  C: " << join(l.data.C.chart()->coordinate_names()) << "\n";
      os << "  H = " << l.data.hamiltonian << "\n";
      os << "  theta_h = " << l.data.theta_h << "\n";
      os << "  equations:\n";
      for (const auto& e : l.equations.equations) os << "    [" << e.direction << "] " << e.residual << " = 0\n";
      os << "  constraints:";
      if (l.constraints.empty()) os << " none";
      os << "\n";
      for (const auto& c : l.constraints) os << "    " << c << " = 0\n";
    }
    os << "\n";
    if (r.terminated) {
      os << "terminated at level " << r.final_index << "\n";
      os << "complement: " << join(r.complement) << "\n";
      os << "lift forms:\n";
      for (const auto& f : r.lift_forms) os << "  " << f << " = 0\n";
    } else {
      os << "not terminated after " << r.levels.size() << " levels\n";
    }
  }

  if (d.numeric) {
    const auto& n = *d.numeric;
    os << "\nnumeric: " << n.samples << " samples, h = " << format_double(n.h) << "\n";
    os << "  final state:";
    for (std::size_t i = 0; i < n.state.size(); ++i) os << " " << n.state[i] << "=" << format_double(n.final_state[i]);
    os << "\n  constraint drift: " << format_double(n.constraint_drift) << "\n";
    os << "  energy drift: " << format_double(n.energy_drift) << "\n";
  }
  return os.str();
}

}  // namespace hamform::cli
