#include "hamform/cli/problem.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hamform/symexpr/parser.hpp"

namespace hamform::cli {

using json = nlohmann::ordered_json;
using sym::Rational;

namespace {

const std::set<std::string> kTopKeys{"schema_version", "name",           "kind",       "base_dim",
                                     "base",           "fields",         "order",      "lagrangian",
                                     "generators",     "substitutions",  "projection_drop",
                                     "complement",     "parameters",     "numeric"};

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw SchemaError(child(path, key), "required field missing");
  return obj.at(key);
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

long get_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<long>();
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

std::string get_identifier(const json& v, const std::string& path) {
  auto s = get_string(v, path);
  if (!sym::is_identifier(s)) throw SchemaError(path, "'" + s + "' is not an identifier");
  return s;
}

std::vector<std::string> get_names(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_identifier(v[i], child(path, i)));
  return out;
}

// Integer, "a/b" string or binary floating value, all read exactly.
Rational get_rational(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(v.dump());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(path, "value is not finite");
    return Rational(d);
  }
  if (v.is_string()) {
    try {
      return sym::parse_rational(v.get<std::string>());
    } catch (const Error&) {
      throw SchemaError(path, "invalid rational '" + v.get<std::string>() + "'");
    }
  }
  throw SchemaError(path, "expected an integer or a rational string");
}

json rational_json(const Rational& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return json(r.get_num().get_si());
  return json(sym::rational_str(r));
}

unified::Builder parse_kind(const std::string& s, const std::string& path) {
  if (s == "classical") return unified::Builder::Classical;
  if (s == "general") return unified::Builder::General;
  if (s == "herglotz") return unified::Builder::Herglotz;
  throw SchemaError(path, "unknown kind '" + s + "'");
}

void reject_unless_general(const ProblemFile& pf, const json& root, const std::string& key) {
  if (pf.kind != unified::Builder::General && root.contains(key)) {
    throw SchemaError("/" + key, std::string("not allowed for kind ") + unified::builder_name(pf.kind));
  }
}

NumericSpec parse_numeric(const json& v, const std::string& path) {
  if (!v.is_object()) throw SchemaError(path, "expected an object");
  for (const auto& [key, _] : v.items()) {
    if (key != "initial" && key != "t0" && key != "t1" && key != "h" && key != "steps") {
      throw SchemaError(child(path, key), "unknown field");
    }
  }
  NumericSpec ns;
  const auto& init = require(v, path, "initial");
  if (!init.is_object()) throw SchemaError(child(path, "initial"), "expected an object");
  for (const auto& [name, value] : init.items()) {
    const auto p = child(child(path, "initial"), name);
    if (!sym::is_identifier(name)) throw SchemaError(p, "'" + name + "' is not an identifier");
    ns.initial.emplace_back(name, get_rational(value, p));
  }
  ns.t0 = v.contains("t0") ? get_number(v.at("t0"), child(path, "t0")) : 0.0;
  ns.t1 = get_number(require(v, path, "t1"), child(path, "t1"));
  if (v.contains("h") == v.contains("steps")) throw SchemaError(path, "exactly one of h and steps is required");
  if (v.contains("h")) {
    ns.h = get_number(v.at("h"), child(path, "h"));
    if (!(*ns.h > 0)) throw SchemaError(child(path, "h"), "step size must be positive");
  } else {
    ns.steps = get_integer(v.at("steps"), child(path, "steps"));
    if (*ns.steps <= 0) throw SchemaError(child(path, "steps"), "step count must be positive");
  }
  if (!(ns.t1 >= ns.t0)) throw SchemaError(child(path, "t1"), "final time precedes initial time");
  return ns;
}

// Re-throws expression errors with the field path and a 1-based column.
template <class F>
auto at_field(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SyntaxError& e) {
    throw SchemaError(path, e.message() + " at column " + std::to_string(e.offset() + 1));
  } catch (const UnknownIdentifier& e) {
    throw SchemaError(path, "unknown identifier '" + e.name() + "' at column " + std::to_string(e.offset() + 1));
  } catch (const ChartMismatch& e) {
    throw SchemaError(path, e.what());
  } catch (const DomainError& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

double NumericSpec::step() const {
  if (h) return *h;
  return (t1 - t0) / static_cast<double>(*steps);
}

dynamo::Parameters ProblemFile::parameter_values() const {
  dynamo::Parameters out;
  for (const auto& [name, value] : parameters) {
    if (value) out.emplace(name, *value);
  }
  return out;
}

ProblemFile parse_problem(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("", "expected an object");
  for (const auto& [key, _] : root.items()) {
    if (!kTopKeys.count(key)) throw SchemaError("/" + key, "unknown field");
  }
  if (get_integer(require(root, "", "schema_version"), "/schema_version") != kSchemaVersion) {
    throw SchemaError("/schema_version", "unsupported version");
  }

  ProblemFile pf;
  if (root.contains("name")) pf.name = get_string(root.at("name"), "/name");
  pf.kind = parse_kind(get_string(require(root, "", "kind"), "/kind"), "/kind");
  pf.base_dim = static_cast<int>(get_integer(require(root, "", "base_dim"), "/base_dim"));
  if (pf.base_dim < 1) throw SchemaError("/base_dim", "must be at least 1");
  if (root.contains("base")) {
    pf.base = get_names(root.at("base"), "/base");
    if (static_cast<int>(pf.base.size()) != pf.base_dim) throw SchemaError("/base", "length differs from base_dim");
  }
  pf.fields = get_names(require(root, "", "fields"), "/fields");
  if (pf.fields.empty()) throw SchemaError("/fields", "at least one field is required");
  pf.order = static_cast<int>(get_integer(require(root, "", "order"), "/order"));
  if (pf.order < 0) throw SchemaError("/order", "must be non-negative");
  if (pf.kind == unified::Builder::Herglotz && pf.order != 0) throw SchemaError("/order", "herglotz requires order 0");
  if (root.contains("lagrangian")) pf.lagrangian = get_string(root.at("lagrangian"), "/lagrangian");

  reject_unless_general(pf, root, "generators");
  reject_unless_general(pf, root, "substitutions");
  reject_unless_general(pf, root, "projection_drop");
  if (root.contains("generators")) {
    const auto& gens = root.at("generators");
    if (!gens.is_array()) throw SchemaError("/generators", "expected an array");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const auto p = child("/generators", i);
      GeneratorSpec g;
      if (gens[i].is_string()) {
        g.form = gens[i].get<std::string>();
      } else if (gens[i].is_object()) {
        for (const auto& [key, _] : gens[i].items()) {
          if (key != "form" && key != "multipliers") throw SchemaError(child(p, key), "unknown field");
        }
        g.form = get_string(require(gens[i], p, "form"), child(p, "form"));
        if (gens[i].contains("multipliers")) g.multipliers = get_names(gens[i].at("multipliers"), child(p, "multipliers"));
      } else {
        throw SchemaError(p, "expected a string or an object");
      }
      pf.generators.push_back(std::move(g));
    }
  }
  if (root.contains("substitutions")) {
    const auto& subs = root.at("substitutions");
    if (!subs.is_object()) throw SchemaError("/substitutions", "expected an object");
    for (const auto& [name, value] : subs.items()) {
      const auto p = child("/substitutions", name);
      if (!sym::is_identifier(name)) throw SchemaError(p, "'" + name + "' is not an identifier");
      pf.substitutions.emplace_back(name, get_string(value, p));
    }
  }
  if (root.contains("projection_drop")) pf.projection_drop = get_names(root.at("projection_drop"), "/projection_drop");
  if (root.contains("complement")) pf.complement = get_names(root.at("complement"), "/complement");
  if (root.contains("parameters")) {
    const auto& params = root.at("parameters");
    if (!params.is_object()) throw SchemaError("/parameters", "expected an object");
    for (const auto& [name, value] : params.items()) {
      const auto p = child("/parameters", name);
      if (!sym::is_identifier(name)) throw SchemaError(p, "'" + name + "' is not an identifier");
      pf.parameters.emplace_back(name, value.is_null() ? std::nullopt : std::optional<Rational>(get_rational(value, p)));
    }
  }
  if (root.contains("numeric")) pf.numeric = parse_numeric(root.at("numeric"), "/numeric");
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string problem_to_json(const ProblemFile& pf) {
  json root;
  root["schema_version"] = kSchemaVersion;
  if (!pf.name.empty()) root["name"] = pf.name;
  root["kind"] = unified::builder_name(pf.kind);
  root["base_dim"] = pf.base_dim;
  if (!pf.base.empty()) root["base"] = pf.base;
  root["fields"] = pf.fields;
  root["order"] = pf.order;
  root["lagrangian"] = pf.lagrangian;
  if (!pf.generators.empty()) {
    json gens = json::array();
    for (const auto& g : pf.generators) {
      json o;
      o["form"] = g.form;
      if (!g.multipliers.empty()) o["multipliers"] = g.multipliers;
      gens.push_back(std::move(o));
    }
    root["generators"] = std::move(gens);
  }
  if (!pf.substitutions.empty()) {
    json subs = json::object();
    for (const auto& [name, value] : pf.substitutions) subs[name] = value;
    root["substitutions"] = std::move(subs);
  }
  if (!pf.projection_drop.empty()) root["projection_drop"] = pf.projection_drop;
  if (!pf.complement.empty()) root["complement"] = pf.complement;
  if (!pf.parameters.empty()) {
    json params = json::object();
    for (const auto& [name, value] : pf.parameters) params[name] = value ? rational_json(*value) : json(nullptr);
    root["parameters"] = std::move(params);
  }
  if (pf.numeric) {
    json num;
    json init = json::object();
    for (const auto& [name, value] : pf.numeric->initial) init[name] = rational_json(value);
    num["initial"] = std::move(init);
    num["t0"] = pf.numeric->t0;
    num["t1"] = pf.numeric->t1;
    if (pf.numeric->h) num["h"] = *pf.numeric->h;
    if (pf.numeric->steps) num["steps"] = *pf.numeric->steps;
    root["numeric"] = std::move(num);
  }
  return root.dump(2) + "\n";
}

unified::UnifiedSpace instantiate(const ProblemFile& pf) {
  std::vector<std::string> params;
  for (const auto& [name, _] : pf.parameters) params.push_back(name);
  const int m = pf.base_dim;

  switch (pf.kind) {
    case unified::Builder::Classical: {
      const auto jc = at_field("/fields", [&] { return jets::build_jet_chart(m, pf.fields, pf.order + 1, -1, params, pf.base); });
      const auto L = at_field("/lagrangian", [&] { return cartan::parse_scalar(pf.lagrangian, *jc.chart()); });
      return at_field("/lagrangian", [&] { return unified::build_classical_unified(jc, L, pf.order, pf.name); });
    }
    case unified::Builder::Herglotz: {
      const auto jc = at_field("/fields", [&] { return jets::build_jet_chart(m, pf.fields, 1, -1, params, pf.base); });
      std::vector<cartan::Coordinate> zs;
      for (const auto& z : unified::herglotz_z_names(jc.base())) zs.push_back({z, cartan::Role::Auxiliary, 0});
      const auto L = at_field("/lagrangian", [&] {
        return cartan::parse_scalar(pf.lagrangian, *cartan::extend_chart(jc.chart(), zs));
      });
      return at_field("/lagrangian", [&] { return unified::build_herglotz_unified(jc, L, pf.name); });
    }
    case unified::Builder::General:
      break;
  }

  const auto jc = at_field("/fields", [&] { return jets::build_jet_chart(m, pf.fields, pf.order, -1, params, pf.base); });
  const auto& full = jc.chart();
  sym::Bindings subs;
  std::vector<std::string> eliminated;
  for (const auto& [name, text] : pf.substitutions) {
    const auto p = child("/substitutions", name);
    const auto idx = full->find(name);
    if (!idx || full->coord(*idx).role != cartan::Role::Derivative) {
      throw SchemaError(p, "'" + name + "' is not a derivative coordinate");
    }
    eliminated.push_back(name);
    subs.emplace(name, at_field(p, [&] { return cartan::parse_scalar(text, *full); }));
  }
  for (const auto& [name, value] : subs) {
    for (const auto& other : eliminated) {
      if (value.depends_on(other)) throw SchemaError(child("/substitutions", name), "value uses '" + other + "'");
    }
  }
  const auto chart = cartan::drop_coordinates(full, eliminated);

  const sym::Expr L = sym::substitute(at_field("/lagrangian", [&] { return cartan::parse_scalar(pf.lagrangian, *full); }), subs);
  std::vector<unified::Generator> generators;
  for (std::size_t i = 0; i < pf.generators.size(); ++i) {
    const auto p = child(child("/generators", i), "form");
    const auto& g = pf.generators[i];
    auto form = at_field(p, [&] { return cartan::parse_form(g.form, full).map_coefficients(subs); });
    generators.push_back({at_field(p, [&] { return cartan::transfer(form, chart); }), g.multipliers});
  }
  std::vector<std::string> drop = pf.projection_drop;
  if (drop.empty()) {
    for (const auto& c : chart->coords()) {
      if (c.role == cartan::Role::Derivative && c.order == pf.order) drop.push_back(c.name);
    }
  }
  const unified::VariationalProblem vp{pf.name, chart, L * cartan::volume_form(chart), std::move(generators),
                                       std::move(drop)};
  return at_field("/generators", [&] { return unified::build_general_unified(vp); });
}

}  // namespace hamform::cli
