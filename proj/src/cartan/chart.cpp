#include "hamform/cartan/chart.hpp"

#include <algorithm>

#include "hamform/errors.hpp"

namespace hamform::cartan {

const char* role_name(Role r) {
  switch (r) {
    case Role::Base: return "base";
    case Role::Field: return "field";
    case Role::Derivative: return "derivative";
    case Role::Momentum: return "momentum";
    case Role::Multiplier: return "multiplier";
    case Role::Auxiliary: return "auxiliary";
  }
  return "?";
}

Chart::Chart(std::vector<Coordinate> coords, std::vector<std::string> parameters)
    : coords_(std::move(coords)), parameters_(std::move(parameters)) {
  bool fiber_seen = false;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const auto& c = coords_[i];
    if (!sym::is_identifier(c.name)) throw ChartMismatch("invalid coordinate name '" + c.name + "'");
    if (!index_.emplace(c.name, i).second) throw ChartMismatch("duplicate coordinate '" + c.name + "'");
    if (c.role == Role::Base) {
      if (fiber_seen) throw ChartMismatch("base coordinate '" + c.name + "' follows a fiber coordinate");
      ++base_dim_;
    } else {
      fiber_seen = true;
    }
  }
  if (base_dim_ < 1) throw ChartMismatch("chart needs at least one base coordinate");
  std::vector<std::string> seen;
  for (const auto& p : parameters_) {
    if (!sym::is_identifier(p)) throw ChartMismatch("invalid parameter name '" + p + "'");
    if (index_.count(p) != 0) throw ChartMismatch("parameter '" + p + "' clashes with a coordinate");
    if (std::find(seen.begin(), seen.end(), p) != seen.end()) {
      throw ChartMismatch("duplicate parameter '" + p + "'");
    }
    seen.push_back(p);
  }
}

bool Chart::is_parameter(const std::string& name) const {
  return std::find(parameters_.begin(), parameters_.end(), name) != parameters_.end();
}

std::optional<std::size_t> Chart::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Chart::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ChartMismatch("'" + name + "' is not a coordinate of the chart");
  return it->second;
}

std::vector<std::string> Chart::coordinate_names() const {
  std::vector<std::string> out;
  out.reserve(coords_.size());
  for (const auto& c : coords_) out.push_back(c.name);
  return out;
}

std::vector<std::string> Chart::base_names() const {
  std::vector<std::string> out;
  for (int i = 0; i < base_dim_; ++i) out.push_back(coords_[static_cast<std::size_t>(i)].name);
  return out;
}

std::vector<std::string> Chart::fiber_names() const {
  std::vector<std::string> out;
  for (std::size_t i = static_cast<std::size_t>(base_dim_); i < coords_.size(); ++i) out.push_back(coords_[i].name);
  return out;
}

sym::NameSet Chart::known_names() const {
  sym::NameSet out(parameters_.begin(), parameters_.end());
  for (const auto& c : coords_) out.insert(c.name);
  return out;
}

bool operator==(const Chart& a, const Chart& b) {
  if (a.coords_.size() != b.coords_.size() || a.parameters_ != b.parameters_) return false;
  for (std::size_t i = 0; i < a.coords_.size(); ++i) {
    if (a.coords_[i].name != b.coords_[i].name || a.coords_[i].role != b.coords_[i].role) return false;
  }
  return true;
}

ChartPtr make_chart(std::vector<Coordinate> coords, std::vector<std::string> parameters) {
  return std::make_shared<const Chart>(std::move(coords), std::move(parameters));
}

bool same_chart(const ChartPtr& a, const ChartPtr& b) { return a == b || (a && b && *a == *b); }

ChartPtr drop_coordinates(const ChartPtr& chart, const std::vector<std::string>& drop) {
  for (const auto& d : drop) chart->index(d);
  std::vector<Coordinate> kept;
  for (const auto& c : chart->coords()) {
    if (std::find(drop.begin(), drop.end(), c.name) == drop.end()) kept.push_back(c);
  }
  return make_chart(std::move(kept), chart->parameters());
}

ChartPtr extend_chart(const ChartPtr& chart, const std::vector<Coordinate>& extra) {
  auto coords = chart->coords();
  coords.insert(coords.end(), extra.begin(), extra.end());
  return make_chart(std::move(coords), chart->parameters());
}

Expr parse_scalar(const std::string& text, const Chart& chart) {
  return sym::parse_expr(text, chart.known_names());
}

}  // namespace hamform::cartan
