#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hamform/symexpr/expr.hpp"
#include "hamform/symexpr/parser.hpp"

namespace hamform::cartan {

using sym::Expr;

/// Coordinate role. Base coordinates come first; every other role is a
/// fiber coordinate.
enum class Role { Base, Field, Derivative, Momentum, Multiplier, Auxiliary };

const char* role_name(Role r);

struct Coordinate {
  std::string name;
  Role role = Role::Auxiliary;
  int order = 0;  // derivative order, or |I| for a momentum
};

class Chart {
 public:
  Chart(std::vector<Coordinate> coords, std::vector<std::string> parameters = {});

  const std::vector<Coordinate>& coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  int base_dim() const { return base_dim_; }
  const std::vector<std::string>& parameters() const { return parameters_; }

  bool has(const std::string& name) const { return index_.count(name) != 0; }
  bool is_parameter(const std::string& name) const;
  std::optional<std::size_t> find(const std::string& name) const;
  /// Throws ChartMismatch when the name is not a coordinate.
  std::size_t index(const std::string& name) const;
  const std::string& name(std::size_t i) const { return coords_.at(i).name; }
  const Coordinate& coord(std::size_t i) const { return coords_.at(i); }

  std::vector<std::string> coordinate_names() const;
  std::vector<std::string> base_names() const;
  std::vector<std::string> fiber_names() const;
  /// Coordinates together with parameters: the identifiers an expression may use.
  sym::NameSet known_names() const;

  friend bool operator==(const Chart& a, const Chart& b);

 private:
  std::vector<Coordinate> coords_;
  std::vector<std::string> parameters_;
  std::map<std::string, std::size_t> index_;
  int base_dim_ = 0;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<Coordinate> coords, std::vector<std::string> parameters = {});
bool same_chart(const ChartPtr& a, const ChartPtr& b);
/// The chart with the named coordinates removed; parameters are kept.
ChartPtr drop_coordinates(const ChartPtr& chart, const std::vector<std::string>& drop);
/// The chart with extra fiber coordinates appended.
ChartPtr extend_chart(const ChartPtr& chart, const std::vector<Coordinate>& extra);

/// Parse a scalar expression over the chart's coordinates and parameters.
Expr parse_scalar(const std::string& text, const Chart& chart);

}  // namespace hamform::cartan
