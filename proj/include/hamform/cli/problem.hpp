#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hamform/constraint/constraint.hpp"
#include "hamform/dynamo/dynamo.hpp"
#include "hamform/errors.hpp"

namespace hamform::cli {

/// Problem file violating the schema; path is a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error((path.empty() ? std::string("/") : path) + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct GeneratorSpec {
  std::string form;
  std::vector<std::string> multipliers;
};

struct NumericSpec {
  /// State coordinate -> exact initial value.
  std::vector<std::pair<std::string, sym::Rational>> initial;
  double t0 = 0;
  double t1 = 0;
  /// Exactly one of h and steps is set; steps gives h = (t1 - t0)/steps.
  std::optional<double> h;
  std::optional<long> steps;

  double step() const;
};

struct ProblemFile {
  std::string name;
  unified::Builder kind = unified::Builder::Classical;
  int base_dim = 1;
  std::vector<std::string> base;
  std::vector<std::string> fields;
  /// Classical and Herglotz: k, the Lagrangian living on J^{k+1}. General:
  /// jet order of the chart.
  int order = 0;
  std::string lagrangian = "0";
  std::vector<GeneratorSpec> generators;
  /// General only: derivative coordinates eliminated from the chart.
  std::vector<std::pair<std::string, std::string>> substitutions;
  std::vector<std::string> projection_drop;
  std::vector<std::string> complement;
  /// Parameter names with optional numeric values, in declaration order.
  std::vector<std::pair<std::string, std::optional<sym::Rational>>> parameters;
  std::optional<NumericSpec> numeric;

  dynamo::Parameters parameter_values() const;
};

constexpr int kSchemaVersion = 1;

ProblemFile parse_problem(const std::string& json_text);
/// Throws IoError when the file cannot be read.
ProblemFile load_problem(const std::string& path);
/// Canonical JSON text that parse_problem reads back to the same problem.
std::string problem_to_json(const ProblemFile& pf);

/// Builds the unified space. Expression errors are reported as SchemaError
/// with the field path and column.
unified::UnifiedSpace instantiate(const ProblemFile& pf);

struct NumericSummary {
  std::vector<std::string> state;
  double h = 0;
  std::size_t samples = 0;
  std::vector<double> final_state;
  double constraint_drift = 0;
  double energy_drift = 0;
};

struct Derivation {
  ProblemFile problem;
  unified::UnifiedSpace space;
  unified::CompatibilityReport compatibility;
  /// Absent when the problem is incompatible.
  std::optional<constraint::ConstraintReport> report;
  std::optional<NumericSummary> numeric;
};

/// Compatibility check followed by the constraint algorithm.
Derivation derive(const ProblemFile& pf, int max_iter = 16);

/// Integrates the final level with the numeric block. Throws
/// DimensionMismatch for m != 1, NumericError for a missing numeric block,
/// an unterminated derivation or an initial state off the constraints.
std::pair<dynamo::OdeSystem, dynamo::Trajectory> integrate(Derivation& d);

std::string render_json(const Derivation& d);
std::string render_text(const Derivation& d);

}  // namespace hamform::cli
