#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hamform/cartan/form.hpp"

namespace hamform::jets {

using cartan::ChartPtr;
using cartan::DiffForm;
using sym::Expr;
using sym::Rational;

/// Symmetric multi-index stored as per-direction multiplicities.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> counts);
  static MultiIndex zero(int m) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(m), 0)); }

  int m() const { return static_cast<int>(counts_.size()); }
  int order() const;
  const std::vector<int>& counts() const { return counts_; }
  int count(int i) const { return counts_.at(static_cast<std::size_t>(i)); }
  MultiIndex plus(int i) const;
  std::optional<MultiIndex> minus(int i) const;
  /// Base names repeated by multiplicity, e.g. "tx" or "tt".
  std::string suffix(const std::vector<std::string>& base) const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.counts_ == b.counts_; }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.counts_ < b.counts_; }

 private:
  std::vector<int> counts_;
};

/// All multi-indices of the given order, in canonical order (tt, tx, xx).
std::vector<MultiIndex> multi_indices(int m, int order);

/// Default base coordinate names: t; t,x; t,x,y; t,x,y,z; then x1..xm.
std::vector<std::string> default_base_names(int m);

struct JetCoordinate {
  int field;
  MultiIndex index;
};

struct MomentumCoordinate {
  int field;
  MultiIndex index;
  int direction;
};

/// Chart of J^k with optional multimomenta p^{I,i}_a for |I| up to a bound.
class JetChart {
 public:
  JetChart(std::vector<std::string> base, std::vector<std::string> fields, int order, int momenta_order,
           std::vector<std::string> parameters);

  const ChartPtr& chart() const { return chart_; }
  int m() const { return static_cast<int>(base_.size()); }
  int order() const { return order_; }
  /// -1 when the chart has no momenta.
  int momenta_order() const { return momenta_order_; }
  const std::vector<std::string>& base() const { return base_; }
  const std::vector<std::string>& fields() const { return fields_; }
  int field_index(const std::string& name) const;

  const std::string& coordinate(int field, const MultiIndex& I) const;
  const std::string& momentum(int field, const MultiIndex& I, int i) const;
  bool has_coordinate(int field, const MultiIndex& I) const;
  std::optional<JetCoordinate> jet_coordinate(const std::string& name) const;
  std::optional<MomentumCoordinate> momentum_coordinate(const std::string& name) const;

 private:
  std::vector<std::string> base_;
  std::vector<std::string> fields_;
  int order_;
  int momenta_order_;
  ChartPtr chart_;
  std::map<std::pair<int, std::vector<int>>, std::string> coord_names_;
  std::map<std::tuple<int, std::vector<int>, int>, std::string> momentum_names_;
  std::map<std::string, JetCoordinate> coord_lookup_;
  std::map<std::string, MomentumCoordinate> momentum_lookup_;
};

/// Builds the chart with base coordinates, u^a_I for |I| <= k and, when
/// with_momenta_up_to >= 0, momenta p^{I,i}_a for |I| <= that bound. Base
/// names default to default_base_names(m).
JetChart build_jet_chart(int m, const std::vector<std::string>& fields, int k, int with_momenta_up_to = -1,
                         const std::vector<std::string>& parameters = {},
                         const std::vector<std::string>& base_names = {});

/// theta^a_I = du^a_I - u^a_{I+1_j} dx^j for |I| <= k-1.
std::vector<DiffForm> contact_forms(const JetChart& jc);

/// D_i e. Throws DomainError if e depends on top-order or momentum coordinates.
Expr total_derivative(const JetChart& jc, const Expr& e, int i);

/// p^{(I,i)}_a: the average of p^{J,j}_a over the splittings J + 1_j = I + 1_i,
/// each weighted by the multiplicity of j in the merged index.
Expr symmetric_part(const JetChart& jc, int field, const MultiIndex& I, int i);

/// Evaluates the same average for arbitrary values per (J, j).
Expr symmetric_part_of(const JetChart& jc, const MultiIndex& I, int i,
                       const std::function<Expr(const MultiIndex&, int)>& value);

}  // namespace hamform::jets
