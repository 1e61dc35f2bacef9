#include "hamform/jets/jet_chart.hpp"

#include <numeric>
#include <set>

#include "hamform/errors.hpp"

namespace hamform::jets {

MultiIndex::MultiIndex(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw DimensionMismatch("negative multiplicity in multi-index");
  }
}

int MultiIndex::order() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }

MultiIndex MultiIndex::plus(int i) const {
  auto c = counts_;
  ++c.at(static_cast<std::size_t>(i));
  return MultiIndex(std::move(c));
}

std::optional<MultiIndex> MultiIndex::minus(int i) const {
  if (count(i) == 0) return std::nullopt;
  auto c = counts_;
  --c[static_cast<std::size_t>(i)];
  return MultiIndex(std::move(c));
}

std::string MultiIndex::suffix(const std::vector<std::string>& base) const {
  std::string s;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    for (int k = 0; k < counts_[i]; ++k) s += base.at(i);
  }
  return s;
}

namespace {

void enumerate(int m, int remaining, std::size_t pos, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == static_cast<std::size_t>(m)) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    cur[pos] = c;
    enumerate(m, remaining - c, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<MultiIndex> multi_indices(int m, int order) {
  std::vector<MultiIndex> out;
  if (m < 1 || order < 0) return out;
  std::vector<int> cur(static_cast<std::size_t>(m), 0);
  enumerate(m, order, 0, cur, out);
  return out;
}

std::vector<std::string> default_base_names(int m) {
  static const std::vector<std::vector<std::string>> small{
      {"t"}, {"t", "x"}, {"t", "x", "y"}, {"t", "x", "y", "z"}};
  if (m >= 1 && m <= 4) return small[static_cast<std::size_t>(m - 1)];
  std::vector<std::string> out;
  for (int i = 1; i <= m; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

JetChart::JetChart(std::vector<std::string> base, std::vector<std::string> fields, int order, int momenta_order,
                   std::vector<std::string> parameters)
    : base_(std::move(base)), fields_(std::move(fields)), order_(order), momenta_order_(momenta_order) {
  if (base_.empty()) throw DimensionMismatch("jet chart needs m >= 1");
  if (order_ < 0) throw DimensionMismatch("jet order must be non-negative");
  std::set<std::string> seen;
  for (const auto& f : fields_) {
    if (!seen.insert(f).second) throw ChartMismatch("duplicate field name '" + f + "'");
  }
  const int m = static_cast<int>(base_.size());
  std::vector<cartan::Coordinate> coords;
  for (const auto& b : base_) coords.push_back({b, cartan::Role::Base, 0});
  for (int r = 0; r <= order_; ++r) {
    for (std::size_t a = 0; a < fields_.size(); ++a) {
      for (const auto& I : multi_indices(m, r)) {
        const std::string name = r == 0 ? fields_[a] : fields_[a] + "_" + I.suffix(base_);
        coords.push_back({name, r == 0 ? cartan::Role::Field : cartan::Role::Derivative, r});
        coord_names_.emplace(std::make_pair(static_cast<int>(a), I.counts()), name);
        coord_lookup_.emplace(name, JetCoordinate{static_cast<int>(a), I});
      }
    }
  }
  for (int r = 0; r <= momenta_order_; ++r) {
    for (std::size_t a = 0; a < fields_.size(); ++a) {
      for (const auto& I : multi_indices(m, r)) {
        for (int i = 0; i < m; ++i) {
          const std::string name = "p" + fields_[a] + "_" + I.suffix(base_) + "_" + base_[static_cast<std::size_t>(i)];
          coords.push_back({name, cartan::Role::Momentum, r});
          momentum_names_.emplace(std::make_tuple(static_cast<int>(a), I.counts(), i), name);
          momentum_lookup_.emplace(name, MomentumCoordinate{static_cast<int>(a), I, i});
        }
      }
    }
  }
  chart_ = cartan::make_chart(std::move(coords), std::move(parameters));
}

int JetChart::field_index(const std::string& name) const {
  for (std::size_t a = 0; a < fields_.size(); ++a) {
    if (fields_[a] == name) return static_cast<int>(a);
  }
  throw ChartMismatch("unknown field '" + name + "'");
}

const std::string& JetChart::coordinate(int field, const MultiIndex& I) const {
  auto it = coord_names_.find({field, I.counts()});
  if (it == coord_names_.end()) throw ChartMismatch("derivative coordinate beyond the chart order");
  return it->second;
}

bool JetChart::has_coordinate(int field, const MultiIndex& I) const {
  return coord_names_.count({field, I.counts()}) != 0;
}

const std::string& JetChart::momentum(int field, const MultiIndex& I, int i) const {
  auto it = momentum_names_.find({field, I.counts(), i});
  if (it == momentum_names_.end()) throw ChartMismatch("momentum coordinate not present in the chart");
  return it->second;
}

std::optional<JetCoordinate> JetChart::jet_coordinate(const std::string& name) const {
  auto it = coord_lookup_.find(name);
  if (it == coord_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<MomentumCoordinate> JetChart::momentum_coordinate(const std::string& name) const {
  auto it = momentum_lookup_.find(name);
  if (it == momentum_lookup_.end()) return std::nullopt;
  return it->second;
}

JetChart build_jet_chart(int m, const std::vector<std::string>& fields, int k, int with_momenta_up_to,
                         const std::vector<std::string>& parameters, const std::vector<std::string>& base_names) {
  if (m < 1) throw DimensionMismatch("jet chart needs m >= 1");
  std::vector<std::string> base = base_names.empty() ? default_base_names(m) : base_names;
  if (static_cast<int>(base.size()) != m) throw DimensionMismatch("base name count differs from m");
  return JetChart(std::move(base), fields, k, with_momenta_up_to, parameters);
}

std::vector<DiffForm> contact_forms(const JetChart& jc) {
  std::vector<DiffForm> out;
  const auto& chart = jc.chart();
  for (int r = 0; r < jc.order(); ++r) {
    for (int a = 0; a < static_cast<int>(jc.fields().size()); ++a) {
      for (const auto& I : multi_indices(jc.m(), r)) {
        DiffForm theta = DiffForm::differential(chart, jc.coordinate(a, I));
        for (int j = 0; j < jc.m(); ++j) {
          theta -= Expr::symbol(jc.coordinate(a, I.plus(j))) * DiffForm::differential(chart, jc.base()[static_cast<std::size_t>(j)]);
        }
        out.push_back(std::move(theta));
      }
    }
  }
  return out;
}

Expr total_derivative(const JetChart& jc, const Expr& e, int i) {
  if (i < 0 || i >= jc.m()) throw DimensionMismatch("total derivative direction out of range");
  Expr out;
  for (const auto& s : e.free_symbols()) {
    if (s == jc.base()[static_cast<std::size_t>(i)]) {
      out += sym::differentiate(e, s);
      continue;
    }
    if (jc.momentum_coordinate(s)) throw DomainError("total derivative of an expression in momentum '" + s + "'");
    const auto c = jc.jet_coordinate(s);
    if (!c) continue;
    const MultiIndex next = c->index.plus(i);
    if (!jc.has_coordinate(c->field, next)) {
      throw DomainError("order overflow: D_" + jc.base()[static_cast<std::size_t>(i)] + " of '" + s + "'");
    }
    out += Expr::symbol(jc.coordinate(c->field, next)) * sym::differentiate(e, s);
  }
  return out;
}

Expr symmetric_part_of(const JetChart& jc, const MultiIndex& I, int i,
                       const std::function<Expr(const MultiIndex&, int)>& value) {
  const MultiIndex K = I.plus(i);
  const Rational total(K.order());
  Expr out;
  for (int j = 0; j < jc.m(); ++j) {
    const auto J = K.minus(j);
    if (!J) continue;
    out += Expr(Rational(K.count(j)) / total) * value(*J, j);
  }
  return out;
}

Expr symmetric_part(const JetChart& jc, int field, const MultiIndex& I, int i) {
  return symmetric_part_of(jc, I, i, [&](const MultiIndex& J, int j) {
    return Expr::symbol(jc.momentum(field, J, j));
  });
}

}  // namespace hamform::jets
