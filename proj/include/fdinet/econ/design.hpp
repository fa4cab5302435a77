#pragma once

// Joins a dyad panel with its measure table and turns model terms into
// numeric design columns.
//
// Variable names (lower case):
//   trade cc cc_inv gdp_o gdp_d pop_o pop_d dist contig colony smctry
//   comlang rta asean_china_o spl spl_inv cmb diff diff_inv trade_dummy
//   sector_<label>          1 iff the row's sector equals <label>
//   ln_<v>                  natural log; ln_cc/ln_cc_inv follow log_policy,
//                           ln_diff/ln_diff_inv are ln(1 + diff)
//   ln1p_<v>                ln(1 + v)
//   a:b                     product of two terms
// With direction = inverse, cc/spl/diff resolve to cc_inv/spl_inv/diff_inv.

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/econ/model_spec.hpp"
#include "fdinet/measures.hpp"
#include "fdinet/netcore.hpp"

namespace fdinet::econ {

inline constexpr const char* kReasonMissingMeasure = "missing measure";
inline constexpr const char* kReasonLogNonpositive = "log of nonpositive";
inline constexpr const char* kReasonFilter = "filter";

/// A design column plus, for each row, why it is undefined (nullptr when
/// the value is usable).
struct Column {
  std::string name;
  std::vector<double> values;
  std::vector<const char*> missing;
};

class VariableResolver {
 public:
  /// `measures` may be null when no network measure is referenced.
  VariableResolver(const DyadPanel& panel, const MeasureTable* measures, Direction direction = Direction::Same,
                   LogPolicy log_policy = LogPolicy::Shift1)
      : panel_(panel), measures_(measures), direction_(direction), log_policy_(log_policy) {
    auto nets = build_networks(panel);
    registry_ = nets.control.registry_ptr();
    control_ = nets.control.weights();
    if (measures_ && !(*measures_->registry == *registry_)) {
      fail(ErrorKind::RegistryMismatch, "measure table was computed on a different set of countries");
    }
    origin_.reserve(panel.size());
    dest_.reserve(panel.size());
    for (const auto& r : panel.rows()) {
      origin_.push_back(static_cast<Eigen::Index>(registry_->index(r.origin)));
      dest_.push_back(static_cast<Eigen::Index>(registry_->index(r.dest)));
    }
  }

  std::size_t rows() const { return panel_.size(); }
  const DyadPanel& panel() const { return panel_; }
  Direction direction() const { return direction_; }

  /// Display name of a term after direction resolution (e.g. ln_cc -> ln_cc_inv).
  std::string display_name(const std::string& term) const {
    auto f = term_factors(term);
    if (f.size() == 2) return display_name(f[0]) + ":" + display_name(f[1]);
    auto [prefix, base] = split_prefix(term);
    return prefix + resolve_base(base);
  }

  Column evaluate(const std::string& term) const {
    auto f = term_factors(term);
    if (f.size() == 2) {
      Column a = evaluate(f[0]);
      Column b = evaluate(f[1]);
      Column out{display_name(term), std::vector<double>(rows()), std::vector<const char*>(rows(), nullptr)};
      for (std::size_t k = 0; k < rows(); ++k) {
        out.missing[k] = a.missing[k] ? a.missing[k] : b.missing[k];
        out.values[k] = out.missing[k] ? kMissing : a.values[k] * b.values[k];
      }
      return out;
    }
    if (f.size() != 1) fail(ErrorKind::InvalidSpec, "malformed term '" + term + "'");
    auto [prefix, raw_base] = split_prefix(term);
    const std::string base = resolve_base(raw_base);
    Column out{prefix + base, std::vector<double>(rows()), std::vector<const char*>(rows(), nullptr)};
    for (std::size_t k = 0; k < rows(); ++k) {
      const double v = base_value(base, k);
      if (is_missing(v)) {
        out.values[k] = kMissing;
        out.missing[k] = kReasonMissingMeasure;
        continue;
      }
      if (prefix.empty()) {
        out.values[k] = v;
      } else if (prefix == "ln1p_" || (prefix == "ln_" && shifted_log(base))) {
        if (v <= -1.0) {
          out.values[k] = kMissing;
          out.missing[k] = kReasonLogNonpositive;
        } else {
          out.values[k] = std::log1p(v);
        }
      } else {
        if (v <= 0.0) {
          out.values[k] = kMissing;
          out.missing[k] = kReasonLogNonpositive;
        } else {
          out.values[k] = std::log(v);
        }
      }
    }
    return out;
  }

  /// Whether the row passes every filter.
  std::vector<bool> filter_mask(const std::vector<Filter>& filters) const {
    std::vector<bool> keep(rows(), true);
    for (const auto& f : filters) {
      if (f.variable == "sector") {
        for (std::size_t k = 0; k < rows(); ++k) {
          const bool eq = panel_.rows()[k].sector == f.value;
          if (eq != f.equal) keep[k] = false;
        }
        continue;
      }
      auto target = parse_double(f.value);
      Column c = evaluate(f.variable);
      for (std::size_t k = 0; k < rows(); ++k) {
        bool eq = target ? (!c.missing[k] && c.values[k] == *target) : false;
        if (eq != f.equal) keep[k] = false;
      }
    }
    return keep;
  }

 private:
  static std::pair<std::string, std::string> split_prefix(const std::string& term) {
    if (term.rfind("ln1p_", 0) == 0) return {"ln1p_", term.substr(5)};
    if (term.rfind("ln_", 0) == 0) return {"ln_", term.substr(3)};
    return {"", term};
  }

  std::string resolve_base(const std::string& base) const {
    if (direction_ == Direction::Inverse) {
      if (base == "cc") return "cc_inv";
      if (base == "spl") return "spl_inv";
      if (base == "diff") return "diff_inv";
    }
    return base;
  }

  bool shifted_log(const std::string& base) const {
    if (base == "diff" || base == "diff_inv") return true;
    if (base == "cc" || base == "cc_inv") return log_policy_ == LogPolicy::Shift1;
    return false;
  }

  const MeasureTable& need_measures(const std::string& name) const {
    if (!measures_) fail(ErrorKind::InvalidSpec, "variable '" + name + "' needs network measures");
    return *measures_;
  }

  double base_value(const std::string& base, std::size_t k) const {
    const Dyad& r = panel_.rows()[k];
    const auto i = origin_[k];
    const auto j = dest_[k];
    if (base == "trade") return r.trade;
    if (base == "trade_dummy") return r.trade > 0.0 ? 1.0 : 0.0;
    if (base == "cc") return r.cc;
    if (base == "cc_inv") return control_(j, i);
    if (base == "gdp_o") return r.gdp_o;
    if (base == "gdp_d") return r.gdp_d;
    if (base == "pop_o") return r.pop_o;
    if (base == "pop_d") return r.pop_d;
    if (base == "dist") return r.dist;
    if (base == "contig") return r.contig;
    if (base == "colony") return r.colony;
    if (base == "smctry") return r.smctry;
    if (base == "comlang") return r.comlang;
    if (base == "rta") return r.rta;
    if (base == "asean_china_o") return r.asean_china_o;
    if (base == "spl") return need_measures(base).spl(i, j);
    if (base == "spl_inv") return need_measures(base).spl_inv(i, j);
    if (base == "cmb") return need_measures(base).cmb(i, j);
    if (base == "diff" || base == "diff_inv") {
      const auto& m = need_measures(base);
      if (m.alpha() != 1.0) {
        fail(ErrorKind::AlphaNotOne, "'" + base + "' requires measures computed with alpha = 1 (got " +
                                         format_sig(m.alpha()) + ")");
      }
      return base == "diff" ? m.diff(i, j) : m.diff_inv(i, j);
    }
    if (base.rfind("sector_", 0) == 0) return r.sector == base.substr(7) ? 1.0 : 0.0;
    fail(ErrorKind::InvalidSpec, "unknown variable '" + base + "'");
  }

  const DyadPanel& panel_;
  const MeasureTable* measures_;
  Direction direction_;
  LogPolicy log_policy_;
  RegistryPtr registry_;
  Eigen::MatrixXd control_;
  std::vector<Eigen::Index> origin_;
  std::vector<Eigen::Index> dest_;
};

// ---------------------------------------------------------------------------

struct RowKey {
  std::string origin;
  std::string dest;
  std::string sector;
};

struct DesignMatrix {
  std::string dependent;
  std::vector<std::string> names;  // columns of X; the intercept "cons" is last
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  Eigen::VectorXd d;  // 1 iff trade > 0
  std::vector<std::string> z_names;
  Eigen::MatrixXd Z;  // selection / inflation design (empty when unused)
  std::vector<RowKey> keys;
  std::map<std::string, std::size_t> dropped;
  std::vector<std::string> warnings;

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
};

inline constexpr const char* kIntercept = "cons";

/// Throws RankDeficient naming the columns that are linear combinations of
/// the others, if any.
inline void require_full_rank(const Eigen::MatrixXd& x, const std::vector<std::string>& names, const std::string& what) {
  if (x.cols() == 0) return;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  if (rank == x.cols()) return;
  std::string cols;
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = rank; k < x.cols(); ++k) {
    if (!cols.empty()) cols += ", ";
    cols += names[static_cast<std::size_t>(perm(k))];
  }
  fail(ErrorKind::RankDeficient, what + " is rank deficient; collinear column(s): " + cols);
}

namespace detail {

inline bool is_constant_dummy(const Eigen::VectorXd& col) {
  if (col.size() == 0) return false;
  const double first = col(0);
  if (first != 0.0 && first != 1.0) return false;
  return (col.array() == first).all();
}

/// Assembles [columns..., cons] over the kept rows, dropping constant dummy
/// columns with a warning.
inline Eigen::MatrixXd assemble(const std::vector<Column>& cols, const std::vector<std::size_t>& kept,
                                std::vector<std::string>& names, std::vector<std::string>& warnings,
                                const std::string& what) {
  const auto n = static_cast<Eigen::Index>(kept.size());
  std::vector<Eigen::VectorXd> out;
  names.clear();
  for (const auto& c : cols) {
    Eigen::VectorXd v(n);
    for (Eigen::Index r = 0; r < n; ++r) v(r) = c.values[kept[static_cast<std::size_t>(r)]];
    if (is_constant_dummy(v)) {
      warnings.push_back(what + ": dropped degenerate dummy '" + c.name + "' (constant " + format_sig(v(0)) + ")");
      continue;
    }
    names.push_back(c.name);
    out.push_back(std::move(v));
  }
  names.emplace_back(kIntercept);
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(out.size()) + 1);
  for (std::size_t c = 0; c < out.size(); ++c) x.col(static_cast<Eigen::Index>(c)) = out[c];
  x.col(x.cols() - 1).setOnes();
  return x;
}

}  // namespace detail

/// Builds y, X (and d, Z where the estimator uses a selection or inflation
/// equation) with listwise deletion. For heckman2s, rows with zero trade are
/// kept for the selection stage and carry y = 0.
inline DesignMatrix build_design(const VariableResolver& data, const ModelSpec& spec) {
  if (spec.is_system()) fail(ErrorKind::InvalidSpec, "use the system builders for " + std::string(to_string(spec.estimator)));
  const bool uses_z = spec.estimator == Estimator::Heckman2s || spec.estimator == Estimator::Zippml;
  const bool selection_sample = spec.estimator == Estimator::Heckman2s;
  const std::size_t n = data.rows();

  DesignMatrix dm;
  Column y = data.evaluate(spec.estimator == Estimator::Probit ? std::string("trade_dummy") : spec.dependent);
  Column d = data.evaluate("trade_dummy");
  dm.dependent = y.name;
  std::vector<Column> xcols;
  for (const auto& t : spec.regressors) xcols.push_back(data.evaluate(t));
  std::vector<Column> zcols;
  if (uses_z)
    for (const auto& t : spec.selection) zcols.push_back(data.evaluate(t));

  const auto keep_filter = data.filter_mask(spec.filters);
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < n; ++k) {
    const char* reason = nullptr;
    if (!keep_filter[k]) reason = kReasonFilter;
    for (const auto& c : xcols)
      if (!reason && c.missing[k]) reason = c.missing[k];
    for (const auto& c : zcols)
      if (!reason && c.missing[k]) reason = c.missing[k];
    if (!reason && y.missing[k] && !(selection_sample && d.values[k] == 0.0)) reason = y.missing[k];
    if (reason) {
      ++dm.dropped[reason];
      continue;
    }
    kept.push_back(k);
  }
  if (kept.empty()) fail(ErrorKind::EmptySample, "no observation survives listwise deletion");

  dm.X = detail::assemble(xcols, kept, dm.names, dm.warnings, "outcome equation");
  const auto rows = static_cast<Eigen::Index>(kept.size());
  dm.y.resize(rows);
  dm.d.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto k = kept[static_cast<std::size_t>(r)];
    dm.d(r) = d.values[k];
    dm.y(r) = y.missing[k] ? 0.0 : y.values[k];
    const auto& row = data.panel().rows()[k];
    dm.keys.push_back({row.origin, row.dest, row.sector});
  }
  if (uses_z) dm.Z = detail::assemble(zcols, kept, dm.z_names, dm.warnings, "selection equation");
  require_full_rank(dm.X, dm.names, "design matrix");
  if (uses_z) require_full_rank(dm.Z, dm.z_names, "selection design");
  return dm;
}

inline DesignMatrix build_design(const DyadPanel& panel, const MeasureTable* measures, const ModelSpec& spec) {
  VariableResolver data(panel, measures, spec.direction, spec.log_policy);
  return build_design(data, spec);
}

/// Only the rows with d = 1, for outcome equations fitted on positive flows.
inline DesignMatrix positive_rows(const DesignMatrix& dm) {
  DesignMatrix out;
  out.dependent = dm.dependent;
  out.names = dm.names;
  out.z_names = dm.z_names;
  out.dropped = dm.dropped;
  out.warnings = dm.warnings;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index r = 0; r < dm.d.size(); ++r)
    if (dm.d(r) == 1.0) idx.push_back(r);
  const auto m = static_cast<Eigen::Index>(idx.size());
  out.X.resize(m, dm.X.cols());
  out.y.resize(m);
  out.d = Eigen::VectorXd::Ones(m);
  if (dm.Z.size()) out.Z.resize(m, dm.Z.cols());
  for (Eigen::Index r = 0; r < m; ++r) {
    out.X.row(r) = dm.X.row(idx[static_cast<std::size_t>(r)]);
    out.y(r) = dm.y(idx[static_cast<std::size_t>(r)]);
    if (dm.Z.size()) out.Z.row(r) = dm.Z.row(idx[static_cast<std::size_t>(r)]);
    out.keys.push_back(dm.keys[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])]);
  }
  return out;
}

}  // namespace fdinet::econ
