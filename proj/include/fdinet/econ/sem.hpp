#pragma once

// Simultaneous equations: 2SLS, 3SLS and the reduced form.

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/econ/design.hpp"
#include "fdinet/econ/fit_result.hpp"
#include "fdinet/econ/linalg.hpp"
#include "fdinet/econ/ols.hpp"

namespace fdinet::econ {

struct EquationSystem {
  std::vector<Equation> equations;
  std::vector<std::string> endogenous;

  static EquationSystem from_spec(const ModelSpec& spec) {
    if (!spec.is_system()) fail(ErrorKind::InvalidSpec, "spec does not describe an equation system");
    return {spec.equations, spec.endogenous};
  }

  bool is_endogenous(const std::string& v) const {
    return std::find(endogenous.begin(), endogenous.end(), v) != endogenous.end();
  }

  /// Exogenous terms across all equations, in first-appearance order.
  std::vector<std::string> exogenous() const {
    std::vector<std::string> out;
    for (const auto& eq : equations)
      for (const auto& t : eq.regressors)
        if (!is_endogenous(t) && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return out;
  }

  /// Order condition: every equation excludes at least as many exogenous
  /// variables as it includes endogenous regressors.
  void check_order_condition() const {
    const auto exo = exogenous();
    for (const auto& eq : equations) {
      std::size_t endo_rhs = 0;
      std::size_t exo_in = 0;
      for (const auto& t : eq.regressors) (is_endogenous(t) ? endo_rhs : exo_in)++;
      const std::size_t excluded = exo.size() - exo_in;
      if (excluded < endo_rhs) {
        fail(ErrorKind::UnderIdentified, "equation for " + eq.dependent + " has " + std::to_string(endo_rhs) +
                                             " endogenous regressor(s) but excludes only " + std::to_string(excluded) +
                                             " exogenous variable(s)");
      }
    }
  }
};

/// Per-equation data on one common sample, with the instrument matrix of all
/// exogenous variables plus the intercept.
struct SystemDesign {
  std::vector<std::string> titles;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::MatrixXd> X;
  std::vector<std::vector<std::string>> names;
  Eigen::MatrixXd W;
  std::vector<std::string> w_names;
  std::map<std::string, Eigen::VectorXd> endogenous_values;
  std::vector<std::string> endogenous_order;
  std::map<std::string, std::size_t> dropped;

  std::size_t equations() const { return y.size(); }
  Eigen::Index rows() const { return W.rows(); }
};

inline SystemDesign build_system_design(const VariableResolver& data, const EquationSystem& system,
                                        const std::vector<Filter>& filters = {}) {
  system.check_order_condition();
  std::map<std::string, Column> cols;
  auto need = [&](const std::string& t) {
    if (!cols.count(t)) cols.emplace(t, data.evaluate(t));
  };
  for (const auto& e : system.endogenous) need(e);
  for (const auto& eq : system.equations) {
    need(eq.dependent);
    for (const auto& t : eq.regressors) need(t);
  }
  const auto keep = data.filter_mask(filters);
  SystemDesign sd;
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < data.rows(); ++k) {
    const char* reason = keep[k] ? nullptr : kReasonFilter;
    for (const auto& [name, c] : cols)
      if (!reason && c.missing[k]) reason = c.missing[k];
    if (reason) {
      ++sd.dropped[reason];
      continue;
    }
    kept.push_back(k);
  }
  if (kept.empty()) fail(ErrorKind::EmptySample, "no observation survives listwise deletion");
  const auto n = static_cast<Eigen::Index>(kept.size());
  auto gather = [&](const std::string& t) {
    Eigen::VectorXd v(n);
    const auto& c = cols.at(t);
    for (Eigen::Index r = 0; r < n; ++r) v(r) = c.values[kept[static_cast<std::size_t>(r)]];
    return v;
  };
  const auto exo = system.exogenous();
  sd.W.resize(n, static_cast<Eigen::Index>(exo.size()) + 1);
  for (std::size_t c = 0; c < exo.size(); ++c) {
    sd.W.col(static_cast<Eigen::Index>(c)) = gather(exo[c]);
    sd.w_names.push_back(data.display_name(exo[c]));
  }
  sd.W.col(sd.W.cols() - 1).setOnes();
  sd.w_names.emplace_back(kIntercept);
  require_full_rank(sd.W, sd.w_names, "instrument matrix");
  for (const auto& eq : system.equations) {
    sd.titles.push_back(data.display_name(eq.dependent));
    sd.y.push_back(gather(eq.dependent));
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(eq.regressors.size()) + 1);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < eq.regressors.size(); ++c) {
      x.col(static_cast<Eigen::Index>(c)) = gather(eq.regressors[c]);
      names.push_back(data.display_name(eq.regressors[c]));
    }
    x.col(x.cols() - 1).setOnes();
    names.emplace_back(kIntercept);
    require_full_rank(x, names, "equation for " + eq.dependent);
    sd.X.push_back(std::move(x));
    sd.names.push_back(std::move(names));
  }
  for (const auto& e : system.endogenous) {
    sd.endogenous_order.push_back(data.display_name(e));
    sd.endogenous_values[sd.endogenous_order.back()] = gather(e);
  }
  return sd;
}

namespace detail {

/// Projection of each equation's regressors onto the instrument space.
inline std::vector<Eigen::MatrixXd> project_regressors(const SystemDesign& sd) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(sd.W);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(sd.W.rows(), sd.W.cols());
  std::vector<Eigen::MatrixXd> out;
  for (const auto& x : sd.X) out.push_back(q * (q.transpose() * x));
  return out;
}

}  // namespace detail

/// Equation-by-equation two-stage least squares. Covariance sigma_mm
/// (Xhat'Xhat)^{-1} with sigma_mm = e'e / n from structural residuals.
inline FitResult two_sls(const SystemDesign& sd) {
  const auto xhat = detail::project_regressors(sd);
  const auto n = static_cast<double>(sd.rows());
  FitResult fit;
  fit.estimator = Estimator::TwoSls;
  fit.n_obs = static_cast<std::size_t>(sd.rows());
  const auto m = sd.equations();
  Eigen::MatrixXd resid(sd.rows(), static_cast<Eigen::Index>(m));
  for (std::size_t e = 0; e < m; ++e) {
    auto ls = least_squares(xhat[e], sd.y[e], sd.names[e]);
    const Eigen::VectorXd r = sd.y[e] - sd.X[e] * ls.coef;
    resid.col(static_cast<Eigen::Index>(e)) = r;
    fit.blocks.push_back(make_block(sd.titles[e], sd.names[e], ls.coef, (r.squaredNorm() / n) * ls.xtx_inv));
  }
  fit.sigma = resid.transpose() * resid / n;
  return fit;
}

struct ThreeSlsOptions {
  bool identity_sigma = false;  // system GLS with Sigma = I
};

/// 2SLS per equation, cross-equation residual covariance from the 2SLS
/// residuals, then system GLS on the projected regressors.
inline FitResult three_sls(const SystemDesign& sd, const ThreeSlsOptions& opt = {}) {
  const auto m = sd.equations();
  const auto first = two_sls(sd);
  const auto xhat = detail::project_regressors(sd);
  const Eigen::MatrixXd sigma =
      opt.identity_sigma ? Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m))
                         : first.sigma;
  const Eigen::MatrixXd sinv = spd_inverse(sigma);

  std::vector<Eigen::Index> offset(m + 1, 0);
  for (std::size_t e = 0; e < m; ++e) offset[e + 1] = offset[e] + sd.X[e].cols();
  const auto k = offset[m];
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      const double s = sinv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      a.block(offset[r], offset[c], sd.X[r].cols(), sd.X[c].cols()) = s * (xhat[r].transpose() * xhat[c]);
      b.segment(offset[r], sd.X[r].cols()) += s * (xhat[r].transpose() * sd.y[c]);
    }
  }
  const Eigen::MatrixXd cov = spd_inverse(a);
  const Eigen::VectorXd beta = a.ldlt().solve(b);

  FitResult fit;
  fit.estimator = Estimator::ThreeSls;
  fit.n_obs = static_cast<std::size_t>(sd.rows());
  fit.sigma = sigma;
  fit.system_cov = cov;
  for (std::size_t e = 0; e < m; ++e) {
    const auto len = sd.X[e].cols();
    fit.blocks.push_back(make_block(sd.titles[e], sd.names[e], beta.segment(offset[e], len),
                                    cov.block(offset[e], offset[e], len, len)));
  }
  return fit;
}

/// OLS of every endogenous variable on the full exogenous set.
inline FitResult reduced_form(const SystemDesign& sd) {
  FitResult fit;
  fit.estimator = Estimator::ReducedForm;
  fit.n_obs = static_cast<std::size_t>(sd.rows());
  for (const auto& title : sd.endogenous_order) {
    auto sub = ols(sd.W, sd.endogenous_values.at(title), sd.w_names, title);
    fit.blocks.push_back(sub.main());
  }
  return fit;
}

inline FitResult three_sls(const EquationSystem& system, const DyadPanel& panel, const MeasureTable* measures,
                           const ModelSpec& spec = {}, const ThreeSlsOptions& opt = {}) {
  VariableResolver data(panel, measures, spec.direction, spec.log_policy);
  return three_sls(build_system_design(data, system, spec.filters), opt);
}

inline FitResult reduced_form(const EquationSystem& system, const DyadPanel& panel, const MeasureTable* measures,
                              const ModelSpec& spec = {}) {
  VariableResolver data(panel, measures, spec.direction, spec.log_policy);
  return reduced_form(build_system_design(data, system, spec.filters));
}

}  // namespace fdinet::econ
