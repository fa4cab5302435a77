#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/econ/normal.hpp"

namespace fdinet::econ {

enum class Estimator { Ols, Probit, Heckman2s, Ppml, Zippml, ThreeSls, ReducedForm, TwoSls };

constexpr std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Ols: return "ols";
    case Estimator::Probit: return "probit";
    case Estimator::Heckman2s: return "heckman2s";
    case Estimator::Ppml: return "ppml";
    case Estimator::Zippml: return "zippml";
    case Estimator::ThreeSls: return "threesls";
    case Estimator::ReducedForm: return "reduced_form";
    case Estimator::TwoSls: return "twosls";
  }
  return "";
}

/// Significance stars: p<0.1 *, p<0.05 **, p<0.01 ***.
inline std::string stars(double p) {
  if (std::isnan(p)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

/// One equation's worth of coefficients with their covariance.
struct CoefBlock {
  std::string title;  // dependent variable, e.g. "ln_trade" or "trade_dummy"
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;
  Eigen::VectorXd se;
  Eigen::VectorXd z;
  Eigen::VectorXd p;

  std::size_t size() const { return names.size(); }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
  }

  double operator[](std::string_view name) const {
    auto k = find(name);
    if (!k) fail(ErrorKind::InvalidArgument, "no coefficient named '" + std::string(name) + "' in block " + title);
    return coef(static_cast<Eigen::Index>(*k));
  }

  double se_of(std::string_view name) const {
    auto k = find(name);
    if (!k) fail(ErrorKind::InvalidArgument, "no coefficient named '" + std::string(name) + "' in block " + title);
    return se(static_cast<Eigen::Index>(*k));
  }

  double z_of(std::string_view name) const { return (*this)[name] / se_of(name); }
};

/// Fills se/z/p from coef and cov. Tiny negative diagonal entries from
/// rounding are treated as zero.
inline CoefBlock make_block(std::string title, std::vector<std::string> names, Eigen::VectorXd coef,
                            Eigen::MatrixXd cov) {
  CoefBlock b;
  b.title = std::move(title);
  b.names = std::move(names);
  b.coef = std::move(coef);
  b.cov = 0.5 * (cov + cov.transpose());
  const auto k = b.coef.size();
  b.se.resize(k);
  b.z.resize(k);
  b.p.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    b.se(i) = std::sqrt(std::max(0.0, b.cov(i, i)));
    b.z(i) = b.coef(i) / b.se(i);
    b.p(i) = two_sided_p(b.z(i));
  }
  return b;
}

struct FitResult {
  Estimator estimator = Estimator::Ols;
  std::vector<CoefBlock> blocks;  // blocks[0] is the outcome equation
  std::size_t n_obs = 0;
  std::optional<double> loglik;
  int iterations = 0;
  std::vector<double> loglik_trace;   // per accepted iteration (iterative fits)
  Eigen::MatrixXd sigma;              // cross-equation residual covariance (3SLS)
  Eigen::MatrixXd system_cov;         // stacked covariance across blocks (3SLS)
  std::map<std::string, double> scalars;  // rss, sigma, rho, ... per estimator
  std::vector<std::string> warnings;

  const CoefBlock& main() const { return blocks.at(0); }

  const CoefBlock& block(std::string_view title) const {
    for (const auto& b : blocks)
      if (b.title == title) return b;
    fail(ErrorKind::InvalidArgument, "no coefficient block '" + std::string(title) + "'");
  }

  double coef(std::string_view name) const { return main()[name]; }
  double se(std::string_view name) const { return main().se_of(name); }
};

}  // namespace fdinet::econ
