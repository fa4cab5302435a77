#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

#include "fdinet/econ/design.hpp"
#include "fdinet/econ/fit_result.hpp"
#include "fdinet/econ/linalg.hpp"

namespace fdinet::econ {

/// Ordinary least squares with the classical covariance s^2 (X'X)^{-1},
/// s^2 = RSS / (n - k). With n = k the fit interpolates and the
/// covariance is undefined (NaN).
inline FitResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                     const std::string& title = "y") {
  auto ls = least_squares(x, y, names);
  const double n = static_cast<double>(x.rows());
  const double k = static_cast<double>(x.cols());
  const double rss = ls.residuals.squaredNorm();
  const double s2 = n > k ? rss / (n - k) : std::numeric_limits<double>::quiet_NaN();
  FitResult fit;
  if (!(n > k)) fit.warnings.push_back("no residual degrees of freedom; standard errors undefined");
  fit.estimator = Estimator::Ols;
  fit.n_obs = static_cast<std::size_t>(x.rows());
  fit.blocks.push_back(make_block(title, names, ls.coef, s2 * ls.xtx_inv));
  fit.scalars["rss"] = rss;
  fit.scalars["sigma2"] = s2;
  const double tss = (y.array() - y.mean()).square().sum();
  fit.scalars["r2"] = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  return fit;
}

inline FitResult ols(const DesignMatrix& dm) {
  auto fit = ols(dm.X, dm.y, dm.names, dm.dependent);
  fit.warnings.insert(fit.warnings.begin(), dm.warnings.begin(), dm.warnings.end());
  return fit;
}

}  // namespace fdinet::econ
