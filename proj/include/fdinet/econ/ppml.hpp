#pragma once

// Poisson pseudo-maximum-likelihood by iteratively reweighted least squares,
// with Eicker-Huber-White sandwich standard errors.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/econ/design.hpp"
#include "fdinet/econ/fit_result.hpp"
#include "fdinet/econ/linalg.hpp"

namespace fdinet::econ {

struct PpmlOptions {
  double coef_tol = 1e-10;
  int max_iter = 100;
};

namespace detail {

inline constexpr double kMaxLinearPredictor = 700.0;

inline Eigen::VectorXd poisson_mean(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta) {
  return (x * beta).array().min(kMaxLinearPredictor).exp().matrix();
}

/// Weighted Poisson deviance; prior weights w (ones for plain PPML).
inline double poisson_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, const Eigen::VectorXd& w) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double term = y(i) > 0.0 ? y(i) * std::log(y(i) / mu(i)) - (y(i) - mu(i)) : mu(i);
    dev += w(i) * term;
  }
  return 2.0 * dev;
}

/// IRLS for a Poisson GLM with log link and prior weights, from `beta`.
/// Returns the number of iterations used or -1 if not converged.
inline int poisson_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& prior,
                        Eigen::VectorXd& beta, double tol, int max_iter) {
  Eigen::VectorXd mu = poisson_mean(x, beta);
  double dev = poisson_deviance(y, mu, prior);
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::VectorXd eta = x * beta;
    const Eigen::VectorXd w = prior.cwiseProduct(mu);
    const Eigen::VectorXd work = eta + (y - mu).cwiseQuotient(mu);
    const Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::VectorXd next = (sw.asDiagonal() * x).colPivHouseholderQr().solve(sw.cwiseProduct(work));
    Eigen::VectorXd mu_next = poisson_mean(x, next);
    double dev_next = poisson_deviance(y, mu_next, prior);
    // Step halving guards against overshooting from a poor start.
    for (int h = 0; h < 30 && !(dev_next <= dev * (1.0 + 1e-12) + 1e-300); ++h) {
      next = 0.5 * (next + beta);
      mu_next = poisson_mean(x, next);
      dev_next = poisson_deviance(y, mu_next, prior);
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    mu = mu_next;
    dev = dev_next;
    if (change < tol) return iter;
  }
  return -1;
}

}  // namespace detail

inline double poisson_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) ll += y(i) * std::log(mu(i)) - mu(i) - std::lgamma(y(i) + 1.0);
  return ll;
}

inline FitResult ppml(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                      const std::string& title = "trade", const PpmlOptions& opt = {}) {
  if ((y.array() < 0.0).any()) fail(ErrorKind::InvalidArgument, "ppml needs a nonnegative dependent variable (levels)");
  if (y.sum() <= 0.0) fail(ErrorKind::EmptySample, "ppml needs some positive outcomes");
  // Deterministic start: OLS of ln(1 + y) on X.
  Eigen::VectorXd beta = least_squares(x, y.array().log1p().matrix(), names).coef;
  const int iters = detail::poisson_irls(x, y, Eigen::VectorXd::Ones(y.size()), beta, opt.coef_tol, opt.max_iter);
  if (iters < 0) fail(ErrorKind::NotConverged, "ppml did not converge in " + std::to_string(opt.max_iter) + " iterations");

  const Eigen::VectorXd mu = detail::poisson_mean(x, beta);
  const Eigen::MatrixXd bread = spd_inverse(x.transpose() * mu.asDiagonal() * x);
  const Eigen::VectorXd r2 = (y - mu).array().square().matrix();
  const Eigen::MatrixXd meat = x.transpose() * r2.asDiagonal() * x;
  FitResult fit;
  fit.estimator = Estimator::Ppml;
  fit.n_obs = static_cast<std::size_t>(y.size());
  fit.iterations = iters;
  fit.loglik = poisson_loglik(y, mu);
  fit.blocks.push_back(make_block(title, names, beta, bread * meat * bread));
  fit.scalars["deviance"] = detail::poisson_deviance(y, mu, Eigen::VectorXd::Ones(y.size()));
  return fit;
}

inline FitResult ppml(const DesignMatrix& dm, const PpmlOptions& opt = {}) {
  auto fit = ppml(dm.X, dm.y, dm.names, dm.dependent, opt);
  fit.warnings = dm.warnings;
  return fit;
}

}  // namespace fdinet::econ
