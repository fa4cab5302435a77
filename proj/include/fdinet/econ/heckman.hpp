#pragma once

// Heckman two-step selection estimator: a probit for the probability of a
// positive flow, then least squares on the positive flows augmented with the
// inverse Mills ratio of the fitted selection index.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fdinet/econ/design.hpp"
#include "fdinet/econ/fit_result.hpp"
#include "fdinet/econ/linalg.hpp"
#include "fdinet/econ/normal.hpp"
#include "fdinet/econ/probit.hpp"

namespace fdinet::econ {

inline constexpr const char* kLambda = "lambda";

/// The design must carry the selection sample (d, Z over every row) and the
/// outcome design X, y (y used only where d = 1).
inline FitResult heckman_two_step(const DesignMatrix& dm) {
  const auto n = static_cast<Eigen::Index>(dm.rows());
  const double positives = dm.d.sum();
  if (positives == static_cast<double>(n)) {
    fail(ErrorKind::EmptySample, "every flow is positive; the selection stage has no zero-trade observations");
  }
  if (positives == 0.0) fail(ErrorKind::EmptySample, "no positive flows for the outcome stage");

  FitResult first = probit_mle(dm.d, dm.Z, dm.z_names, "trade_dummy");
  const Eigen::VectorXd gamma = first.main().coef;
  const Eigen::VectorXd index = dm.Z * gamma;

  std::vector<Eigen::Index> sel;
  for (Eigen::Index i = 0; i < n; ++i)
    if (dm.d(i) == 1.0) sel.push_back(i);
  const auto m = static_cast<Eigen::Index>(sel.size());
  const auto k = dm.X.cols();
  Eigen::MatrixXd xs(m, k + 1);
  Eigen::VectorXd ys(m);
  Eigen::MatrixXd zs(m, dm.Z.cols());
  Eigen::VectorXd delta(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto i = sel[static_cast<std::size_t>(r)];
    const double lam = inverse_mills(index(i));
    xs.row(r).head(k) = dm.X.row(i);
    xs(r, k) = lam;
    ys(r) = dm.y(i);
    zs.row(r) = dm.Z.row(i);
    delta(r) = lam * (lam + index(i));
  }
  std::vector<std::string> names = dm.names;
  names.emplace_back(kLambda);
  auto ls = least_squares(xs, ys, names);
  const double beta_lambda = ls.coef(k);

  // Two-step covariance: heteroskedasticity from selection plus the
  // estimation error in gamma.
  const double sigma2 = ls.residuals.squaredNorm() / static_cast<double>(m) + beta_lambda * beta_lambda * delta.mean();
  const double sigma = std::sqrt(sigma2);
  const double rho = std::clamp(beta_lambda / sigma, -1.0, 1.0);
  const double rho2 = rho * rho;
  const Eigen::MatrixXd xdx = xs.transpose() * delta.asDiagonal() * xs;
  const Eigen::MatrixXd f = xs.transpose() * delta.asDiagonal() * zs;
  const Eigen::MatrixXd q = rho2 * f * first.main().cov * f.transpose();
  const Eigen::MatrixXd middle = xs.transpose() * xs - rho2 * xdx + q;
  const Eigen::MatrixXd cov = sigma2 * ls.xtx_inv * middle * ls.xtx_inv;

  FitResult fit;
  fit.estimator = Estimator::Heckman2s;
  fit.n_obs = static_cast<std::size_t>(n);
  fit.blocks.push_back(make_block(dm.dependent, names, ls.coef, cov));
  fit.blocks.push_back(first.main());
  fit.loglik = first.loglik;
  fit.iterations = first.iterations;
  fit.scalars["n_selected"] = static_cast<double>(m);
  fit.scalars["sigma"] = sigma;
  fit.scalars["rho"] = rho;
  fit.scalars["lambda"] = beta_lambda;
  fit.warnings = dm.warnings;
  return fit;
}

inline FitResult heckman_two_step(const DyadPanel& panel, const MeasureTable* measures, const ModelSpec& spec) {
  if (spec.estimator != Estimator::Heckman2s) fail(ErrorKind::InvalidSpec, "spec estimator is not heckman2s");
  return heckman_two_step(build_design(panel, measures, spec));
}

}  // namespace fdinet::econ
