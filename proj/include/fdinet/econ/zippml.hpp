#pragma once

// Zero-inflated Poisson pseudo-maximum-likelihood:
//   P(y = 0) = pi + (1 - pi) exp(-mu),  P(y = k) = (1 - pi) Pois(k; mu),
//   logit(pi) = Z delta,  ln mu = X beta,
// fitted by EM. Parameters are stacked as theta = [beta; delta].

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/econ/design.hpp"
#include "fdinet/econ/fit_result.hpp"
#include "fdinet/econ/linalg.hpp"
#include "fdinet/econ/ppml.hpp"

namespace fdinet::econ {

struct ZipOptions {
  double loglik_tol = 1e-8;
  int max_iter = 500;
};

namespace detail {

inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
inline double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
inline double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

struct ZipParts {
  Eigen::VectorXd eta;   // X beta
  Eigen::VectorXd zeta;  // Z delta
};

inline ZipParts zip_parts(const Eigen::VectorXd& theta, const Eigen::MatrixXd& x, const Eigen::MatrixXd& z) {
  const auto kx = x.cols();
  return {(x * theta.head(kx)).array().min(kMaxLinearPredictor).matrix(), z * theta.tail(z.cols())};
}

}  // namespace detail

inline double zip_loglik(const Eigen::VectorXd& theta, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& z) {
  const auto p = detail::zip_parts(theta, x, z);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double mu = std::exp(p.eta(i));
    if (y(i) == 0.0) {
      ll += detail::log_add_exp(p.zeta(i), -mu) - detail::softplus(p.zeta(i));
    } else {
      ll += -detail::softplus(p.zeta(i)) + y(i) * p.eta(i) - mu - std::lgamma(y(i) + 1.0);
    }
  }
  return ll;
}

inline Eigen::VectorXd zip_gradient(const Eigen::VectorXd& theta, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                    const Eigen::MatrixXd& z) {
  const auto p = detail::zip_parts(theta, x, z);
  const auto n = y.size();
  Eigen::VectorXd g_eta(n), g_zeta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = std::exp(p.eta(i));
    const double pi = detail::logistic(p.zeta(i));
    if (y(i) == 0.0) {
      const double r = detail::logistic(p.zeta(i) + mu);  // posterior P(structural zero)
      g_zeta(i) = r - pi;
      g_eta(i) = -mu * (1.0 - r);
    } else {
      g_zeta(i) = -pi;
      g_eta(i) = y(i) - mu;
    }
  }
  Eigen::VectorXd g(theta.size());
  g << x.transpose() * g_eta, z.transpose() * g_zeta;
  return g;
}

inline Eigen::MatrixXd zip_hessian(const Eigen::VectorXd& theta, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& z) {
  const auto p = detail::zip_parts(theta, x, z);
  const auto n = y.size();
  Eigen::VectorXd h_ee(n), h_zz(n), h_ez(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = std::exp(p.eta(i));
    const double pi = detail::logistic(p.zeta(i));
    if (y(i) == 0.0) {
      const double r = detail::logistic(p.zeta(i) + mu);
      const double s = 1.0 - r;
      h_zz(i) = r * s - pi * (1.0 - pi);
      h_ez(i) = mu * r * s;
      h_ee(i) = -mu * s + mu * mu * r * s;
    } else {
      h_zz(i) = -pi * (1.0 - pi);
      h_ez(i) = 0.0;
      h_ee(i) = -mu;
    }
  }
  const auto kx = x.cols();
  const auto kz = z.cols();
  Eigen::MatrixXd h(kx + kz, kx + kz);
  h.topLeftCorner(kx, kx) = x.transpose() * h_ee.asDiagonal() * x;
  h.bottomRightCorner(kz, kz) = z.transpose() * h_zz.asDiagonal() * z;
  h.topRightCorner(kx, kz) = x.transpose() * h_ez.asDiagonal() * z;
  h.bottomLeftCorner(kz, kx) = h.topRightCorner(kx, kz).transpose();
  return h;
}

namespace detail {

/// Logistic regression with fractional responses w in [0,1], by Newton from
/// `delta`.
inline void fractional_logit(const Eigen::MatrixXd& z, const Eigen::VectorXd& w, Eigen::VectorXd& delta) {
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::VectorXd zeta = z * delta;
    Eigen::VectorXd pi(zeta.size()), v(zeta.size());
    for (Eigen::Index i = 0; i < zeta.size(); ++i) {
      pi(i) = logistic(zeta(i));
      v(i) = pi(i) * (1.0 - pi(i));
    }
    const Eigen::VectorXd g = z.transpose() * (w - pi);
    const Eigen::MatrixXd info = z.transpose() * v.asDiagonal() * z;
    Eigen::VectorXd step = spd_inverse(info) * g;
    // Near the pi -> 0 boundary the curvature vanishes; cap the step so the
    // EM path moves toward the boundary monotonically.
    const double big = step.cwiseAbs().maxCoeff();
    if (big > 5.0) step *= 5.0 / big;
    delta += step;
    if (big < 1e-10) break;
  }
}

}  // namespace detail

inline FitResult zippml(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::MatrixXd& z,
                        const std::vector<std::string>& x_names, const std::vector<std::string>& z_names,
                        const std::string& title = "trade", const ZipOptions& opt = {}) {
  if ((y.array() < 0.0).any()) fail(ErrorKind::InvalidArgument, "zippml needs a nonnegative dependent variable");
  if (!(y.array() == 0.0).any()) fail(ErrorKind::NoZeros, "no zero outcomes to inflate; use ppml instead");
  if (z.rows() != y.size() || x.rows() != y.size()) fail(ErrorKind::InvalidArgument, "design row mismatch");
  const auto kx = x.cols();
  const auto kz = z.cols();
  const auto n = y.size();

  Eigen::VectorXd beta = least_squares(x, y.array().log1p().matrix(), x_names).coef;
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(kz);
  Eigen::VectorXd theta(kx + kz);
  theta << beta, delta;
  double ll = zip_loglik(theta, y, x, z);

  FitResult fit;
  fit.estimator = Estimator::Zippml;
  fit.loglik_trace.push_back(ll);
  bool converged = false;
  int iter = 0;
  for (iter = 1; iter <= opt.max_iter; ++iter) {
    // E-step: posterior probability that a zero is structural.
    const Eigen::VectorXd eta = (x * beta).array().min(detail::kMaxLinearPredictor).matrix();
    const Eigen::VectorXd zeta = z * delta;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = y(i) == 0.0 ? detail::logistic(zeta(i) + std::exp(eta(i))) : 0.0;
    // M-step: weighted logit for the inflation equation, weighted Poisson
    // for the count equation.
    detail::fractional_logit(z, w, delta);
    detail::poisson_irls(x, y, (1.0 - w.array()).matrix(), beta, 1e-10, 100);
    theta << beta, delta;
    const double ll_next = zip_loglik(theta, y, x, z);
    fit.loglik_trace.push_back(ll_next);
    const double change = std::abs(ll_next - ll);
    ll = ll_next;
    if (change < opt.loglik_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) fail(ErrorKind::NotConverged, "zippml EM did not converge in " + std::to_string(opt.max_iter) + " iterations");

  const Eigen::MatrixXd cov = spd_inverse(-zip_hessian(theta, y, x, z));
  fit.iterations = iter;
  fit.n_obs = static_cast<std::size_t>(n);
  fit.loglik = ll;
  fit.blocks.push_back(make_block(title, x_names, beta, cov.topLeftCorner(kx, kx)));
  fit.blocks.push_back(make_block("inflate", z_names, delta, cov.bottomRightCorner(kz, kz)));
  const Eigen::VectorXd zeta = z * delta;
  fit.scalars["mean_pi"] = zeta.unaryExpr([](double v) { return detail::logistic(v); }).mean();
  return fit;
}

inline FitResult zippml(const DesignMatrix& dm, const ZipOptions& opt = {}) {
  auto fit = zippml(dm.X, dm.y, dm.Z, dm.names, dm.z_names, dm.dependent, opt);
  fit.warnings = dm.warnings;
  return fit;
}

}  // namespace fdinet::econ
