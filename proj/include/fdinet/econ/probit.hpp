#pragma once

// Probit maximum likelihood by Newton-Raphson with step halving.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/econ/fit_result.hpp"
#include "fdinet/econ/linalg.hpp"
#include "fdinet/econ/normal.hpp"

namespace fdinet::econ {

struct ProbitOptions {
  double gradient_tol = 1e-10;
  int max_iter = 100;
  double divergence_norm = 1e6;
};

inline double probit_loglik(const Eigen::VectorXd& gamma, const Eigen::VectorXd& d, const Eigen::MatrixXd& z) {
  const Eigen::VectorXd index = z * gamma;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < index.size(); ++i) ll += log_normal_cdf(d(i) == 1.0 ? index(i) : -index(i));
  return ll;
}

inline Eigen::VectorXd probit_gradient(const Eigen::VectorXd& gamma, const Eigen::VectorXd& d,
                                       const Eigen::MatrixXd& z) {
  const Eigen::VectorXd index = z * gamma;
  Eigen::VectorXd score(index.size());
  for (Eigen::Index i = 0; i < index.size(); ++i)
    score(i) = d(i) == 1.0 ? inverse_mills(index(i)) : -inverse_mills(-index(i));
  return z.transpose() * score;
}

/// Hessian of the log-likelihood (negative definite).
inline Eigen::MatrixXd probit_hessian(const Eigen::VectorXd& gamma, const Eigen::VectorXd& d,
                                      const Eigen::MatrixXd& z) {
  const Eigen::VectorXd index = z * gamma;
  Eigen::VectorXd w(index.size());
  for (Eigen::Index i = 0; i < index.size(); ++i) {
    const double q = d(i) == 1.0 ? index(i) : -index(i);
    const double lam = inverse_mills(q);
    w(i) = lam * (q + lam);
  }
  return -(z.transpose() * w.asDiagonal() * z);
}

inline FitResult probit_mle(const Eigen::VectorXd& d, const Eigen::MatrixXd& z, const std::vector<std::string>& names,
                            const std::string& title = "trade_dummy", const ProbitOptions& opt = {}) {
  const auto n = d.size();
  if (n == 0 || z.rows() != n) fail(ErrorKind::EmptySample, "probit needs a nonempty selection sample");
  for (Eigen::Index i = 0; i < n; ++i)
    if (d(i) != 0.0 && d(i) != 1.0) fail(ErrorKind::InvalidArgument, "probit outcome must be 0/1");
  const double ones = d.sum();
  if (ones == 0.0 || ones == static_cast<double>(n)) {
    fail(ErrorKind::Separation, "outcome has a single class; the intercept diverges");
  }

  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(z.cols());
  double ll = probit_loglik(gamma, d, z);
  FitResult fit;
  fit.estimator = Estimator::Probit;
  fit.loglik_trace.push_back(ll);
  bool converged = false;
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    const Eigen::VectorXd g = probit_gradient(gamma, d, z);
    if (g.cwiseAbs().maxCoeff() < opt.gradient_tol) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd info = -probit_hessian(gamma, d, z);
    const Eigen::VectorXd step = info.ldlt().solve(g);
    // A step below machine resolution of gamma means the gradient is at its
    // rounding floor (large n).
    if (step.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + gamma.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
    // Near the optimum the log-likelihood change is below its rounding noise,
    // so the line search cannot tell ascent from descent; take the full step.
    if (g.dot(step) < 1e-8) {
      gamma += step;
      ll = probit_loglik(gamma, d, z);
      fit.loglik_trace.push_back(ll);
      continue;
    }
    double t = 1.0;
    Eigen::VectorXd next = gamma + step;
    double ll_next = probit_loglik(next, d, z);
    while (!(ll_next >= ll) && t > 1e-12) {
      t *= 0.5;
      next = gamma + t * step;
      ll_next = probit_loglik(next, d, z);
    }
    if (!(ll_next >= ll)) {
      if (g.cwiseAbs().maxCoeff() < 1e-6) {
        converged = true;
        break;
      }
      fail(ErrorKind::NotConverged, "probit line search failed to improve the log-likelihood");
    }
    gamma = next;
    ll = ll_next;
    fit.loglik_trace.push_back(ll);
    if (gamma.norm() > opt.divergence_norm) {
      fail(ErrorKind::Separation, "probit coefficients diverge (|gamma| > 1e6); a regressor separates the classes");
    }
  }
  if (!converged) fail(ErrorKind::NotConverged, "probit did not converge in " + std::to_string(opt.max_iter) + " iterations");
  if (ll > -1e-10) fail(ErrorKind::Separation, "probit fits the outcome perfectly; classes are separated");

  fit.iterations = iter;
  fit.n_obs = static_cast<std::size_t>(n);
  fit.loglik = ll;
  fit.blocks.push_back(make_block(title, names, gamma, spd_inverse(-probit_hessian(gamma, d, z))));
  return fit;
}

}  // namespace fdinet::econ
