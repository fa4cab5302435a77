#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fdinet/core/error.hpp"

namespace fdinet::econ {

/// Least squares through a column-pivoted QR; also yields (X'X)^{-1}.
struct LeastSquares {
  Eigen::VectorXd coef;
  Eigen::MatrixXd xtx_inv;
  Eigen::VectorXd residuals;
};

inline LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const std::vector<std::string>& names) {
  if (x.rows() < x.cols()) {
    fail(ErrorKind::RankDeficient, "need at least as many observations (" + std::to_string(x.rows()) +
                                       ") as coefficients (" + std::to_string(x.cols()) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < x.cols(); ++k) {
      if (!cols.empty()) cols += ", ";
      cols += names.empty() ? std::to_string(perm(k)) : names[static_cast<std::size_t>(perm(k))];
    }
    fail(ErrorKind::RankDeficient, "regressors are collinear: " + cols);
  }
  LeastSquares ls;
  ls.coef = qr.solve(y);
  const auto k = x.cols();
  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  Eigen::MatrixXd r_inv = r.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd inv_perm = r_inv * r_inv.transpose();
  ls.xtx_inv = qr.colsPermutation() * inv_perm * qr.colsPermutation().transpose();
  ls.residuals = y - x * ls.coef;
  return ls;
}

/// Inverse of a symmetric positive (semi)definite matrix. Eigenvalues below
/// 1e-14 of the largest are floored, which inflates the variance of
/// unidentified directions instead of failing.
inline Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
  Eigen::VectorXd ev = eig.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  const double floor = top > 0.0 ? top * 1e-14 : 1e-300;
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = 1.0 / std::max(ev(i), floor);
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return v * ev.asDiagonal() * v.transpose();
}

}  // namespace fdinet::econ
