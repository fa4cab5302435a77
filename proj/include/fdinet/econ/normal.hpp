#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace fdinet::econ {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(x) without cancellation.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline constexpr double kMillsAsymptoticBelow = -30.0;

/// phi(v)/Phi(v). Below v = -30 both factors underflow together, so the
/// asymptotic expansion of the Mills ratio is used instead.
inline double inverse_mills(double v) {
  if (v < kMillsAsymptoticBelow) {
    const double x = -v;
    const double r = 1.0 / (x * x);
    // Phi(-x)/phi(x) ~ (1/x)(1 - r + 3r^2 - 15r^3 + 105r^4 - 945r^5)
    const double series = 1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 - 945.0 * r))));
    return x / series;
  }
  return normal_pdf(v) / normal_cdf(v);
}

inline Eigen::VectorXd inverse_mills(const Eigen::VectorXd& index) {
  return index.unaryExpr([](double v) { return inverse_mills(v); });
}

/// log Phi(x), accurate in both tails.
inline double log_normal_cdf(double x) {
  if (x < kMillsAsymptoticBelow) {
    return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(inverse_mills(x));
  }
  if (x > 0.0) return std::log1p(-normal_sf(x));
  return std::log(normal_cdf(x));
}

/// Two-sided p-value against the standard normal.
inline double two_sided_p(double z) {
  if (std::isnan(z)) return z;
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

}  // namespace fdinet::econ
