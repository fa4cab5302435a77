#pragma once

#include <cmath>
#include <string>

#include "fdinet/core/error.hpp"
#include "fdinet/core/format.hpp"
#include "fdinet/econ/fit_result.hpp"

namespace fdinet::econ {

/// Distance (km) at which the marginal effect beta_main + beta_inter * ln(dist)
/// of an interacted regressor changes sign: exp(-beta_main / beta_inter).
/// There is no interior solution when beta_inter = 0 or when the sign change
/// falls at or below 1 km (beta_main and beta_inter share a sign).
inline double critical_distance(double beta_main, double beta_inter) {
  if (beta_inter == 0.0 || !std::isfinite(beta_inter) || !std::isfinite(beta_main)) {
    fail(ErrorKind::NoCriticalValue, "interaction coefficient is zero; the effect does not vary with distance");
  }
  const double log_km = -beta_main / beta_inter;
  if (!(log_km > 0.0)) {
    fail(ErrorKind::NoCriticalValue, "effect keeps one sign for every distance above 1 km (ln dist* = " +
                                         format_sig(log_km) + ")");
  }
  return std::exp(log_km);
}

/// Reads both coefficients from a fitted outcome block, e.g.
/// (fit, "ln_cc", "ln_dist:ln_cc").
inline double critical_distance(const FitResult& fit, const std::string& main_term, const std::string& interaction) {
  return critical_distance(fit.coef(main_term), fit.coef(interaction));
}

}  // namespace fdinet::econ
