#pragma once

// Brute-force reference implementations used to check the fast solvers.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/econ/probit.hpp"
#include "fdinet/econ/zippml.hpp"
#include "fdinet/measures.hpp"
#include "fdinet/netcore.hpp"

namespace fdinet::synth {

inline constexpr std::size_t kOracleMaxNodes = 8;

/// Minimum over every simple path of the summed edge lengths 1/C^alpha.
/// Sums accumulate along the path from the source. NaN where no path exists.
inline Eigen::MatrixXd oracle_shortest_paths(const WeightedDigraph& control, double alpha = 1.0) {
  check_alpha(alpha);
  const std::size_t n = control.size();
  if (n > kOracleMaxNodes) {
    fail(ErrorKind::TooLarge, "path enumeration is limited to " + std::to_string(kOracleMaxNodes) + " nodes, got " +
                                  std::to_string(n));
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), inf);
  std::vector<bool> on_path(n, false);
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t s, std::size_t u, double length) {
    on_path[u] = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (on_path[v] || !control.has_edge(u, v)) continue;
      const double next = length + edge_length(control(u, v), alpha);
      auto& b = best(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(v));
      b = std::min(b, next);
      walk(s, v, next);
    }
    on_path[u] = false;
  };
  for (std::size_t s = 0; s < n; ++s) walk(s, s, 0.0);
  for (Eigen::Index k = 0; k < best.size(); ++k)
    if (best(k) == inf) best(k) = kMissing;
  best.diagonal().setConstant(kMissing);
  return best;
}

// ---------------------------------------------------------------------------
// Grid maximum likelihood

struct GridProblem {
  std::function<double(const Eigen::VectorXd&)> loglik;
  std::vector<std::pair<double, double>> bounds;  // one box interval per parameter
  std::size_t n_obs = 0;
};

struct GridResult {
  Eigen::VectorXd theta;
  double loglik = -std::numeric_limits<double>::infinity();
  bool at_boundary = false;  // maximizer sits on the edge of the search box
};

inline constexpr std::size_t kGridMaxParams = 2;
inline constexpr std::size_t kGridMaxObs = 20;
inline constexpr double kGridStep = 1e-3;

namespace detail {

/// Exhaustive search over a regular grid with spacing `step` on `box`.
inline GridResult grid_scan(const GridProblem& p, const std::vector<std::pair<double, double>>& box, double step) {
  const std::size_t k = box.size();
  std::vector<long> counts(k);
  for (std::size_t j = 0; j < k; ++j)
    counts[j] = static_cast<long>(std::floor((box[j].second - box[j].first) / step + 1e-9)) + 1;
  GridResult best;
  best.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  std::vector<long> idx(k, 0);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(k));
  while (true) {
    for (std::size_t j = 0; j < k; ++j) theta(static_cast<Eigen::Index>(j)) = box[j].first + step * static_cast<double>(idx[j]);
    const double ll = p.loglik(theta);
    if (ll > best.loglik) {
      best.loglik = ll;
      best.theta = theta;
    }
    std::size_t j = 0;
    while (j < k && ++idx[j] == counts[j]) idx[j++] = 0;
    if (j == k) break;
  }
  return best;
}

}  // namespace detail

/// Maximizes a likelihood with at most two parameters. A coarse pass
/// (step 1e-2) over the box locates the basin, a dense pass (step 1e-3)
/// covers its neighbourhood, and a compass search refines to 1e-5.
inline GridResult oracle_grid_mle(const GridProblem& p) {
  if (p.bounds.empty() || p.bounds.size() > kGridMaxParams) {
    fail(ErrorKind::TooLarge, "grid oracle supports 1 or 2 parameters, got " + std::to_string(p.bounds.size()));
  }
  if (p.n_obs > kGridMaxObs) {
    fail(ErrorKind::TooLarge, "grid oracle supports at most " + std::to_string(kGridMaxObs) + " observations");
  }
  for (const auto& [lo, hi] : p.bounds)
    if (!(lo < hi)) fail(ErrorKind::InvalidArgument, "grid bounds must satisfy lo < hi");

  const std::size_t k = p.bounds.size();
  auto clip = [&](std::size_t j, double v) { return std::clamp(v, p.bounds[j].first, p.bounds[j].second); };

  auto best = detail::grid_scan(p, p.bounds, 10 * kGridStep);
  std::vector<std::pair<double, double>> window(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double c = best.theta(static_cast<Eigen::Index>(j));
    window[j] = {clip(j, c - 20 * kGridStep), clip(j, c + 20 * kGridStep)};
  }
  auto dense = detail::grid_scan(p, window, kGridStep);
  if (dense.loglik >= best.loglik) best = dense;

  for (double step = kGridStep / 2; step >= 1e-5; step /= 2) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t j = 0; j < k; ++j) {
        for (double sign : {-1.0, 1.0}) {
          Eigen::VectorXd t = best.theta;
          const auto ji = static_cast<Eigen::Index>(j);
          t(ji) = clip(j, t(ji) + sign * step);
          const double ll = p.loglik(t);
          if (ll > best.loglik) {
            best.loglik = ll;
            best.theta = t;
            moved = true;
          }
        }
      }
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    const double v = best.theta(static_cast<Eigen::Index>(j));
    const double tol = 2 * kGridStep;
    if (v - p.bounds[j].first < tol || p.bounds[j].second - v < tol) best.at_boundary = true;
  }
  return best;
}

/// Intercept-only probit on binary outcomes `d`.
inline GridProblem probit_intercept_problem(const Eigen::VectorXd& d, double bound = 8.0) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Ones(d.size(), 1);
  return {[d, z](const Eigen::VectorXd& g) { return econ::probit_loglik(g, d, z); },
          {{-bound, bound}},
          static_cast<std::size_t>(d.size())};
}

/// Zero-inflated Poisson with an intercept in each part: theta = [beta0, delta0].
inline GridProblem zip_intercepts_problem(const Eigen::VectorXd& y, std::pair<double, double> beta_box = {-3.0, 3.0},
                                          std::pair<double, double> delta_box = {-6.0, 6.0}) {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(y.size(), 1);
  return {[y, one](const Eigen::VectorXd& t) { return econ::zip_loglik(t, y, one, one); },
          {beta_box, delta_box},
          static_cast<std::size_t>(y.size())};
}

}  // namespace fdinet::synth
