#pragma once

// Small builders shared by the unit and acceptance tests.

#include <Eigen/Dense>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fdinet/econ/sem.hpp"
#include "fdinet/netcore.hpp"
#include "fdinet/synth/rng.hpp"

namespace fdinet::testing {

/// Codes A..Z, then AA, AB, ...
inline RegistryPtr letters(std::size_t n) {
  std::vector<std::string> codes;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < 26) codes.emplace_back(1, static_cast<char>('A' + k));
    else codes.push_back({static_cast<char>('A' + k / 26 - 1), static_cast<char>('A' + k % 26)});
  }
  return std::make_shared<const CountryRegistry>(codes);
}

inline WeightedDigraph digraph(const Eigen::MatrixXd& w) {
  return WeightedDigraph(letters(static_cast<std::size_t>(w.rows())), w);
}

/// Each ordered pair is linked with probability `density`; weights are
/// integer counts in [1, max_weight].
inline WeightedDigraph random_digraph(synth::CounterRng& rng, std::size_t n, double density, int max_weight = 9) {
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j)
      if (i != j && rng.bernoulli(density)) w(i, j) = 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(max_weight)));
  return digraph(w);
}

inline Dyad dyad(std::string o, std::string d, double trade, double cc, double dist = 100.0) {
  Dyad r;
  r.origin = std::move(o);
  r.dest = std::move(d);
  r.trade = trade;
  r.cc = cc;
  r.gdp_o = r.gdp_d = 10.0;
  r.pop_o = r.pop_d = 1.0e6;
  r.dist = dist;
  return r;
}

// Simultaneous system
//   y1 = 1.0 + 0.5 y2 + 1.0 x1 + 0.8 x2 + e1
//   y2 = 2.0 - 0.3 y1 + 1.2 x3 - 0.6 x2 + e2
// with correlated errors; x1 is excluded from equation 2 and x3 from 1.
inline econ::SystemDesign simultaneous(std::uint64_t seed, Eigen::Index n = 500) {
  synth::CounterRng rng(seed);
  econ::SystemDesign sd;
  sd.titles = {"y1", "y2"};
  sd.names = {{"y2", "x1", "x2", "cons"}, {"y1", "x3", "x2", "cons"}};
  sd.w_names = {"x1", "x2", "x3", "cons"};
  sd.W.resize(n, 4);
  Eigen::VectorXd y1(n), y2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x1 = rng.normal(), x2 = rng.normal(), x3 = rng.normal();
    const double u = rng.normal();
    const double e1 = u + 0.5 * rng.normal(), e2 = 0.7 * u + 0.5 * rng.normal();
    // Solve the 2x2 structural system for (y1, y2).
    const double r1 = 1.0 + x1 + 0.8 * x2 + e1;
    const double r2 = 2.0 + 1.2 * x3 - 0.6 * x2 + e2;
    const double det = 1.0 - 0.5 * -0.3;
    y1(i) = (r1 + 0.5 * r2) / det;
    y2(i) = (r2 - 0.3 * r1) / det;
    sd.W.row(i) << x1, x2, x3, 1.0;
  }
  Eigen::MatrixXd x1(n, 4), x2(n, 4);
  x1 << y2, sd.W.col(0), sd.W.col(1), sd.W.col(3);
  x2 << y1, sd.W.col(2), sd.W.col(1), sd.W.col(3);
  sd.y = {y1, y2};
  sd.X = {x1, x2};
  sd.endogenous_order = {"y1", "y2"};
  sd.endogenous_values = {{"y1", y1}, {"y2", y2}};
  return sd;
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fdinet_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fdinet::testing
