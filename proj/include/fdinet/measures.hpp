#pragma once

// Network measures of indirect control on the corporate-control graph:
// power-weighted direct and shortest path lengths, communicability of the
// binarized undirected graph, and the net-gain ("diff") of the shortest path
// over the direct link.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/core/format.hpp"
#include "fdinet/netcore.hpp"

namespace fdinet {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

using FlagMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class PathKind { Direct, Shortest };

struct PathLengthMatrix {
  RegistryPtr registry;
  double alpha = 1.0;
  PathKind kind = PathKind::Shortest;
  bool from_transpose = false;
  Eigen::MatrixXd values;  // NaN where no path exists, and on the diagonal
  FlagMatrix via_direct;   // shortest only: minimum attained by the direct edge

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  std::optional<double> at(std::size_t i, std::size_t j) const {
    const double v = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (is_missing(v)) return std::nullopt;
    return v;
  }
};

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidArgument, "alpha must be finite and >= 0");
}

/// Length of a single control edge: 1 / C^alpha.
inline double edge_length(double weight, double alpha) { return 1.0 / std::pow(weight, alpha); }

inline PathLengthMatrix direct_lengths(const WeightedDigraph& control, double alpha = 1.0) {
  check_alpha(alpha);
  const auto n = static_cast<Eigen::Index>(control.size());
  PathLengthMatrix out;
  out.registry = control.registry_ptr();
  out.alpha = alpha;
  out.kind = PathKind::Direct;
  out.values = Eigen::MatrixXd::Constant(n, n, kMissing);
  out.via_direct = FlagMatrix::Constant(n, n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = control.weights()(i, j);
      if (i != j && c > 0.0) {
        out.values(i, j) = edge_length(c, alpha);
        out.via_direct(i, j) = true;
      }
    }
  }
  return out;
}

/// All-pairs shortest path lengths over edge lengths 1/C^alpha: one
/// label-setting pass per source with a binary-heap frontier. When an
/// indirect path exactly ties the direct edge the pair is flagged direct.
inline PathLengthMatrix shortest_paths(const WeightedDigraph& control, double alpha = 1.0) {
  check_alpha(alpha);
  const std::size_t n = control.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && control.has_edge(i, j)) adjacency[i].emplace_back(j, edge_length(control(i, j), alpha));

  const auto ni = static_cast<Eigen::Index>(n);
  PathLengthMatrix out;
  out.registry = control.registry_ptr();
  out.alpha = alpha;
  out.kind = PathKind::Shortest;
  out.values = Eigen::MatrixXd::Constant(ni, ni, kMissing);
  out.via_direct = FlagMatrix::Constant(ni, ni, false);

  constexpr double inf = std::numeric_limits<double>::infinity();
  using Item = std::pair<double, std::size_t>;
  std::vector<double> dist(n);
  std::vector<bool> settled(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(settled.begin(), settled.end(), false);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    dist[s] = 0.0;
    frontier.emplace(0.0, s);
    while (!frontier.empty()) {
      auto [d, u] = frontier.top();
      frontier.pop();
      if (settled[u]) continue;
      settled[u] = true;
      for (auto [v, w] : adjacency[u]) {
        const double cand = d + w;
        if (cand < dist[v]) {
          dist[v] = cand;
          frontier.emplace(cand, v);
        }
      }
    }
    const auto si = static_cast<Eigen::Index>(s);
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s || dist[t] == inf) continue;
      const auto ti = static_cast<Eigen::Index>(t);
      out.values(si, ti) = dist[t];
      out.via_direct(si, ti) = control.has_edge(s, t) && edge_length(control(s, t), alpha) <= dist[t];
    }
  }
  return out;
}

/// Share of defined shortest paths whose minimum is not attained by the
/// direct edge.
inline double indirect_share(const PathLengthMatrix& shortest) {
  if (shortest.kind != PathKind::Shortest) fail(ErrorKind::InvalidArgument, "indirect_share needs shortest paths");
  std::size_t defined = 0;
  std::size_t indirect = 0;
  for (Eigen::Index i = 0; i < shortest.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < shortest.values.cols(); ++j) {
      if (i == j || is_missing(shortest.values(i, j))) continue;
      ++defined;
      if (!shortest.via_direct(i, j)) ++indirect;
    }
  }
  if (defined == 0) fail(ErrorKind::NoDefinedPairs, "no pair is connected by a control path");
  return static_cast<double>(indirect) / static_cast<double>(defined);
}

// ---------------------------------------------------------------------------
// Communicability

enum class CmbMethod { Spectral, Series };

inline CmbMethod parse_cmb_method(std::string_view s) {
  if (s == "spectral") return CmbMethod::Spectral;
  if (s == "series") return CmbMethod::Series;
  fail(ErrorKind::InvalidArgument, "unknown communicability method '" + std::string(s) + "'");
}

struct CommunicabilityMatrix {
  RegistryPtr registry;
  CmbMethod method = CmbMethod::Spectral;
  Eigen::MatrixXd values;
  int series_terms = 0;  // highest power summed (series only)
};

/// Undirected, unweighted version of the control graph: A(i,j) = 1 iff
/// C(i,j) > 0 or C(j,i) > 0, zero diagonal.
inline Eigen::MatrixXd binarize_undirected(const WeightedDigraph& g) {
  const auto& w = g.weights();
  Eigen::MatrixXd a = ((w.array() > 0.0) || (w.transpose().array() > 0.0)).cast<double>().matrix();
  a.diagonal().setZero();
  return a;
}

inline constexpr double kSeriesTermTolerance = 1e-12;
inline constexpr int kSeriesMaxPower = 64;

inline Eigen::MatrixXd exp_symmetric_spectral(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) fail(ErrorKind::NotConverged, "symmetric eigendecomposition failed");
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd e = v * eig.eigenvalues().array().exp().matrix().asDiagonal() * v.transpose();
  return 0.5 * (e + e.transpose());
}

/// sum_{s=0}^{S} A^s / s!, stopping once the max-abs entry of a term drops
/// below 1e-12 or S reaches 64.
inline Eigen::MatrixXd exp_series(const Eigen::MatrixXd& a, int* terms_used = nullptr) {
  const auto n = a.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  int s = 0;
  while (s < kSeriesMaxPower) {
    ++s;
    term = (term * a) / static_cast<double>(s);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < kSeriesTermTolerance) break;
  }
  if (terms_used) *terms_used = s;
  return sum;
}

inline CommunicabilityMatrix communicability(const WeightedDigraph& control, CmbMethod method = CmbMethod::Spectral) {
  if (control.size() < 1) fail(ErrorKind::InvalidArgument, "communicability needs at least one node");
  CommunicabilityMatrix out;
  out.registry = control.registry_ptr();
  out.method = method;
  const Eigen::MatrixXd a = binarize_undirected(control);
  if (method == CmbMethod::Spectral) {
    out.values = exp_symmetric_spectral(a);
  } else {
    out.values = exp_series(a, &out.series_terms);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Net gain of the shortest path

inline constexpr double kDiffClampTolerance = 1e-12;

/// 1/spl - C without clamping; NaN where spl is undefined.
inline Eigen::MatrixXd diff_unclamped(const PathLengthMatrix& shortest, const WeightedDigraph& control) {
  if (shortest.kind != PathKind::Shortest) fail(ErrorKind::InvalidArgument, "diff needs shortest paths");
  if (shortest.alpha != 1.0) {
    fail(ErrorKind::AlphaNotOne, "diff is only defined for alpha = 1 (got " + format_sig(shortest.alpha) + ")");
  }
  const auto n = shortest.values.rows();
  if (n != static_cast<Eigen::Index>(control.size())) fail(ErrorKind::RegistryMismatch, "graph size mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(n, n, kMissing);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!is_missing(shortest.values(i, j))) out(i, j) = 1.0 / shortest.values(i, j) - control.weights()(i, j);
  return out;
}

/// diff with rounding residue in [-1e-12, 0) clamped to zero. Anything more
/// negative signals an inconsistent shortest-path matrix.
inline Eigen::MatrixXd diff_measure(const PathLengthMatrix& shortest, const WeightedDigraph& control) {
  Eigen::MatrixXd d = diff_unclamped(shortest, control);
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    double& v = d.data()[k];
    if (is_missing(v) || v >= 0.0) continue;
    if (v < -kDiffClampTolerance) {
      fail(ErrorKind::InvalidArgument, "diff below -1e-12; shortest paths inconsistent with control graph");
    }
    v = 0.0;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Per-dyad measure table

struct MeasureOptions {
  double alpha = 1.0;
  double cmb_scale = 1.0;
  CmbMethod cmb_method = CmbMethod::Spectral;
};

struct MeasureTable {
  RegistryPtr registry;
  MeasureOptions options;
  Eigen::MatrixXd spl;
  Eigen::MatrixXd spl_inv;
  Eigen::MatrixXd cmb;
  Eigen::MatrixXd diff;      // NaN everywhere unless alpha = 1
  Eigen::MatrixXd diff_inv;  // NaN everywhere unless alpha = 1
  double indirect_share = kMissing;

  double alpha() const { return options.alpha; }
};

inline MeasureTable measure_table(const WeightedDigraph& control, const MeasureOptions& options = {}) {
  check_alpha(options.alpha);
  if (!(options.cmb_scale > 0.0) || !std::isfinite(options.cmb_scale)) {
    fail(ErrorKind::InvalidArgument, "cmb scale must be positive");
  }
  const auto n = static_cast<Eigen::Index>(control.size());
  const WeightedDigraph control_t = control.transposed();
  MeasureTable t;
  t.registry = control.registry_ptr();
  t.options = options;
  const auto forward = shortest_paths(control, options.alpha);
  const auto backward = shortest_paths(control_t, options.alpha);
  t.spl = forward.values;
  t.spl_inv = backward.values;
  t.cmb = communicability(control, options.cmb_method).values * options.cmb_scale;
  if (options.alpha == 1.0) {
    t.diff = diff_measure(forward, control);
    t.diff_inv = diff_measure(backward, control_t);
  } else {
    t.diff = Eigen::MatrixXd::Constant(n, n, kMissing);
    t.diff_inv = Eigen::MatrixXd::Constant(n, n, kMissing);
  }
  try {
    t.indirect_share = indirect_share(forward);
  } catch (const Error&) {
    t.indirect_share = kMissing;
  }
  return t;
}

inline std::string measures_to_csv(const MeasureTable& t) {
  std::string out = "origin,dest,spl,spl_inv,cmb,diff,diff_inv\n";
  const auto& reg = *t.registry;
  const auto n = static_cast<Eigen::Index>(reg.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      out += csv::join({reg.code(static_cast<std::size_t>(i)), reg.code(static_cast<std::size_t>(j)),
                        format_roundtrip(t.spl(i, j)), format_roundtrip(t.spl_inv(i, j)),
                        format_roundtrip(t.cmb(i, j)), format_roundtrip(t.diff(i, j)),
                        format_roundtrip(t.diff_inv(i, j))}) +
             "\n";
    }
  }
  return out;
}

}  // namespace fdinet
