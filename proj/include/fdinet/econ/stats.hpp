#pragma once

// Descriptive statistics over panel + measure variables.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/econ/design.hpp"

namespace fdinet::econ {

struct SummaryRow {
  std::string variable;
  std::size_t n = 0;
  double mean = kMissing;
  double sd = kMissing;  // sample standard deviation (n - 1)
  double min = kMissing;
  double max = kMissing;
};

/// Single-pass (Welford) moments over the defined values.
inline SummaryRow summarize_values(const std::string& name, const std::vector<double>& values) {
  SummaryRow row;
  row.variable = name;
  double mean = 0.0;
  double m2 = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t n = 0;
  for (double v : values) {
    if (is_missing(v)) continue;
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  row.n = n;
  if (n == 0) return row;
  row.mean = mean;
  row.sd = n > 1 ? std::sqrt(std::max(0.0, m2 / static_cast<double>(n - 1))) : 0.0;
  row.min = lo;
  row.max = hi;
  return row;
}

inline std::vector<SummaryRow> summarize(const VariableResolver& data, const std::vector<std::string>& variables) {
  std::vector<SummaryRow> out;
  for (const auto& v : variables) {
    auto col = data.evaluate(v);
    out.push_back(summarize_values(col.name, col.values));
  }
  return out;
}

/// Pearson correlation over rows where both values are defined.
inline double pairwise_correlation(const std::vector<double>& a, const std::vector<double>& b, const std::string& what) {
  double ma = 0.0, mb = 0.0, caa = 0.0, cbb = 0.0, cab = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (is_missing(a[k]) || is_missing(b[k])) continue;
    ++n;
    const double da = a[k] - ma;
    const double db = b[k] - mb;
    ma += da / static_cast<double>(n);
    mb += db / static_cast<double>(n);
    caa += da * (a[k] - ma);
    cbb += db * (b[k] - mb);
    cab += da * (b[k] - mb);
  }
  if (n < 2 || caa <= 0.0 || cbb <= 0.0) fail(ErrorKind::ZeroVariance, what + " has zero variance on its complete pairs");
  return std::clamp(cab / std::sqrt(caa * cbb), -1.0, 1.0);
}

struct CorrelationMatrix {
  std::vector<std::string> variables;
  Eigen::MatrixXd values;
};

inline CorrelationMatrix correlations(const VariableResolver& data, const std::vector<std::string>& variables) {
  if (variables.size() < 2) fail(ErrorKind::InvalidArgument, "correlations need at least two variables");
  std::vector<Column> cols;
  for (const auto& v : variables) cols.push_back(data.evaluate(v));
  const auto k = static_cast<Eigen::Index>(cols.size());
  CorrelationMatrix out;
  out.values = Eigen::MatrixXd::Identity(k, k);
  for (const auto& c : cols) out.variables.push_back(c.name);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const auto& a = cols[static_cast<std::size_t>(i)];
      const auto& b = cols[static_cast<std::size_t>(j)];
      const double r = pairwise_correlation(a.values, b.values, "pair (" + a.name + ", " + b.name + ")");
      out.values(i, j) = r;
      out.values(j, i) = r;
    }
  }
  return out;
}

}  // namespace fdinet::econ
