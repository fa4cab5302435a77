#pragma once

// Machine CSV and aligned text renderings of fits and descriptive tables.

#include <algorithm>
#include <string>
#include <vector>

#include "fdinet/core/csv.hpp"
#include "fdinet/core/format.hpp"
#include "fdinet/econ/fit_result.hpp"
#include "fdinet/econ/stats.hpp"

namespace fdinet::econ {

/// term,coef,se,z,p,stars. Terms of secondary blocks are prefixed with the
/// block title and '/', e.g. trade_dummy/ln_dist. The last row is N.
inline std::string fit_to_csv(const FitResult& fit) {
  std::string out = "term,coef,se,z,p,stars\n";
  for (std::size_t b = 0; b < fit.blocks.size(); ++b) {
    const auto& blk = fit.blocks[b];
    const bool prefixed = fit.estimator == Estimator::ThreeSls || fit.estimator == Estimator::ReducedForm ||
                          fit.estimator == Estimator::TwoSls || b > 0;
    for (std::size_t k = 0; k < blk.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      out += csv::join({prefixed ? blk.title + "/" + blk.names[k] : blk.names[k], format_roundtrip(blk.coef(i)),
                        format_roundtrip(blk.se(i)), format_roundtrip(blk.z(i)), format_roundtrip(blk.p(i)),
                        stars(blk.p(i))}) +
             "\n";
    }
  }
  out += "N," + std::to_string(fit.n_obs) + ",,,,\n";
  return out;
}

namespace detail {

inline std::string pad_right(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }
inline std::string pad_left(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

}  // namespace detail

/// Side-by-side regression table: coefficient with stars, standard error in
/// parentheses beneath, blocks stacked under "(Dep. Var.)" headers and N in
/// the last row. Columns are fits; rows are matched by block title and term.
inline std::string fits_to_table(const std::vector<FitResult>& fits, const std::vector<std::string>& headers) {
  struct RowId {
    std::string block, term;
    bool operator==(const RowId&) const = default;
  };
  std::vector<std::string> block_order;
  std::vector<RowId> rows;
  for (const auto& f : fits) {
    for (const auto& b : f.blocks) {
      if (std::find(block_order.begin(), block_order.end(), b.title) == block_order.end()) block_order.push_back(b.title);
      for (const auto& t : b.names) {
        RowId id{b.title, t};
        if (std::find(rows.begin(), rows.end(), id) == rows.end()) rows.push_back(id);
      }
    }
  }
  const std::size_t label_w = [&] {
    std::size_t w = 4;
    for (const auto& r : rows) w = std::max(w, r.term.size());
    for (const auto& b : block_order) w = std::max(w, b.size() + 12);
    return w + 2;
  }();
  const std::size_t col_w = 18;
  std::string out;
  std::string line(label_w + col_w * fits.size(), '-');
  out += line + "\n" + detail::pad_right("", label_w);
  for (std::size_t c = 0; c < fits.size(); ++c) out += detail::pad_left(c < headers.size() ? headers[c] : "", col_w);
  out += "\n" + line + "\n";
  for (const auto& block : block_order) {
    out += block + " (Dep. Var.)\n";
    for (const auto& r : rows) {
      if (r.block != block) continue;
      std::string coef_line = detail::pad_right(r.term, label_w);
      std::string se_line = detail::pad_right("", label_w);
      for (const auto& f : fits) {
        std::string c, s;
        for (const auto& b : f.blocks) {
          if (b.title != block) continue;
          if (auto k = b.find(r.term)) {
            const auto i = static_cast<Eigen::Index>(*k);
            c = format_sig(b.coef(i)) + " " + stars(b.p(i));
            s = "(" + format_sig(b.se(i)) + ")";
          }
        }
        coef_line += detail::pad_left(c, col_w);
        se_line += detail::pad_left(s, col_w);
      }
      out += coef_line + "\n" + se_line + "\n";
    }
  }
  out += line + "\n" + detail::pad_right("N", label_w);
  for (const auto& f : fits) out += detail::pad_left(std::to_string(f.n_obs), col_w);
  out += "\n" + line + "\n";
  out += "Standard errors in parentheses; * p<0.1, ** p<0.05, *** p<0.01.\n";
  return out;
}

inline std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "variable,n,mean,sd,min,max\n";
  for (const auto& r : rows) {
    out += csv::join({r.variable, std::to_string(r.n), format_roundtrip(r.mean), format_roundtrip(r.sd),
                      format_roundtrip(r.min), format_roundtrip(r.max)}) +
           "\n";
  }
  return out;
}

inline std::string summary_to_table(const std::vector<SummaryRow>& rows) {
  std::size_t w = 8;
  for (const auto& r : rows) w = std::max(w, r.variable.size() + 2);
  std::string out = detail::pad_right("Variable", w);
  for (const char* h : {"Obs", "Mean", "Std. Dev.", "Min", "Max"}) out += detail::pad_left(h, 14);
  out += "\n";
  for (const auto& r : rows) {
    out += detail::pad_right(r.variable, w) + detail::pad_left(std::to_string(r.n), 14);
    for (double v : {r.mean, r.sd, r.min, r.max}) out += detail::pad_left(format_sig(v), 14);
    out += "\n";
  }
  return out;
}

inline std::string correlations_to_csv(const CorrelationMatrix& m) {
  std::vector<std::string> header{"variable"};
  header.insert(header.end(), m.variables.begin(), m.variables.end());
  std::string out = csv::join(header) + "\n";
  for (std::size_t i = 0; i < m.variables.size(); ++i) {
    std::vector<std::string> f{m.variables[i]};
    for (std::size_t j = 0; j < m.variables.size(); ++j)
      f.push_back(format_roundtrip(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    out += csv::join(f) + "\n";
  }
  return out;
}

/// Lower-triangular layout.
inline std::string correlations_to_table(const CorrelationMatrix& m) {
  std::size_t w = 6;
  for (const auto& v : m.variables) w = std::max(w, v.size() + 2);
  std::string out = detail::pad_right("", w);
  for (const auto& v : m.variables) out += detail::pad_left(v, w);
  out += "\n";
  for (std::size_t i = 0; i < m.variables.size(); ++i) {
    out += detail::pad_right(m.variables[i], w);
    for (std::size_t j = 0; j <= i; ++j)
      out += detail::pad_left(format_fixed(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 3), w);
    out += "\n";
  }
  return out;
}

}  // namespace fdinet::econ
