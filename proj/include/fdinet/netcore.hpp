#pragma once

// Country registry, dyad panel ingestion and the trade / corporate-control
// adjacency matrices built from it.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "fdinet/core/csv.hpp"
#include "fdinet/core/error.hpp"
#include "fdinet/core/format.hpp"
#include "fdinet/core/keyvalue.hpp"

namespace fdinet {

inline std::string normalize_code(std::string_view code) { return to_upper(trim(code)); }

class CountryRegistry {
 public:
  CountryRegistry() = default;

  /// Keeps the given order. Codes are trimmed and upper-cased; empty or
  /// repeated codes are rejected.
  explicit CountryRegistry(const std::vector<std::string>& codes) {
    codes_.reserve(codes.size());
    for (const auto& raw : codes) {
      auto code = normalize_code(raw);
      if (code.empty()) fail(ErrorKind::InvalidArgument, "empty country code");
      if (!index_.emplace(code, codes_.size()).second) {
        fail(ErrorKind::InvalidArgument, "duplicate country code '" + code + "'");
      }
      codes_.push_back(std::move(code));
    }
  }

  static CountryRegistry sorted(std::vector<std::string> codes) {
    for (auto& c : codes) c = normalize_code(c);
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    return CountryRegistry(codes);
  }

  std::size_t size() const noexcept { return codes_.size(); }
  const std::vector<std::string>& codes() const noexcept { return codes_; }
  const std::string& code(std::size_t k) const { return codes_.at(k); }

  std::optional<std::size_t> find(std::string_view code) const {
    auto it = index_.find(normalize_code(code));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index(std::string_view code) const {
    auto k = find(code);
    if (!k) fail(ErrorKind::InvalidArgument, "unknown country code '" + std::string(code) + "'");
    return *k;
  }

  bool operator==(const CountryRegistry& other) const { return codes_ == other.codes_; }

 private:
  std::vector<std::string> codes_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using RegistryPtr = std::shared_ptr<const CountryRegistry>;

/// Dense nonnegative adjacency with a zero diagonal. An edge exists iff its
/// weight is strictly positive.
class WeightedDigraph {
 public:
  WeightedDigraph(RegistryPtr registry, Eigen::MatrixXd weights)
      : registry_(std::move(registry)), weights_(std::move(weights)) {
    if (!registry_) fail(ErrorKind::InvalidArgument, "graph needs a registry");
    const auto n = static_cast<Eigen::Index>(registry_->size());
    if (weights_.rows() != n || weights_.cols() != n) {
      fail(ErrorKind::InvalidArgument, "weight matrix shape does not match registry size");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double w = weights_(i, j);
        if (!std::isfinite(w) || w < 0.0) {
          fail(ErrorKind::NegativeValue, "weight (" + registry_->code(i) + "," + registry_->code(j) +
                                             ") must be finite and nonnegative");
        }
      }
      if (weights_(i, i) != 0.0) {
        fail(ErrorKind::InvalidArgument, "self-loop weight for " + registry_->code(i) + " must be zero");
      }
    }
  }

  std::size_t size() const noexcept { return registry_->size(); }
  const CountryRegistry& registry() const noexcept { return *registry_; }
  const RegistryPtr& registry_ptr() const noexcept { return registry_; }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  double operator()(std::size_t i, std::size_t j) const {
    return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  bool has_edge(std::size_t i, std::size_t j) const { return (*this)(i, j) > 0.0; }

  std::size_t edge_count() const { return static_cast<std::size_t>((weights_.array() > 0.0).count()); }

  WeightedDigraph transposed() const { return WeightedDigraph(registry_, weights_.transpose()); }

  bool same_registry(const WeightedDigraph& other) const {
    return registry_ == other.registry_ || *registry_ == *other.registry_;
  }

 private:
  RegistryPtr registry_;
  Eigen::MatrixXd weights_;
};

// ---------------------------------------------------------------------------
// Dyad panel

struct Dyad {
  std::string origin;
  std::string dest;
  std::string sector;  // empty when the file has no sector column
  double trade = 0.0;  // thousands of current USD
  double cc = 0.0;     // corporate-control link count
  double gdp_o = 0.0;
  double gdp_d = 0.0;
  double pop_o = 0.0;
  double pop_d = 0.0;
  double dist = 0.0;  // km
  std::uint8_t contig = 0;
  std::uint8_t colony = 0;
  std::uint8_t smctry = 0;
  std::uint8_t comlang = 0;
  std::uint8_t rta = 0;
  std::uint8_t asean_china_o = 0;

  bool operator==(const Dyad&) const = default;
};

inline constexpr std::array<std::string_view, 15> kPanelColumns = {
    "origin", "dest",  "trade",  "cc",     "gdp_o",   "gdp_d", "pop_o",        "pop_d",
    "dist",   "contig", "colony", "smctry", "comlang", "rta",   "asean_china_o"};

/// Maps canonical column names to the header names used in a particular
/// file. Unmapped columns use their canonical name.
struct PanelSchema {
  std::map<std::string, std::string> rename;

  std::string column(std::string_view canonical) const {
    auto it = rename.find(std::string(canonical));
    return it == rename.end() ? std::string(canonical) : it->second;
  }
};

class DyadPanel {
 public:
  DyadPanel() = default;

  /// Validates every panel invariant and normalizes country codes. `lines`
  /// optionally carries source line numbers used in error messages.
  explicit DyadPanel(std::vector<Dyad> rows, bool has_sector = false,
                     const std::vector<std::size_t>& lines = {})
      : rows_(std::move(rows)), has_sector_(has_sector) {
    validate(lines);
  }

  const std::vector<Dyad>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  bool has_sector() const noexcept { return has_sector_; }

  std::vector<std::string> country_codes() const {
    std::set<std::string> seen;
    for (const auto& r : rows_) {
      seen.insert(r.origin);
      seen.insert(r.dest);
    }
    return {seen.begin(), seen.end()};
  }

  bool operator==(const DyadPanel& other) const {
    return has_sector_ == other.has_sector_ && rows_ == other.rows_;
  }

 private:
  void validate(const std::vector<std::size_t>& lines) {
    auto where = [&](std::size_t k) {
      return k < lines.size() ? "line " + std::to_string(lines[k]) : "row " + std::to_string(k + 1);
    };
    using Key = std::tuple<std::string, std::string, std::string>;
    std::map<Key, std::size_t> seen;
    std::map<std::pair<std::string, std::string>, std::size_t> first_of_pair;
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      auto& r = rows_[k];
      r.origin = normalize_code(r.origin);
      r.dest = normalize_code(r.dest);
      r.sector = trim(r.sector);
      if (r.origin.empty() || r.dest.empty()) fail(ErrorKind::ParseError, where(k) + ": empty country code");
      if (r.origin == r.dest) fail(ErrorKind::SelfPair, where(k) + ": self-pair " + r.origin);
      for (auto [name, v] : {std::pair{"trade", r.trade}, {"cc", r.cc}, {"gdp_o", r.gdp_o}, {"gdp_d", r.gdp_d},
                             {"pop_o", r.pop_o}, {"pop_d", r.pop_d}}) {
        if (!std::isfinite(v) || v < 0.0) {
          fail(ErrorKind::NegativeValue, where(k) + ": " + name + " must be nonnegative for " + r.origin + "->" + r.dest);
        }
      }
      if (!std::isfinite(r.dist) || r.dist <= 0.0) {
        fail(ErrorKind::NegativeValue, where(k) + ": dist must be positive for " + r.origin + "->" + r.dest);
      }
      if (!seen.emplace(Key{r.origin, r.dest, r.sector}, k).second) {
        fail(ErrorKind::DuplicateDyad, where(k) + ": duplicate dyad " + r.origin + "->" + r.dest +
                                           (r.sector.empty() ? "" : " sector " + r.sector));
      }
      auto [it, inserted] = first_of_pair.emplace(std::pair{r.origin, r.dest}, k);
      if (!inserted && rows_[it->second].cc != r.cc) {
        fail(ErrorKind::InconsistentControl, where(k) + ": cc differs across sector rows of " + r.origin + "->" + r.dest);
      }
    }
    // Symmetric covariates must agree for (i,j) and (j,i).
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto& r = rows_[k];
      auto rev = first_of_pair.find({r.dest, r.origin});
      if (rev == first_of_pair.end()) continue;
      const auto& s = rows_[rev->second];
      const char* bad = nullptr;
      if (r.dist != s.dist) bad = "dist";
      else if (r.contig != s.contig) bad = "contig";
      else if (r.colony != s.colony) bad = "colony";
      else if (r.smctry != s.smctry) bad = "smctry";
      else if (r.comlang != s.comlang) bad = "comlang";
      else if (r.rta != s.rta) bad = "rta";
      if (bad) {
        fail(ErrorKind::AsymmetricSymmetricCovariate,
             std::string(bad) + " differs between " + r.origin + "->" + r.dest + " (" + where(k) + ") and " +
                 s.origin + "->" + s.dest + " (" + where(rev->second) + ")");
      }
    }
  }

  std::vector<Dyad> rows_;
  bool has_sector_ = false;
};

namespace detail {

inline std::uint8_t parse_dummy(const std::string& field, const std::string& where, std::string_view col) {
  auto v = parse_double(field);
  if (!v || (*v != 0.0 && *v != 1.0)) {
    fail(ErrorKind::ParseError, where + ": column '" + std::string(col) + "' must be 0 or 1, got '" + field + "'");
  }
  return static_cast<std::uint8_t>(*v);
}

inline double parse_number(const std::string& field, const std::string& where, std::string_view col) {
  auto v = parse_double(field);
  if (!v) fail(ErrorKind::ParseError, where + ": column '" + std::string(col) + "' is not a number: '" + field + "'");
  return *v;
}

}  // namespace detail

inline DyadPanel parse_panel(std::string_view text, const std::string& source, const PanelSchema& schema = {}) {
  auto table = csv::parse(text, source);
  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < table.header.size(); ++c) col[table.header[c]] = c;
  std::array<std::size_t, kPanelColumns.size()> idx{};
  for (std::size_t c = 0; c < kPanelColumns.size(); ++c) {
    auto name = schema.column(kPanelColumns[c]);
    auto it = col.find(name);
    if (it == col.end()) fail(ErrorKind::MissingColumn, source + ": required column '" + name + "' not found");
    idx[c] = it->second;
  }
  std::optional<std::size_t> sector_col;
  if (auto it = col.find(schema.column("sector")); it != col.end()) sector_col = it->second;

  std::vector<Dyad> rows;
  rows.reserve(table.rows.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& f = table.rows[k];
    const std::string where = source + " line " + std::to_string(table.line_numbers[k]);
    auto num = [&](std::size_t c) { return detail::parse_number(f[idx[c]], where, kPanelColumns[c]); };
    auto dummy = [&](std::size_t c) { return detail::parse_dummy(f[idx[c]], where, kPanelColumns[c]); };
    Dyad d;
    d.origin = f[idx[0]];
    d.dest = f[idx[1]];
    d.trade = num(2);
    d.cc = num(3);
    if (d.cc >= 0.0 && d.cc != std::floor(d.cc)) {
      fail(ErrorKind::ParseError, where + ": cc must be an integer link count, got '" + f[idx[3]] + "'");
    }
    d.gdp_o = num(4);
    d.gdp_d = num(5);
    d.pop_o = num(6);
    d.pop_d = num(7);
    d.dist = num(8);
    d.contig = dummy(9);
    d.colony = dummy(10);
    d.smctry = dummy(11);
    d.comlang = dummy(12);
    d.rta = dummy(13);
    d.asean_china_o = dummy(14);
    if (sector_col) d.sector = f[*sector_col];
    rows.push_back(std::move(d));
  }
  try {
    return DyadPanel(std::move(rows), sector_col.has_value(), table.line_numbers);
  } catch (const Error& e) {
    throw Error(e.kind(), source + ": " + std::string(e.what()).substr(to_string(e.kind()).size() + 2));
  }
}

inline DyadPanel load_panel(const std::string& path, const PanelSchema& schema = {}) {
  auto text = csv::read_file(path);
  if (trim(text).empty()) fail(ErrorKind::EmptyInput, "file '" + path + "' is empty");
  return parse_panel(text, path, schema);
}

inline std::string panel_to_csv(const DyadPanel& panel) {
  std::string out;
  std::vector<std::string> header(kPanelColumns.begin(), kPanelColumns.end());
  if (panel.has_sector()) header.emplace_back("sector");
  out += csv::join(header) + "\n";
  auto dummy = [](std::uint8_t v) { return std::string(v ? "1" : "0"); };
  for (const auto& r : panel.rows()) {
    std::vector<std::string> f = {r.origin,
                                  r.dest,
                                  format_roundtrip(r.trade),
                                  format_roundtrip(r.cc),
                                  format_roundtrip(r.gdp_o),
                                  format_roundtrip(r.gdp_d),
                                  format_roundtrip(r.pop_o),
                                  format_roundtrip(r.pop_d),
                                  format_roundtrip(r.dist),
                                  dummy(r.contig),
                                  dummy(r.colony),
                                  dummy(r.smctry),
                                  dummy(r.comlang),
                                  dummy(r.rta),
                                  dummy(r.asean_china_o)};
    if (panel.has_sector()) f.push_back(r.sector);
    out += csv::join(f) + "\n";
  }
  return out;
}

inline void write_panel(const DyadPanel& panel, const std::string& path) { csv::write_file(path, panel_to_csv(panel)); }

// ---------------------------------------------------------------------------
// Networks

struct Networks {
  WeightedDigraph trade;    // T
  WeightedDigraph control;  // C
};

/// T sums trade over sector rows of a dyad; C takes the dyad's link count.
/// The registry is the sorted union of all codes in the panel.
inline Networks build_networks(const DyadPanel& panel) {
  if (panel.empty()) fail(ErrorKind::EmptyInput, "panel has no rows");
  auto registry = std::make_shared<const CountryRegistry>(CountryRegistry::sorted(panel.country_codes()));
  const auto n = static_cast<Eigen::Index>(registry->size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (const auto& r : panel.rows()) {
    const auto i = static_cast<Eigen::Index>(registry->index(r.origin));
    const auto j = static_cast<Eigen::Index>(registry->index(r.dest));
    t(i, j) += r.trade;
    c(i, j) = r.cc;
  }
  return {WeightedDigraph(registry, std::move(t)), WeightedDigraph(registry, std::move(c))};
}

// ---------------------------------------------------------------------------
// Top-edge classification

enum class EdgeKind { TradeOnly, ControlOnly, Both };

constexpr std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::TradeOnly: return "trade_only";
    case EdgeKind::ControlOnly: return "control_only";
    case EdgeKind::Both: return "both";
  }
  return "";
}

struct EdgeClass {
  std::string origin;
  std::string dest;
  EdgeKind kind;
  double trade_weight;
  double control_weight;
};

namespace detail {

/// Top ceil(q*m) positive edges by (weight desc, origin code asc, dest code asc).
inline std::set<std::pair<std::size_t, std::size_t>> top_edges(const WeightedDigraph& g, double q) {
  struct E {
    double w;
    std::size_t i, j;
  };
  std::vector<E> edges;
  const auto& reg = g.registry();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.has_edge(i, j)) edges.push_back({g(i, j), i, j});
  const auto keep = static_cast<std::size_t>(std::ceil(q * static_cast<double>(edges.size()) - 1e-12));
  auto cmp = [&](const E& a, const E& b) {
    if (a.w != b.w) return a.w > b.w;
    if (reg.code(a.i) != reg.code(b.i)) return reg.code(a.i) < reg.code(b.i);
    return reg.code(a.j) < reg.code(b.j);
  };
  std::sort(edges.begin(), edges.end(), cmp);
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 0; k < std::min(keep, edges.size()); ++k) out.emplace(edges[k].i, edges[k].j);
  return out;
}

}  // namespace detail

/// Union of the top-q directed edges of T and of C, ordered by (origin, dest).
inline std::vector<EdgeClass> classify_top_edges(const WeightedDigraph& trade, const WeightedDigraph& control,
                                                 double q) {
  if (!(q > 0.0 && q <= 1.0)) fail(ErrorKind::InvalidArgument, "top fraction q must lie in (0,1]");
  if (!trade.same_registry(control)) fail(ErrorKind::RegistryMismatch, "trade and control graphs differ in registry");
  if (trade.edge_count() + control.edge_count() == 0) fail(ErrorKind::EmptyGraph, "both graphs have no edges");
  const auto top_t = detail::top_edges(trade, q);
  const auto top_c = detail::top_edges(control, q);
  std::set<std::pair<std::size_t, std::size_t>> all = top_t;
  all.insert(top_c.begin(), top_c.end());
  const auto& reg = trade.registry();
  std::vector<EdgeClass> out;
  out.reserve(all.size());
  for (auto [i, j] : all) {
    const bool in_t = top_t.count({i, j}) > 0;
    const bool in_c = top_c.count({i, j}) > 0;
    const EdgeKind kind = in_t && in_c ? EdgeKind::Both : (in_t ? EdgeKind::TradeOnly : EdgeKind::ControlOnly);
    out.push_back({reg.code(i), reg.code(j), kind, trade(i, j), control(i, j)});
  }
  std::sort(out.begin(), out.end(), [](const EdgeClass& a, const EdgeClass& b) {
    return std::tie(a.origin, a.dest) < std::tie(b.origin, b.dest);
  });
  return out;
}

inline std::string edges_to_csv(const std::vector<EdgeClass>& edges) {
  std::string out = "origin,dest,class,trade_weight,control_weight\n";
  for (const auto& e : edges) {
    out += csv::join({e.origin, e.dest, std::string(to_string(e.kind)), format_roundtrip(e.trade_weight),
                      format_roundtrip(e.control_weight)}) +
           "\n";
  }
  return out;
}

}  // namespace fdinet
