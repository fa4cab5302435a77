#pragma once

// Seeded synthetic gravity panels with a planted corporate-control network.
//
// Countries get log-normal GDP per capita and population and uniform points
// on a sphere (great-circle distances). The control network has a random
// base layer; a share of non-hub pairs is then routed through hub countries
// (strong origin->hub and hub->dest links, weak or absent direct link), which
// makes the indirect path shorter than the direct one. Trade follows a
// log-linear gravity equation with a probit-style selection rule and
// correlated errors, or a Poisson count model.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "fdinet/core/csv.hpp"
#include "fdinet/core/error.hpp"
#include "fdinet/core/format.hpp"
#include "fdinet/core/keyvalue.hpp"
#include "fdinet/econ/design.hpp"
#include "fdinet/measures.hpp"
#include "fdinet/netcore.hpp"
#include "fdinet/synth/rng.hpp"

namespace fdinet::synth {

enum class OutcomeModel { LogNormalSelection, Poisson };

struct DGPConfig {
  std::size_t n_countries = 60;
  std::uint64_t seed = 1;
  OutcomeModel outcome = OutcomeModel::LogNormalSelection;
  // Outcome equation coefficients, keyed by model term (see econ/design.hpp).
  std::map<std::string, double> beta = {
      {"cons", -13.667},  {"ln_cc", 0.103},    {"ln_spl", -0.203}, {"ln_gdp_o", 0.924}, {"ln_gdp_d", 0.809},
      {"ln_pop_o", 1.047}, {"ln_pop_d", 0.861}, {"ln_dist", -1.543}, {"contig", 0.399},  {"colony", 0.568},
      {"smctry", 0.816},  {"comlang", 0.782}};
  // Selection equation coefficients; rta enters selection only, which
  // identifies the two-step correction beyond the probit's curvature.
  std::map<std::string, double> gamma = {{"cons", 3.479}, {"ln_dist", -0.384}, {"rta", 1.0}};
  double rho = 0.0;
  double sigma = 1.0;
  double zero_inflation = 0.0;  // Poisson model: share of structural zeros
  // Control network
  double cc_density = 0.9;
  double cc_log_mean = 1.6;  // log of a typical link count
  double cc_dispersion = 0.2;
  double conduit_fraction = 0.0;
  double conduit_strength = 20.0;  // hub links are this many times a typical count
  double hub_share = 0.05;
  // Covariates
  double rta_probability = 0.2;
  double comlang_probability = 0.15;
  double colony_probability = 0.02;
  double smctry_probability = 0.01;
  double contig_km = 1000.0;

  void validate() const {
    auto bad = [](const std::string& m) { fail(ErrorKind::ConfigInvalid, m); };
    if (n_countries < 3) bad("n_countries must be at least 3");
    if (!(sigma > 0.0)) bad("sigma must be positive");
    if (!(rho > -1.0 && rho < 1.0)) bad("rho must lie in (-1, 1)");
    if (!(cc_density > 0.0 && cc_density <= 1.0)) bad("cc_density must lie in (0, 1]");
    if (!(cc_dispersion >= 0.0)) bad("cc_dispersion must be nonnegative");
    if (!(conduit_fraction >= 0.0 && conduit_fraction < 1.0)) bad("conduit_fraction must lie in [0, 1)");
    if (!(conduit_strength > 0.0)) bad("conduit_strength must be positive");
    if (!(hub_share > 0.0 && hub_share < 1.0)) bad("hub_share must lie in (0, 1)");
    if (!(zero_inflation >= 0.0 && zero_inflation < 1.0)) bad("zero_inflation must lie in [0, 1)");
    for (double p : {rta_probability, comlang_probability, colony_probability, smctry_probability})
      if (!(p >= 0.0 && p <= 1.0)) bad("covariate probabilities must lie in [0, 1]");
    if (!(contig_km >= 0.0)) bad("contig_km must be nonnegative");
  }
};

struct LatentDraw {
  std::string origin;
  std::string dest;
  double eps = 0.0;  // outcome error (before sigma)
  double u = 0.0;    // selection error
};

struct GroundTruth {
  std::map<std::string, double> beta;
  std::map<std::string, double> gamma;
  double rho = 0.0;
  double sigma = 1.0;
  std::vector<std::string> hubs;
  std::vector<LatentDraw> latent;
};

struct SyntheticData {
  DyadPanel panel;
  GroundTruth truth;
};

/// Three-letter codes AAA, AAB, ... in index order.
inline std::string synthetic_code(std::size_t k) {
  std::string s(3, 'A');
  for (int p = 2; p >= 0; --p) {
    s[static_cast<std::size_t>(p)] = static_cast<char>('A' + k % 26);
    k /= 26;
  }
  return s;
}

namespace detail {

inline double great_circle_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusKm = 6371.0;
  const double dlat = lat2 - lat1;
  const double dlon = lon2 - lon1;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

inline double linear_index(const std::map<std::string, double>& coef, const std::map<std::string, econ::Column>& cols,
                           std::size_t row) {
  double v = 0.0;
  for (const auto& [term, c] : coef) {
    if (term == "cons") {
      v += c;
      continue;
    }
    const auto& col = cols.at(term);
    if (!col.missing[row]) v += c * col.values[row];
  }
  return v;
}

}  // namespace detail

/// Planted control matrix (link counts) and the hub indices used for
/// conduit routing.
inline std::pair<Eigen::MatrixXd, std::vector<std::size_t>> plant_control_network(const DGPConfig& cfg,
                                                                                  CounterRng rng) {
  const std::size_t n = cfg.n_countries;
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(ni, ni);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool present = rng.bernoulli(cfg.cc_density);
      const double z = rng.normal();
      if (present) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::max(1.0, std::round(std::exp(cfg.cc_log_mean + cfg.cc_dispersion * z)));
    }
  }
  // Hubs: top-degree ceil(hub_share * n) nodes of the base layer, ties to the lower index.
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::vector<double> degree(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    degree[k] = static_cast<double>((c.row(ki).array() > 0.0).count() + (c.col(ki).array() > 0.0).count());
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
  const auto n_hubs = static_cast<std::size_t>(std::ceil(cfg.hub_share * static_cast<double>(n)));
  std::vector<std::size_t> hubs(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n_hubs, n)));
  std::sort(hubs.begin(), hubs.end());
  std::vector<bool> is_hub(n, false);
  for (auto h : hubs) is_hub[h] = true;

  const double strong = std::round(cfg.conduit_strength * std::exp(cfg.cc_log_mean));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || is_hub[i] || is_hub[j]) continue;
      const bool routed = rng.bernoulli(cfg.conduit_fraction);
      const auto h = hubs[rng.below(hubs.size())];
      const bool keep_weak = rng.bernoulli(0.5);
      if (!routed) continue;
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j), hh = static_cast<Eigen::Index>(h);
      c(ii, hh) = std::max(c(ii, hh), strong);
      c(hh, jj) = std::max(c(hh, jj), strong);
      c(ii, jj) = keep_weak ? 1.0 : 0.0;
    }
  }
  return {c, hubs};
}

inline SyntheticData generate(const DGPConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_countries;
  CounterRng root(cfg.seed);
  CounterRng country_rng = root.substream(1);
  CounterRng pair_rng = root.substream(2);
  CounterRng error_rng = root.substream(4);

  std::vector<std::string> codes(n);
  std::vector<double> gdp(n), pop(n), lat(n), lon(n);
  for (std::size_t k = 0; k < n; ++k) {
    codes[k] = synthetic_code(k);
    gdp[k] = std::exp(std::log(8.0) + 1.0 * country_rng.normal());
    pop[k] = std::exp(std::log(1.0e7) + 1.5 * country_rng.normal());
    lat[k] = std::asin(2.0 * country_rng.uniform() - 1.0);
    lon[k] = 2.0 * std::numbers::pi * country_rng.uniform();
  }
  const auto n_asean = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n)));

  // Symmetric pair covariates on the upper triangle.
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd dist(ni, ni);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> contig(ni, ni), colony(ni, ni), smctry(ni, ni),
      comlang(ni, ni), rta(ni, ni);
  std::vector<double> all_d;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      all_d.push_back(std::max(1.0, detail::great_circle_km(lat[i], lon[i], lat[j], lon[j])));
  std::vector<double> sorted_d = all_d;
  std::sort(sorted_d.begin(), sorted_d.end());
  const double median_d = sorted_d[sorted_d.size() / 2];
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      const double d = all_d[p++];
      dist(a, b) = dist(b, a) = d;
      const bool near = d < median_d;
      const bool is_contig = d < cfg.contig_km;
      const bool is_colony = pair_rng.bernoulli(cfg.colony_probability);
      const bool is_smctry = pair_rng.bernoulli(cfg.smctry_probability);
      const bool is_comlang = pair_rng.bernoulli(cfg.comlang_probability);
      const bool is_rta = pair_rng.bernoulli(std::min(1.0, cfg.rta_probability * (near ? 1.6 : 0.4)));
      contig(a, b) = contig(b, a) = is_contig;
      colony(a, b) = colony(b, a) = is_colony;
      smctry(a, b) = smctry(b, a) = is_smctry;
      comlang(a, b) = comlang(b, a) = is_comlang;
      rta(a, b) = rta(b, a) = is_rta;
    }
  }

  auto [control, hubs] = plant_control_network(cfg, root.substream(3));

  std::vector<Dyad> rows;
  rows.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      Dyad d;
      d.origin = codes[i];
      d.dest = codes[j];
      d.cc = control(a, b);
      d.gdp_o = gdp[i];
      d.gdp_d = gdp[j];
      d.pop_o = pop[i];
      d.pop_d = pop[j];
      d.dist = dist(a, b);
      d.contig = contig(a, b);
      d.colony = colony(a, b);
      d.smctry = smctry(a, b);
      d.comlang = comlang(a, b);
      d.rta = rta(a, b);
      d.asean_china_o = i < n_asean ? 1 : 0;
      rows.push_back(std::move(d));
    }
  }

  // Evaluate the equation terms through the same resolver the estimators use.
  DyadPanel provisional(rows);
  const auto nets = build_networks(provisional);
  const auto measures = measure_table(nets.control, MeasureOptions{});
  econ::VariableResolver data(provisional, &measures);
  std::map<std::string, econ::Column> cols;
  for (const auto* coef : {&cfg.beta, &cfg.gamma})
    for (const auto& [term, value] : *coef)
      if (term != "cons" && !cols.count(term)) cols.emplace(term, data.evaluate(term));

  GroundTruth truth;
  truth.beta = cfg.beta;
  truth.gamma = cfg.gamma;
  truth.rho = cfg.rho;
  truth.sigma = cfg.sigma;
  for (auto h : hubs) truth.hubs.push_back(codes[h]);

  const double rho_c = std::sqrt(1.0 - cfg.rho * cfg.rho);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double z1 = error_rng.normal();
    const double z2 = error_rng.normal();
    const double u = z1;
    const double eps = cfg.rho * z1 + rho_c * z2;
    truth.latent.push_back({rows[r].origin, rows[r].dest, eps, u});
    const double xb = detail::linear_index(cfg.beta, cols, r);
    if (cfg.outcome == OutcomeModel::LogNormalSelection) {
      const double selection = detail::linear_index(cfg.gamma, cols, r) + u;
      rows[r].trade = selection > 0.0 ? std::exp(xb + cfg.sigma * eps) : 0.0;
    } else {
      const bool structural_zero = error_rng.bernoulli(cfg.zero_inflation);
      const double draw = error_rng.poisson(std::exp(xb));
      rows[r].trade = structural_zero ? 0.0 : draw;
    }
  }
  return {DyadPanel(std::move(rows)), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Config and truth files

inline DGPConfig parse_dgp_config(std::string_view text, const std::string& source = "<config>") {
  DGPConfig cfg;
  for (const auto& kv : parse_key_values(text, source)) {
    const auto key = to_lower(kv.key);
    const auto where = source + " line " + std::to_string(kv.line);
    auto num = [&]() {
      auto v = parse_double(kv.value);
      if (!v) fail(ErrorKind::ConfigInvalid, where + ": '" + kv.value + "' is not a number");
      return *v;
    };
    if (key == "n_countries") {
      const double v = num();
      if (v < 0.0 || v != std::floor(v)) fail(ErrorKind::ConfigInvalid, where + ": n_countries must be a whole number");
      cfg.n_countries = static_cast<std::size_t>(v);
    } else if (key == "seed") {
      try {
        cfg.seed = std::stoull(kv.value);
      } catch (...) {
        fail(ErrorKind::ConfigInvalid, where + ": seed must be an unsigned 64-bit integer");
      }
    } else if (key == "outcome") {
      const auto v = to_lower(kv.value);
      if (v == "lognormal") cfg.outcome = OutcomeModel::LogNormalSelection;
      else if (v == "poisson") cfg.outcome = OutcomeModel::Poisson;
      else fail(ErrorKind::ConfigInvalid, where + ": outcome must be 'lognormal' or 'poisson'");
    } else if (key.rfind("beta.", 0) == 0) {
      cfg.beta[key.substr(5)] = num();
    } else if (key.rfind("gamma.", 0) == 0) {
      cfg.gamma[key.substr(6)] = num();
    } else if (key == "beta" || key == "gamma") {
      // `beta = clear` drops the defaults before explicit entries
      if (to_lower(kv.value) != "clear") fail(ErrorKind::ConfigInvalid, where + ": only '" + key + " = clear' is allowed");
      (key == "beta" ? cfg.beta : cfg.gamma).clear();
    } else if (key == "rho") cfg.rho = num();
    else if (key == "sigma") cfg.sigma = num();
    else if (key == "zero_inflation") cfg.zero_inflation = num();
    else if (key == "cc_density") cfg.cc_density = num();
    else if (key == "cc_log_mean") cfg.cc_log_mean = num();
    else if (key == "cc_dispersion") cfg.cc_dispersion = num();
    else if (key == "conduit_fraction") cfg.conduit_fraction = num();
    else if (key == "conduit_strength") cfg.conduit_strength = num();
    else if (key == "hub_share") cfg.hub_share = num();
    else if (key == "rta_probability") cfg.rta_probability = num();
    else if (key == "comlang_probability") cfg.comlang_probability = num();
    else if (key == "colony_probability") cfg.colony_probability = num();
    else if (key == "smctry_probability") cfg.smctry_probability = num();
    else if (key == "contig_km") cfg.contig_km = num();
    else fail(ErrorKind::ConfigInvalid, where + ": unknown key '" + kv.key + "'");
  }
  cfg.validate();
  return cfg;
}

/// record,name,a,b with records param (a = value), hub (name = code) and
/// latent (name = origin>dest, a = eps, b = u).
inline std::string truth_to_csv(const GroundTruth& t) {
  std::string out = "record,name,a,b\n";
  for (const auto& [k, v] : t.beta) out += "param,beta." + k + "," + format_roundtrip(v) + ",\n";
  for (const auto& [k, v] : t.gamma) out += "param,gamma." + k + "," + format_roundtrip(v) + ",\n";
  out += "param,rho," + format_roundtrip(t.rho) + ",\n";
  out += "param,sigma," + format_roundtrip(t.sigma) + ",\n";
  for (const auto& h : t.hubs) out += "hub," + h + ",,\n";
  for (const auto& l : t.latent)
    out += "latent," + l.origin + ">" + l.dest + "," + format_roundtrip(l.eps) + "," + format_roundtrip(l.u) + "\n";
  return out;
}

inline GroundTruth parse_truth(std::string_view text, const std::string& source = "<truth>") {
  auto table = csv::parse(text, source);
  if (table.header != std::vector<std::string>{"record", "name", "a", "b"}) {
    fail(ErrorKind::ParseError, source + ": unexpected truth header");
  }
  GroundTruth t;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& f = table.rows[k];
    const auto where = source + " line " + std::to_string(table.line_numbers[k]);
    auto num = [&](const std::string& s) {
      auto v = parse_double(s);
      if (!v) fail(ErrorKind::ParseError, where + ": bad number '" + s + "'");
      return *v;
    };
    if (f[0] == "param") {
      if (f[1].rfind("beta.", 0) == 0) t.beta[f[1].substr(5)] = num(f[2]);
      else if (f[1].rfind("gamma.", 0) == 0) t.gamma[f[1].substr(6)] = num(f[2]);
      else if (f[1] == "rho") t.rho = num(f[2]);
      else if (f[1] == "sigma") t.sigma = num(f[2]);
      else fail(ErrorKind::ParseError, where + ": unknown parameter '" + f[1] + "'");
    } else if (f[0] == "hub") {
      t.hubs.push_back(f[1]);
    } else if (f[0] == "latent") {
      auto gt = f[1].find('>');
      if (gt == std::string::npos) fail(ErrorKind::ParseError, where + ": latent key must be origin>dest");
      t.latent.push_back({f[1].substr(0, gt), f[1].substr(gt + 1), num(f[2]), num(f[3])});
    } else {
      fail(ErrorKind::ParseError, where + ": unknown record '" + f[0] + "'");
    }
  }
  return t;
}

}  // namespace fdinet::synth
