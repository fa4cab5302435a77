#pragma once

// Subcommand implementations behind the fdinet executable. Each command
// takes parsed options, writes its files and returns an exit code; the
// entry point only parses flags and maps exceptions to exit codes.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fdinet/core/csv.hpp"
#include "fdinet/core/error.hpp"
#include "fdinet/core/format.hpp"
#include "fdinet/econ/heckman.hpp"
#include "fdinet/econ/ols.hpp"
#include "fdinet/econ/ppml.hpp"
#include "fdinet/econ/probit.hpp"
#include "fdinet/econ/report.hpp"
#include "fdinet/econ/sem.hpp"
#include "fdinet/econ/stats.hpp"
#include "fdinet/econ/zippml.hpp"
#include "fdinet/measures.hpp"
#include "fdinet/netcore.hpp"
#include "fdinet/synth/generate.hpp"

namespace fdinet::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct Options {
  std::string input;
  std::vector<std::string> specs;
  std::string out;
  std::string table;     // fit: human table path (stdout when empty)
  std::string config;    // synth
  std::string truth;     // synth
  std::string manifest;  // optional run manifest (JSON)
  double alpha = 1.0;
  double cmb_scale = 1.0;
  std::string cmb_method = "spectral";
  double top_q = 0.025;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::vector<std::string> variables;  // report: summary/correlation variables
};

inline const std::vector<std::string> kDefaultReportVariables = {"trade", "cc",    "spl",   "cmb",  "gdp_o",
                                                                 "pop_o", "dist", "contig", "comlang"};

// ---------------------------------------------------------------------------
// Run manifest

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) s[static_cast<std::size_t>(k)] = digits[v & 0xf];
  return s;
}

/// Records inputs, options and outputs of a run. The hash covers the
/// content of every input file together with the options that affect output.
inline void write_manifest(const std::string& command, const Options& o, const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs) {
  if (o.manifest.empty()) return;
  std::uint64_t h = fnv1a(command);
  for (const auto& path : inputs) {
    h = fnv1a(path, h);
    h = fnv1a(csv::read_file(path), h);
  }
  nlohmann::ordered_json options = {{"alpha", o.alpha},
                                    {"cmb_scale", o.cmb_scale},
                                    {"cmb_method", o.cmb_method},
                                    {"top_q", o.top_q},
                                    {"deterministic", o.deterministic}};
  if (o.seed) options["seed"] = *o.seed;
  if (!o.variables.empty()) options["variables"] = o.variables;
  h = fnv1a(options.dump(), h);
  nlohmann::ordered_json m = {{"tool", "fdinet"},
                              {"version", kToolVersion},
                              {"command", command},
                              {"inputs", inputs},
                              {"options", options},
                              {"outputs", outputs},
                              {"config_hash", hex64(h)}};
  csv::write_file(o.manifest, m.dump(2) + "\n");
}

namespace detail {

inline void emit(const std::string& path, const std::string& text) {
  if (path.empty()) std::cout << text;
  else csv::write_file(path, text);
}

inline MeasureOptions measure_options(const Options& o) {
  MeasureOptions m;
  m.alpha = o.alpha;
  m.cmb_scale = o.cmb_scale;
  m.cmb_method = parse_cmb_method(o.cmb_method);
  return m;
}

inline void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) fail(ErrorKind::InvalidArgument, std::string(command) + " requires " + flag);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

inline int cmd_measures(const Options& o) {
  detail::require(o.input, "--input", "measures");
  const auto panel = load_panel(o.input);
  const auto nets = build_networks(panel);
  const auto table = measure_table(nets.control, detail::measure_options(o));
  detail::emit(o.out, measures_to_csv(table));
  write_manifest("measures", o, {o.input}, {o.out});
  return 0;
}

/// Estimates one spec on a panel with precomputed measures.
inline econ::FitResult run_spec(const DyadPanel& panel, const MeasureTable& measures, const econ::ModelSpec& spec) {
  using econ::Estimator;
  if (spec.is_system()) {
    const auto system = econ::EquationSystem::from_spec(spec);
    if (spec.estimator == Estimator::ThreeSls) return econ::three_sls(system, panel, &measures, spec);
    return econ::reduced_form(system, panel, &measures, spec);
  }
  const auto dm = econ::build_design(panel, &measures, spec);
  switch (spec.estimator) {
    case Estimator::Ols: return econ::ols(dm);
    case Estimator::Probit: return econ::probit_mle(dm.y, dm.X, dm.names);
    case Estimator::Heckman2s: return econ::heckman_two_step(dm);
    case Estimator::Ppml: return econ::ppml(dm);
    case Estimator::Zippml: return econ::zippml(dm);
    default: break;
  }
  fail(ErrorKind::InvalidSpec, "estimator " + std::string(to_string(spec.estimator)) + " cannot be run from a spec");
}

inline int cmd_fit(const Options& o) {
  detail::require(o.input, "--input", "fit");
  if (o.specs.empty()) fail(ErrorKind::InvalidArgument, "fit requires at least one --spec");
  const auto panel = load_panel(o.input);
  const auto measures = measure_table(build_networks(panel).control, detail::measure_options(o));
  std::vector<econ::FitResult> fits;
  std::vector<std::string> headers;
  std::string machine;
  for (std::size_t k = 0; k < o.specs.size(); ++k) {
    const auto spec = econ::load_model_spec(o.specs[k]);
    fits.push_back(run_spec(panel, measures, spec));
    headers.push_back("(" + std::to_string(k + 1) + ") " + std::filesystem::path(o.specs[k]).stem().string());
    if (o.specs.size() == 1) {
      machine = econ::fit_to_csv(fits.back());
    } else {
      // One block per model, separated by a `# model` line.
      machine += "# " + headers.back() + "\n" + econ::fit_to_csv(fits.back());
    }
    for (const auto& w : fits.back().warnings) std::cerr << "warning: " << o.specs[k] << ": " << w << "\n";
  }
  if (!o.out.empty()) csv::write_file(o.out, machine);
  detail::emit(o.table, econ::fits_to_table(fits, headers));
  std::vector<std::string> inputs = {o.input};
  inputs.insert(inputs.end(), o.specs.begin(), o.specs.end());
  write_manifest("fit", o, inputs, {o.out, o.table});
  return 0;
}

inline int cmd_synth(const Options& o) {
  detail::require(o.out, "--out", "synth");
  synth::DGPConfig cfg;
  if (!o.config.empty()) cfg = synth::parse_dgp_config(csv::read_file(o.config), o.config);
  if (o.seed) cfg.seed = *o.seed;
  const auto data = synth::generate(cfg);
  write_panel(data.panel, o.out);
  if (!o.truth.empty()) csv::write_file(o.truth, synth::truth_to_csv(data.truth));
  write_manifest("synth", o, o.config.empty() ? std::vector<std::string>{} : std::vector<std::string>{o.config},
                 {o.out, o.truth});
  return 0;
}

/// Writes summary.csv, correlations.csv, edges.csv (and the two text tables)
/// into the --out directory.
inline int cmd_report(const Options& o) {
  detail::require(o.input, "--input", "report");
  detail::require(o.out, "--out", "report");
  const auto panel = load_panel(o.input);
  const auto nets = build_networks(panel);
  const auto measures = measure_table(nets.control, detail::measure_options(o));
  econ::VariableResolver data(panel, &measures);
  const auto& vars = o.variables.empty() ? kDefaultReportVariables : o.variables;
  const auto summary = econ::summarize(data, vars);
  const auto corr = econ::correlations(data, vars);
  const auto edges = classify_top_edges(nets.trade, nets.control, o.top_q);

  const std::filesystem::path dir(o.out);
  std::filesystem::create_directories(dir);
  const std::vector<std::string> outputs = {(dir / "summary.csv").string(),      (dir / "summary.txt").string(),
                                            (dir / "correlations.csv").string(), (dir / "correlations.txt").string(),
                                            (dir / "edges.csv").string()};
  csv::write_file(outputs[0], econ::summary_to_csv(summary));
  csv::write_file(outputs[1], econ::summary_to_table(summary));
  csv::write_file(outputs[2], econ::correlations_to_csv(corr));
  csv::write_file(outputs[3], econ::correlations_to_table(corr));
  csv::write_file(outputs[4], edges_to_csv(edges));
  write_manifest("report", o, {o.input}, outputs);
  return 0;
}

/// Runs `command` and maps failures onto the exit-code contract: 2 for
/// input and estimation errors, 1 for anything unexpected.
inline int run_command(const std::string& command, const Options& o) {
  try {
    if (command == "measures") return cmd_measures(o);
    if (command == "fit") return cmd_fit(o);
    if (command == "synth") return cmd_synth(o);
    if (command == "report") return cmd_report(o);
    std::cerr << "error: unknown command '" << command << "'\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fdinet::cli
