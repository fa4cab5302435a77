// fdinet: network measures of indirect control and gravity estimation.

#include <CLI11.hpp>

#include <iostream>

#include "fdinet/cli/commands.hpp"

int main(int argc, char** argv) {
  using fdinet::cli::Options;
  Options o;
  std::uint64_t seed = 0;

  CLI::App app{"Indirect-control network measures and gravity regressions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fdinet::cli::kToolVersion);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "dyad panel CSV");
    sub->add_option("--out", o.out, "output path");
    sub->add_option("--alpha", o.alpha, "control tie-strength exponent")->capture_default_str();
    sub->add_option("--cmb-scale", o.cmb_scale, "communicability multiplier")->capture_default_str();
    sub->add_option("--cmb-method", o.cmb_method, "spectral or series")
        ->check(CLI::IsMember({"spectral", "series"}))
        ->capture_default_str();
    sub->add_option("--top-q", o.top_q, "share of strongest edges to classify")->capture_default_str();
    sub->add_option("--seed", seed, "random seed (synth)");
    sub->add_flag("--deterministic", o.deterministic, "accepted for harnesses; all output is deterministic");
    sub->add_option("--manifest", o.manifest, "write a JSON run manifest");
  };

  auto* measures = app.add_subcommand("measures", "per-pair spl, spl_inv, cmb, diff, diff_inv");
  common(measures);
  auto* fit = app.add_subcommand("fit", "estimate one or more model specs");
  common(fit);
  fit->add_option("--spec", o.specs, "model-spec file (repeat for table columns)");
  fit->add_option("--table", o.table, "human-readable table path (default stdout)");
  auto* synth = app.add_subcommand("synth", "generate a synthetic panel");
  common(synth);
  synth->add_option("--config", o.config, "DGP config file");
  synth->add_option("--truth", o.truth, "ground-truth CSV path");
  auto* report = app.add_subcommand("report", "summary, correlation and edge-class tables");
  common(report);
  report->add_option("--vars", o.variables, "variables for summary and correlations")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (auto* sub : {measures, fit, synth, report}) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) o.seed = seed;
    return fdinet::cli::run_command(sub->get_name(), o);
  }
  return 2;
}
