#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "fdinet/core/csv.hpp"
#include "fdinet/econ/model_spec.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using fdinet::csv::read_file;
using fdinet::csv::write_file;

namespace {

struct Run {
  int code = -1;
  std::string err;
};

/// Runs the CLI with `args`, capturing stderr into `dir`/stderr.txt.
Run run_cli(const fs::path& dir, const std::string& args) {
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + FDINET_CLI_PATH + "\" " + args + " 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = fs::exists(err) ? read_file(err.string()) : "";
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Three countries: A controls C directly with 1 link and through B with 4+4.
const char* kThreeNode =
    "origin,dest,trade,cc,gdp_o,gdp_d,pop_o,pop_d,dist,contig,colony,smctry,comlang,rta,asean_china_o\n"
    "A,B,10,4,1,1,1,1,100,0,0,0,0,0,0\n"
    "A,C,10,1,1,1,1,1,100,0,0,0,0,0,0\n"
    "B,A,10,0,1,1,1,1,100,0,0,0,0,0,0\n"
    "B,C,10,4,1,1,1,1,100,0,0,0,0,0,0\n"
    "C,A,10,0,1,1,1,1,100,0,0,0,0,0,0\n"
    "C,B,10,0,1,1,1,1,100,0,0,0,0,0,0\n";

fs::path synth_panel(const fs::path& dir, const std::string& config) {
  const auto cfg = dir / "dgp.cfg";
  write_file(cfg.string(), config);
  const auto panel = dir / "panel.csv";
  EXPECT_EQ(run_cli(dir, "synth --config " + q(cfg) + " --out " + q(panel)).code, 0);
  return panel;
}

}  // namespace

TEST(Cli, MeasuresThreeNodeFixture) {
  const auto dir = fdinet::testing::scratch_dir("cli_measures");
  write_file((dir / "dyads.csv").string(), kThreeNode);
  ASSERT_EQ(run_cli(dir, "measures --input " + q(dir / "dyads.csv") + " --out " + q(dir / "m.csv")).code, 0);
  const auto text = read_file((dir / "m.csv").string());
  EXPECT_EQ(text.substr(0, text.find('\n')), "origin,dest,spl,spl_inv,cmb,diff,diff_inv");
  // A->C: direct 1/1 = 1, via B 1/4 + 1/4 = 0.5.
  EXPECT_NE(text.find("\nA,C,0.5,"), std::string::npos);
  EXPECT_NE(text.find("\nA,B,0.25,"), std::string::npos);
}

TEST(Cli, AlphaChangesLengths) {
  const auto dir = fdinet::testing::scratch_dir("cli_alpha");
  write_file((dir / "dyads.csv").string(), kThreeNode);
  ASSERT_EQ(run_cli(dir, "measures --alpha 0.5 --input " + q(dir / "dyads.csv") + " --out " + q(dir / "m.csv")).code, 0);
  const auto text = read_file((dir / "m.csv").string());
  // 4^-0.5 = 0.5 per hop, so the route through B ties the direct edge at 1.
  EXPECT_NE(text.find("\nA,B,0.5,"), std::string::npos);
  EXPECT_NE(text.find("\nA,C,1,"), std::string::npos);
}

TEST(Cli, EmptyFileExitsTwoNamingFile) {
  const auto dir = fdinet::testing::scratch_dir("cli_empty");
  const auto path = dir / "empty.csv";
  write_file(path.string(), "");
  const auto r = run_cli(dir, "measures --input " + q(path));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("empty.csv"), std::string::npos) << r.err;
}

TEST(Cli, MissingFileExitsTwo) {
  const auto dir = fdinet::testing::scratch_dir("cli_missing");
  EXPECT_EQ(run_cli(dir, "measures --input " + q(dir / "nope.csv")).code, 2);
}

TEST(Cli, UnknownFlagExitsTwo) {
  const auto dir = fdinet::testing::scratch_dir("cli_flag");
  EXPECT_EQ(run_cli(dir, "measures --bogus").code, 2);
  EXPECT_EQ(run_cli(dir, "--version > /dev/null").code, 0);
}

TEST(Cli, DiffAtHalfAlphaIsRejectedInFit) {
  const auto dir = fdinet::testing::scratch_dir("cli_diff");
  const auto panel = synth_panel(dir, "n_countries = 12\n");
  write_file((dir / "diff.spec").string(), "estimator = ols\nregressors = ln_diff, ln_dist\n");
  const auto r = run_cli(dir, "fit --alpha 0.5 --input " + q(panel) + " --spec " + q(dir / "diff.spec") + " > /dev/null");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("AlphaNotOne"), std::string::npos) << r.err;
}

TEST(Cli, HeckmanTableHasLambdaRow) {
  const auto dir = fdinet::testing::scratch_dir("cli_heckman");
  const auto panel = synth_panel(dir, "n_countries = 40\nrho = 0.5\nseed = 3\n");
  write_file((dir / "h.spec").string(),
             "estimator = heckman2s\nregressors = ln_cc, ln_spl, ln_gdp_o, ln_gdp_d, ln_pop_o, ln_pop_d, ln_dist\n"
             "selection = ln_dist, rta\n");
  const auto table = dir / "table.txt";
  const auto out = dir / "coef.csv";
  ASSERT_EQ(run_cli(dir, "fit --input " + q(panel) + " --spec " + q(dir / "h.spec") + " --out " + q(out) +
                             " --table " + q(table))
                .code,
            0);
  const auto text = read_file(table.string());
  EXPECT_NE(text.find("lambda"), std::string::npos) << text;
  EXPECT_NE(text.find("ln_spl"), std::string::npos);
  EXPECT_NE(read_file(out.string()).find("lambda"), std::string::npos);
}

TEST(Cli, FitSeveralSpecsIntoOneTable) {
  const auto dir = fdinet::testing::scratch_dir("cli_multi");
  const auto panel = synth_panel(dir, "n_countries = 30\n");
  write_file((dir / "a.spec").string(), "estimator = ols\nregressors = ln_dist\n");
  write_file((dir / "b.spec").string(), "estimator = ppml\nregressors = ln_dist, ln_gdp_o\n");
  ASSERT_EQ(run_cli(dir, "fit --input " + q(panel) + " --spec " + q(dir / "a.spec") + " --spec " + q(dir / "b.spec") +
                             " --out " + q(dir / "c.csv") + " --table " + q(dir / "t.txt"))
                .code,
            0);
  const auto csv = read_file((dir / "c.csv").string());
  EXPECT_NE(csv.find("# (1) a"), std::string::npos);
  EXPECT_NE(csv.find("# (2) b"), std::string::npos);
  const auto table = read_file((dir / "t.txt").string());
  EXPECT_NE(table.find("(1)"), std::string::npos);
  EXPECT_NE(table.find("(2)"), std::string::npos);
}

TEST(Cli, SynthWritesLoadablePanelAndTruth) {
  const auto dir = fdinet::testing::scratch_dir("cli_synth");
  const auto panel = dir / "p.csv";
  const auto truth = dir / "t.csv";
  ASSERT_EQ(run_cli(dir, "synth --seed 5 --out " + q(panel) + " --truth " + q(truth)).code, 0);
  EXPECT_EQ(read_file(truth.string()).substr(0, 16), "record,name,a,b\n");
  ASSERT_EQ(run_cli(dir, "measures --input " + q(panel) + " --out " + q(dir / "m.csv")).code, 0);
}

TEST(Cli, SynthRejectsBadConfig) {
  const auto dir = fdinet::testing::scratch_dir("cli_badcfg");
  write_file((dir / "bad.cfg").string(), "n_countries = 2\n");
  const auto r = run_cli(dir, "synth --config " + q(dir / "bad.cfg") + " --out " + q(dir / "p.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ConfigInvalid"), std::string::npos) << r.err;
}

TEST(Cli, ReportWritesAllTables) {
  const auto dir = fdinet::testing::scratch_dir("cli_report");
  const auto panel = synth_panel(dir, "n_countries = 20\n");
  const auto out = dir / "report";
  ASSERT_EQ(run_cli(dir, "report --input " + q(panel) + " --out " + q(out) + " --top-q 0.1").code, 0);
  for (const char* f : {"summary.csv", "summary.txt", "correlations.csv", "correlations.txt", "edges.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_NE(read_file((out / "summary.csv").string()).find("trade"), std::string::npos);
}

TEST(Cli, ManifestRecordsRun) {
  const auto dir = fdinet::testing::scratch_dir("cli_manifest");
  write_file((dir / "dyads.csv").string(), kThreeNode);
  const std::string args = "measures --input " + q(dir / "dyads.csv") + " --out " + q(dir / "m.csv") + " --manifest ";
  ASSERT_EQ(run_cli(dir, args + q(dir / "a.json")).code, 0);
  ASSERT_EQ(run_cli(dir, args + q(dir / "b.json")).code, 0);
  const auto a = read_file((dir / "a.json").string());
  EXPECT_NE(a.find("\"config_hash\""), std::string::npos);
  EXPECT_EQ(a, read_file((dir / "b.json").string()));
}

TEST(Cli, OutputsAreDeterministic) {
  const auto dir = fdinet::testing::scratch_dir("cli_determinism");
  for (const char* tag : {"1", "2"}) {
    const auto panel = dir / (std::string("p") + tag + ".csv");
    ASSERT_EQ(run_cli(dir, "synth --seed 11 --out " + q(panel)).code, 0);
    ASSERT_EQ(run_cli(dir, "measures --input " + q(panel) + " --out " + q(dir / (std::string("m") + tag + ".csv"))).code, 0);
  }
  EXPECT_EQ(read_file((dir / "p1.csv").string()), read_file((dir / "p2.csv").string()));
  EXPECT_EQ(read_file((dir / "m1.csv").string()), read_file((dir / "m2.csv").string()));
}

TEST(Specs, EveryShippedSpecParses) {
  int count = 0;
  for (const auto& e : fs::directory_iterator(fs::path(FDINET_SOURCE_DIR) / "specs")) {
    if (e.path().extension() != ".spec") continue;
    EXPECT_NO_THROW(fdinet::econ::load_model_spec(e.path().string())) << e.path();
    ++count;
  }
  EXPECT_GT(count, 20);
}

TEST(Specs, BaselineColumnsRunOnSyntheticPanel) {
  const auto dir = fdinet::testing::scratch_dir("cli_specs");
  const auto panel = synth_panel(dir, "n_countries = 30\nconduit_fraction = 0.5\n");
  const auto specs = fs::path(FDINET_SOURCE_DIR) / "specs";
  std::string args = "fit --input " + q(panel) + " --table " + q(dir / "t.txt");
  for (const char* s : {"table3_baseline3.spec", "table5_dist.spec", "tableA1_diff_inv.spec", "tableA2_reduced.spec",
                        "tableA2_sem.spec", "tableA5_cmb.spec", "tableA6_ppml3.spec"})
    args += " --spec " + q(specs / s);
  const auto r = run_cli(dir, args);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(read_file((dir / "t.txt").string()).find("ln_spl"), std::string::npos);
}
