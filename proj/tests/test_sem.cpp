#include <gtest/gtest.h>

#include "fdinet/econ/model_spec.hpp"
#include "fdinet/econ/ols.hpp"
#include "fdinet/econ/sem.hpp"
#include "fdinet/synth/generate.hpp"
#include "support.hpp"

using namespace fdinet;
using namespace fdinet::econ;

namespace {

using fdinet::testing::simultaneous;

Eigen::VectorXd stacked(const FitResult& f) {
  Eigen::Index k = 0;
  for (const auto& b : f.blocks) k += b.coef.size();
  Eigen::VectorXd v(k);
  k = 0;
  for (const auto& b : f.blocks) {
    v.segment(k, b.coef.size()) = b.coef;
    k += b.coef.size();
  }
  return v;
}

}  // namespace

TEST(ThreeSls, IdentitySigmaEqualsTwoSls) {
  const auto sd = simultaneous(1);
  ThreeSlsOptions opt;
  opt.identity_sigma = true;
  EXPECT_LE((stacked(three_sls(sd, opt)) - stacked(two_sls(sd))).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ThreeSls, MatchesKroneckerGlsFormula) {
  const auto sd = simultaneous(2);
  const auto fit = three_sls(sd);
  // Textbook form: beta = [Xh' (S^-1 kron I) Xh]^-1 Xh' (S^-1 kron I) y with
  // Xh block-diagonal of projected regressors and S from 2SLS residuals.
  const auto n = sd.rows();
  const Eigen::MatrixXd pw = sd.W * (sd.W.transpose() * sd.W).inverse() * sd.W.transpose();
  Eigen::MatrixXd xh = Eigen::MatrixXd::Zero(2 * n, 8);
  xh.block(0, 0, n, 4) = pw * sd.X[0];
  xh.block(n, 4, n, 4) = pw * sd.X[1];
  Eigen::VectorXd y(2 * n);
  y << sd.y[0], sd.y[1];
  Eigen::MatrixXd e(n, 2);
  for (int m = 0; m < 2; ++m) {
    const Eigen::MatrixXd xm = pw * sd.X[static_cast<std::size_t>(m)];
    const Eigen::VectorXd b = (xm.transpose() * xm).inverse() * xm.transpose() * sd.y[static_cast<std::size_t>(m)];
    e.col(m) = sd.y[static_cast<std::size_t>(m)] - sd.X[static_cast<std::size_t>(m)] * b;
  }
  const Eigen::Matrix2d s = e.transpose() * e / static_cast<double>(n);
  const Eigen::Matrix2d s_inv = s.inverse();
  Eigen::MatrixXd omega_inv = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      omega_inv.block(r * n, c * n, n, n).diagonal().setConstant(s_inv(r, c));
  const Eigen::MatrixXd a = xh.transpose() * omega_inv * xh;
  const Eigen::VectorXd beta = a.inverse() * xh.transpose() * omega_inv * y;
  EXPECT_LE((stacked(fit) - beta).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((fit.system_cov - a.inverse()).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((fit.sigma - s).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ThreeSls, RecoversStructuralCoefficients) {
  const auto fit = three_sls(simultaneous(3, 4000));
  EXPECT_NEAR(fit.blocks[0]["y2"], 0.5, 0.1);
  EXPECT_NEAR(fit.blocks[1]["y1"], -0.3, 0.1);
}

TEST(ThreeSls, NoEndogenousRegressorsEqualsOls) {
  // Every equation regresses on the full exogenous set, so the projection is
  // the identity and system GLS collapses to per-equation OLS.
  auto sd = simultaneous(4);
  const std::vector<std::string> names = {"x1", "x2", "x3", "cons"};
  sd.X = {sd.W, sd.W};
  sd.names = {names, names};
  const auto fit = three_sls(sd);
  for (std::size_t m = 0; m < 2; ++m) {
    const auto o = ols(sd.X[m], sd.y[m], sd.names[m]);
    EXPECT_LE((fit.blocks[m].coef - o.main().coef).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(TwoSls, EqualsOlsWhenInstrumentsAreRegressors) {
  auto sd = simultaneous(5);
  sd.X.resize(1);
  sd.y.resize(1);
  sd.titles.resize(1);
  sd.names.resize(1);
  sd.W = sd.X[0];
  const auto fit = two_sls(sd);
  const auto o = ols(sd.X[0], sd.y[0], sd.names[0]);
  EXPECT_LE((fit.main().coef - o.main().coef).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ReducedForm, TriangularSystemComposition) {
  // y1 = 1 + 2 x1 - x2;  y2 = 0.5 y1 + 3 x3 - 1  (noiseless)
  synth::CounterRng rng(6);
  const Eigen::Index n = 50;
  SystemDesign sd;
  sd.W.resize(n, 4);
  sd.w_names = {"x1", "x2", "x3", "cons"};
  Eigen::VectorXd y1(n), y2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sd.W.row(i) << rng.normal(), rng.normal(), rng.normal(), 1.0;
    y1(i) = 1 + 2 * sd.W(i, 0) - sd.W(i, 1);
    y2(i) = 0.5 * y1(i) + 3 * sd.W(i, 2) - 1;
  }
  sd.endogenous_order = {"y1", "y2"};
  sd.endogenous_values = {{"y1", y1}, {"y2", y2}};
  const auto rf = reduced_form(sd);
  ASSERT_EQ(rf.blocks.size(), 2u);
  EXPECT_EQ(rf.blocks[1].title, "y2");
  const Eigen::Vector4d expected(0.5 * 2, 0.5 * -1, 3.0, 0.5 * 1 - 1);
  EXPECT_LE((rf.blocks[1].coef - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EquationSystem, OrderCondition) {
  auto spec = parse_model_spec(
      "estimator = threesls\nendogenous = ln_trade, ln_cc\n"
      "equation = ln_trade ~ ln_cc, ln_dist, contig\n"
      "equation = ln_cc ~ ln_trade, ln_dist, contig\n");
  try {
    EquationSystem::from_spec(spec).check_order_condition();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnderIdentified);
  }
}

TEST(EquationSystem, PanelSystemWithExclusions) {
  synth::DGPConfig cfg;
  cfg.n_countries = 30;
  cfg.seed = 4;
  const auto data = synth::generate(cfg);
  const auto m = measure_table(build_networks(data.panel).control);
  auto spec = parse_model_spec(
      "estimator = threesls\nendogenous = ln_trade, ln_cc\n"
      "equation = ln_trade ~ ln_cc, ln_spl, ln_gdp_o, ln_gdp_d, ln_dist, comlang, smctry\n"
      "equation = ln_cc ~ ln_trade, ln_gdp_o, ln_gdp_d, ln_dist, comlang, colony\n");
  const auto system = EquationSystem::from_spec(spec);
  const auto fit = three_sls(system, data.panel, &m, spec);
  ASSERT_EQ(fit.blocks.size(), 2u);
  EXPECT_EQ(fit.blocks[0].title, "ln_trade");
  EXPECT_FALSE(fit.blocks[0].find("colony"));
  EXPECT_FALSE(fit.blocks[1].find("smctry"));
  const auto rf = reduced_form(system, data.panel, &m, spec);
  EXPECT_EQ(rf.blocks[1].title, "ln_cc");
  EXPECT_TRUE(rf.blocks[0].find("ln_spl"));
}
