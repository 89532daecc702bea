#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "cavphase/experiments.hpp"

namespace cavphase::experiments {
namespace {

TEST(Config, ParsesKeysListsAndComments) {
  SweepConfig cfg;
  apply_config_text(cfg,
                    "# comment line\n"
                    "experiment = fig5\n"
                    "b_values = 4, 10 ,20   # trailing comment\n"
                    "n_values=1,3\n"
                    "deviation = 0.98\n"
                    "transport_decay = false\n"
                    "integrator = rk4\n"
                    "max_phase_per_step = 0.02\n"
                    "seed = 42\n"
                    "\n");
  EXPECT_EQ(cfg.experiment, Experiment::kFig5);
  EXPECT_EQ(cfg.b_values, (std::vector<double>{4, 10, 20}));
  EXPECT_EQ(cfg.n_values, (std::vector<int>{1, 3}));
  EXPECT_DOUBLE_EQ(cfg.deviation, 0.98);
  EXPECT_FALSE(cfg.transport_decay);
  EXPECT_EQ(cfg.evolution.method, dynamics::Method::kRk4);
  EXPECT_DOUBLE_EQ(cfg.evolution.max_phase_per_step, 0.02);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, Defaults) {
  const SweepConfig cfg;
  EXPECT_EQ(cfg.n_values.size(), 15u);
  EXPECT_EQ(cfg.theta_points, 201);
  EXPECT_DOUBLE_EQ(cfg.deviation, 0.99);
  EXPECT_EQ(cfg.b_values, (std::vector<double>{4, 5, 6, 8, 10, 12, 15, 20, 25, 30, 40}));
  EXPECT_EQ(cfg.targets, 3);
  EXPECT_EQ(cfg.fock_cutoff, 2);
  EXPECT_TRUE(cfg.transport_decay);
  EXPECT_EQ(cfg.transport_events, 10);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsBadInput) {
  SweepConfig cfg;
  EXPECT_THROW(apply_setting(cfg, "unknown", "1"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "theta_points", "abc"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "theta_points", "3.5"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "experiment", "fig6"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "integrator", "euler"), ConfigError);
  EXPECT_THROW(apply_config_text(cfg, "no equals sign\n"), ConfigError);
  EXPECT_THROW(apply_config_file(cfg, "/nonexistent/cavphase.conf"), ConfigError);

  SweepConfig bad;
  bad.deviation = 2.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = SweepConfig{};
  bad.b_values.clear();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = SweepConfig{};
  bad.n_values.clear();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = SweepConfig{};
  bad.evolution.max_phase_per_step = 100.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Experiment, NamesRoundTrip) {
  for (Experiment e :
       {Experiment::kFig4, Experiment::kFig5, Experiment::kGateCheck, Experiment::kValidate}) {
    EXPECT_EQ(parse_experiment(to_string(e)), e);
  }
}

TEST(Csv, FixedFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(std::numbers::pi), "3.14159265359");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(3.0), "3");
  Table t{{"n", "theta", "fidelity"}, {{1, 0.5, 0.25}, {2, 1.0, 1.0 / 3.0}}};
  std::ostringstream out;
  write_csv(t, out);
  EXPECT_EQ(out.str(), "n,theta,fidelity\n1,0.5,0.25\n2,1,0.333333333333\n");
}

TEST(ThetaGrid, EndsIncluded) {
  const std::vector<double> g = theta_grid(201);
  ASSERT_EQ(g.size(), 201u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_NEAR(g.back(), 2.0 * std::numbers::pi, 1e-15);
  EXPECT_NEAR(g[100], std::numbers::pi, 1e-15);
}

TEST(Fig4, NoDeviationGivesUnitFidelity) {
  SweepConfig cfg;
  cfg.deviation = 1.0;
  cfg.n_values = {1, 5, 15};
  cfg.theta_points = 11;
  const Table t = run_fig4(cfg);
  EXPECT_EQ(t.header, (std::vector<std::string>{"n", "theta", "fidelity"}));
  ASSERT_EQ(t.rows.size(), 33u);
  for (const auto& row : t.rows) EXPECT_NEAR(row[2], 1.0, 1e-12);
}

TEST(Fig4, RowsSortedAndDeterministic) {
  SweepConfig cfg;
  cfg.n_values = {3, 1, 2};
  cfg.theta_points = 7;
  const Table a = run_fig4(cfg), b = run_fig4(cfg);
  std::ostringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_TRUE(std::is_sorted(a.rows.begin(), a.rows.end(), [](const auto& x, const auto& y) {
    return std::pair(x[0], x[1]) < std::pair(y[0], y[1]);
  }));
}

// Reference values from an independent closed-form evaluation of the
// two photon branches (per-target 4x4 products, analytic exchange mixing).
TEST(Fig4, MatchesIndependentBranchEvaluation) {
  SweepConfig cfg;
  cfg.n_values = {1, 10};
  const Table t = run_fig4(cfg);
  ASSERT_EQ(t.rows.size(), 402u);
  double lo1 = 1.0, lo10 = 1.0;
  for (const auto& row : t.rows) {
    double& lo = row[0] == 1 ? lo1 : lo10;
    lo = std::min(lo, row[2]);
  }
  EXPECT_NEAR(lo1, 0.996323591266, 1e-11);
  EXPECT_NEAR(lo10, 0.959776881010, 1e-11);
  EXPECT_NEAR(t.rows[201 + 0][2], 0.959776881010, 1e-11);    // n = 10, theta = 0
  EXPECT_NEAR(t.rows[201 + 100][2], 0.969825726897, 1e-11);  // n = 10, theta = pi
  EXPECT_NEAR(t.rows[100][2], 0.998035631081, 1e-11);        // n = 1, theta = pi
}

TEST(Fig5, LosslessLimitApproachesOne) {
  SweepConfig cfg;
  cfg.targets = 1;
  cfg.deviation = 1.0;
  cfg.cavity_lifetime = cfg.level1_lifetime = cfg.level2_lifetime = cfg.level3_lifetime = 0.0;
  cfg.transport_decay = false;
  cfg.b_values = {5, 10, 20, 40};
  cfg.convergence_b = {};
  const Fig5Result r = run_fig5(cfg);
  ASSERT_EQ(r.points.size(), 4u);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    EXPECT_GT(r.points[i].fidelity, r.points[i - 1].fidelity);
  }
  EXPECT_GT(r.points.back().fidelity, 0.999);
  EXPECT_TRUE(r.all_converged());
  const Table t = r.table();
  EXPECT_EQ(t.header, (std::vector<std::string>{"b", "fidelity"}));
}

TEST(Fig5, PointDiagnostics) {
  SweepConfig cfg;
  cfg.targets = 1;
  const Fig5Point p = fig5_point(cfg, 6.0, true);
  EXPECT_TRUE(p.convergence_checked);
  EXPECT_TRUE(p.converged);
  EXPECT_LT(p.max_trace_drift, 1e-10);
  EXPECT_GE(p.min_eigenvalue, -1e-10);
  EXPECT_GT(p.lindblad_steps, 0);
  EXPECT_GT(p.fidelity, 0.5);
  EXPECT_LT(p.fidelity, 1.0);
}

TEST(GateCheck, PassesAndCountsCases) {
  SweepConfig cfg;
  cfg.draws = 2;
  const GateCheckReport r = run_gate_check(cfg);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.cases, 3 * (3 + 2));
  EXPECT_LT(r.max_error, 1e-10);
}

TEST(GateCheck, ImpossibleToleranceReportsOffendingInput) {
  SweepConfig cfg;
  cfg.gate_n = {1};
  cfg.draws = 0;
  cfg.tolerance = 1e-300;
  const GateCheckReport r = run_gate_check(cfg);
  if (r.max_error > 0.0) {
    ASSERT_FALSE(r.passed());
    EXPECT_NE(r.failures.front().detail.find("input |"), std::string::npos);
  }
}

TEST(Validate, CoherentChecksPass) {
  SweepConfig cfg;
  cfg.validate_dissipative = false;
  const std::vector<CheckResult> checks = run_validate(cfg);
  EXPECT_GE(checks.size(), 7u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

}  // namespace
}  // namespace cavphase::experiments
