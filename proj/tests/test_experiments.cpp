#include "ncs/errors.hpp"
#include "ncs/experiments.hpp"
#include "ncs/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using ncs::Vector;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ncs_test_experiments";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_ini(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ncs::ExperimentConfig jet(const std::string& policy, double horizon = 1.0) {
  ncs::ExperimentConfig c = ncs::default_config("jet_engine");
  c.policy.name = policy;
  c.integrator.horizon = horizon;
  return c;
}

ncs::RunRecord run(const ncs::ExperimentConfig& c, const Vector& x0, const Vector& e0 = {}) {
  return ncs::run_single(ncs::build_experiment(c), c, x0, e0);
}

}  // namespace

TEST(Config, ShippedJetConfigLoads) {
  const auto c = ncs::load_config(fs::path(NCS_SOURCE_DIR) / "configs/jet_engine.ini");
  EXPECT_EQ(c.system, "jet_engine");
  EXPECT_EQ(c.policy.name, "threshold");
  EXPECT_DOUBLE_EQ(*c.policy.eta0, 5000.0);
  ASSERT_TRUE(c.policy.sigma_eta);
  EXPECT_EQ(c.policy.sigma_eta->size(), 4u);
  EXPECT_EQ(c.ensemble.count, 200u);
  EXPECT_EQ(c.x0, v2(0.95, -0.14));
}

TEST(Config, AllShippedConfigsValidate) {
  for (const auto& entry : fs::directory_iterator(fs::path(NCS_SOURCE_DIR) / "configs")) {
    SCOPED_TRACE(entry.path().string());
    const auto c = ncs::load_config(entry.path());
    EXPECT_NO_THROW(ncs::build_experiment(c));
  }
}

TEST(Config, UnknownKeyIsRejected) {
  const auto p = write_ini("unknown_key.ini", "[policy]\nname = threshold\nspeed = 3\n");
  try {
    ncs::load_config(p);
    FAIL() << "expected ConfigError";
  } catch (const ncs::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("speed"), std::string::npos);
  }
}

TEST(Config, UnknownSectionIsRejected) {
  const auto p = write_ini("unknown_section.ini", "[plotting]\ncolor = red\n");
  EXPECT_THROW(ncs::load_config(p), ncs::ConfigError);
}

TEST(Config, BadValuesAreRejected) {
  EXPECT_THROW(ncs::load_config(write_ini("nan.ini", "[integrator]\nhorizon = soon\n")),
               ncs::ConfigError);
  EXPECT_THROW(ncs::load_config(write_ini("neg.ini", "[integrator]\nhorizon = -1\n")),
               ncs::ConfigError);
  EXPECT_THROW(ncs::load_config(write_ini("pol.ini", "[policy]\nname = sometimes\n")),
               ncs::ConfigError);
  EXPECT_THROW(ncs::load_config(write_ini("sys.ini", "[experiment]\nsystem = toaster\n")),
               ncs::ConfigError);
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(ncs::load_config(scratch("does_not_exist.ini")), ncs::ConfigError);
}

TEST(Config, PolicyMustMatchSystem) {
  ncs::ExperimentConfig c = jet("clock");
  EXPECT_THROW(ncs::build_experiment(c), ncs::ConfigError);
  ncs::ExperimentConfig s = ncs::default_config("scalar_clock_fixture");
  s.policy.name = "threshold";
  EXPECT_THROW(ncs::build_experiment(s), ncs::ConfigError);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(ncs::format_number(0.1), "0.1");
  EXPECT_EQ(ncs::format_number(2.0), "2");
  EXPECT_EQ(ncs::format_number(1e-4), "1e-04");
  for (double v : {1.0 / 3.0, 0.061, 5000.0 * std::exp(-0.3), -1.25e-17}) {
    const std::string s = ncs::format_number(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
}

TEST(Export, TransmissionRowFormat) {
  ncs::RunRecord r;
  r.policy = "threshold";
  r.log.push_back({0.2, 2, {0.1, 0.3}, 0.2});
  const auto p = scratch("row.csv");
  ncs::write_transmission_csv(p, r);
  EXPECT_EQ(slurp(p), "t,node,e1_abs,e2_abs,interval\n0.2,2,0.1,0.3,0.2\n");
}

TEST(Export, SummaryHasViolationColumn) {
  ncs::EnsembleSummary s;
  s.policy = "periodic";
  s.mean_interval = 0.01;
  s.min_dwell = 0.01;
  s.runs = 200;
  const auto p = scratch("summary.csv");
  ncs::write_summary_csv(p, {s});
  EXPECT_EQ(slurp(p), "policy,mean_interval,min_dwell,runs,violations\nperiodic,0.01,0.01,200,0\n");
}

TEST(Ensemble, OutputsAreByteIdenticalAcrossRuns) {
  ncs::ExperimentConfig c = jet("threshold", 0.3);
  c.ensemble.count = 3;
  std::vector<std::string> first;
  for (const char* dir : {"repro_a", "repro_b"}) {
    const auto res = ncs::run_ensemble(c, true);
    fs::remove_all(scratch(dir));
    ncs::export_outputs(scratch(dir), res.records, {res.summary});
    std::vector<std::string> files;
    for (const char* f : {"log_0.csv", "log_1.csv", "log_2.csv", "summary.csv", "monitor.txt"})
      files.push_back(slurp(scratch(dir) / f));
    if (first.empty()) {
      first = files;
    } else {
      EXPECT_EQ(first, files);
    }
  }
  EXPECT_FALSE(first[0].empty());
}

TEST(Ensemble, SeedChangesInitialStates) {
  ncs::ExperimentConfig c = jet("threshold");
  c.ensemble.count = 4;
  const auto a = ncs::ensemble_initial_states(c);
  c.ensemble.seed = 43;
  const auto b = ncs::ensemble_initial_states(c);
  EXPECT_NE(a[0], b[0]);
  for (const Vector& x : a) EXPECT_LE(x.norm(), 1.0);
}

TEST(Sampling, UniformBallMeanNorm) {
  // E|x| = d / (d + 1) for the uniform unit ball in d dimensions.
  ncs::Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += ncs::sample_in_ball(rng, 2, 1.0).norm();
  EXPECT_NEAR(sum / n, 2.0 / 3.0, 0.01 * 2.0 / 3.0);
}

TEST(Sampling, RadiusScales) {
  ncs::Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LE(ncs::sample_in_ball(rng, 3, 0.5).norm(), 0.5);
}

TEST(RunSingle, PeriodicTransmitsEveryPeriod) {
  const auto r = run(jet("periodic"), v2(0.3, -0.2));
  ASSERT_FALSE(r.aborted) << r.error;
  EXPECT_NEAR(static_cast<double>(r.jumps), 100.0, 1.0);
  for (const auto& tx : r.log) EXPECT_NEAR(tx.interval, 0.010, 1e-8);
}

TEST(RunSingle, ZeroStateNeverTransmits) {
  const auto r = run(jet("threshold"), v2(0.0, 0.0));
  ASSERT_FALSE(r.aborted) << r.error;
  EXPECT_EQ(r.jumps, 0u);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.mean_interval, 0.0);
}

TEST(RunSingle, TodGrantsLargestErrorNode) {
  const auto r = run(jet("threshold"), v2(0.95, -0.14));
  ASSERT_FALSE(r.aborted) << r.error;
  ASSERT_GT(r.log.size(), 3u);
  for (const auto& tx : r.log) {
    ASSERT_EQ(tx.e_abs.size(), 2u);
    const std::size_t want = tx.e_abs[1] > tx.e_abs[0] ? 2 : 1;
    EXPECT_EQ(tx.node, want) << "t = " << tx.t;
  }
}

TEST(RunSingle, SelfTriggeredFirstTransmissionNotLater) {
  const Vector x0 = v2(0.95, -0.14);
  const auto event = run(jet("threshold", 0.2), x0);
  const auto self = run(jet("self_threshold", 0.2), x0);
  ASSERT_FALSE(event.aborted) << event.error;
  ASSERT_FALSE(self.aborted) << self.error;
  ASSERT_FALSE(event.log.empty());
  ASSERT_FALSE(self.log.empty());
  EXPECT_LE(self.log.front().t, event.log.front().t);
  for (const auto& tx : self.log) EXPECT_GE(tx.interval, 1e-4 * (1 - 1e-9));
}

TEST(RunSingle, NaiveRuleAbortsFromConstructedState) {
  const auto c = ncs::load_config(fs::path(NCS_SOURCE_DIR) / "configs/negative_naive.ini");
  const auto r = run(c, c.x0, c.e0);
  EXPECT_TRUE(r.aborted);
  EXPECT_NE(r.error.find("jump"), std::string::npos) << r.error;
}

TEST(RunSingle, ThresholdRunIsMonitoredClean) {
  const auto r = run(jet("threshold"), v2(0.95, -0.14));
  ASSERT_FALSE(r.aborted) << r.error;
  EXPECT_EQ(r.violations(), 0u);
  EXPECT_GT(r.monitor.dwell.min, 0.0);
}
