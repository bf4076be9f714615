#pragma once

/**
 * @file experiments.hpp
 * @brief Experiment configuration, single runs, ensembles and CSV export
 *
 * Configs are INI-style text (key = value inside [sections]). Only built-in
 * systems are nameable: "jet_engine" and "scalar_clock_fixture".
 */

#include "ncs/hybrid.hpp"
#include "ncs/monitor.hpp"
#include "ncs/protocols.hpp"
#include "ncs/triggers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ncs {

struct PolicyConfig {
  /// threshold, clock, periodic, self_threshold, self_clock or naive_threshold.
  std::string name = "threshold";
  std::string protocol = "tod";
  /// Give round robin the W = |e| certificate (a knowingly invalid one).
  bool rr_norm_certificate = false;
  /// Scales the policy's gamma_tilde; the monitor keeps the published one.
  double gamma_tilde_scale = 1.0;
  std::optional<double> eta0;  ///< defaults per system
  double period = 0.010;
  std::optional<std::vector<double>> sigma_eta;
  std::optional<std::vector<double>> sigma_lyap;
  std::vector<double> sigma_clock{1.0, 1.0};
  std::optional<double> t_star;
  std::optional<double> epsilon;
  double clock_a = 1.0;
};

struct EnsembleConfig {
  std::size_t count = 200;
  double radius = 1.0;
  std::uint64_t seed = 42;
};

struct MonitorConfig {
  MonitorTolerance tol;
  bool enabled = true;
};

struct IssCheckConfig {
  std::size_t samples = 10000;
  double radius = 1.0;
  std::uint64_t seed = 42;
  double gamma_scale = 1.0;
};

struct UgasCheckConfig {
  std::size_t samples = 100000;
  double radius = 1.0;
  std::uint64_t seed = 42;
  std::string protocol = "tod";
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string system = "jet_engine";
  Vector x0;  ///< single-run initial plant/controller state
  Vector e0;  ///< single-run initial error, zero when empty
  PolicyConfig policy;
  IntegratorConfig integrator;
  EnsembleConfig ensemble;
  MonitorConfig monitor;
  IssCheckConfig iss;
  UgasCheckConfig ugas;
  std::filesystem::path out_dir = "out";

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
/// Defaults for a built-in system (jet_engine: x0 = (0.95, -0.14), horizon 1 s).
ExperimentConfig default_config(const std::string& system);

/// A policy instantiated on a system, ready to simulate and monitor.
struct BuiltExperiment {
  NcsSystem sys;
  Protocol protocol;
  HybridSystem hybrid;
  StateLayout layout;       ///< layout of the simulated state (clocks for self-triggered)
  StateLayout base_layout;
  std::function<Vector(const Vector& x0, const Vector& e0)> initial_state;
  /// Base policy guard on the simulated state, when the policy has one.
  std::function<double(const Vector& q)> base_guard;
  std::optional<LyapunovSpec> certificate;
  std::optional<SelfTriggeredModel> self_triggered;
  std::optional<EventTriggeredModel> event_triggered;
};

BuiltExperiment build_experiment(const ExperimentConfig& config);

struct Transmission {
  double t = 0.0;
  std::size_t node = 0;         ///< 1-based
  std::vector<double> e_abs;    ///< per-node |e_i| before the jump
  double interval = 0.0;
};

struct RunRecord {
  std::string policy;
  Vector x0;
  std::vector<Transmission> log;
  std::size_t jumps = 0;
  double final_time = 0.0;
  Vector final_x;
  MonitorReport monitor;
  double mean_interval = 0.0;   ///< 0 when nothing was transmitted
  bool aborted = false;
  std::string error;

  std::size_t violations() const {
    return monitor.flow_violations.size() + monitor.jump_violations.size();
  }
};

/// Simulates from (x0, e0), monitors against the policy certificate and logs transmissions.
RunRecord run_single(const BuiltExperiment& ex, const ExperimentConfig& config, const Vector& x0,
                     const Vector& e0 = {});

struct EnsembleSummary {
  std::string policy;
  double mean_interval = 0.0;    ///< per-run means averaged over runs
  double pooled_interval = 0.0;  ///< total time over total transmissions
  double min_dwell = 0.0;
  std::size_t runs = 0;          ///< completed runs
  std::size_t aborted = 0;
  std::size_t violations = 0;
  std::size_t converged = 0;
};

struct EnsembleResult {
  EnsembleSummary summary;
  std::vector<RunRecord> records;  ///< run order; logs dropped unless requested
};

/// Initial states drawn uniformly in the radius ball from the configured seed.
std::vector<Vector> ensemble_initial_states(const ExperimentConfig& config);

EnsembleResult run_ensemble(const ExperimentConfig& config, bool keep_logs = false);

/// Shortest decimal string that parses back to the same double.
std::string format_number(double v);

void write_transmission_csv(const std::filesystem::path& path, const RunRecord& record);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<EnsembleSummary>& rows);
void write_monitor_report(const std::filesystem::path& path, const std::vector<RunRecord>& records);

/// Writes log_<i>.csv per record that has a log, summary.csv and monitor.txt into dir.
void export_outputs(const std::filesystem::path& dir, const std::vector<RunRecord>& records,
                    const std::vector<EnsembleSummary>& summaries);

}  // namespace ncs
