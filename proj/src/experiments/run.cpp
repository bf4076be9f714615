#include "ncs/errors.hpp"
#include "ncs/experiments.hpp"
#include "ncs/sampling.hpp"

#include <algorithm>
#include <limits>

namespace ncs {

namespace {

std::vector<Transmission> transmission_log(const HybridTrajectory& traj, const Protocol& protocol,
                                           const StateLayout& layout) {
  std::vector<Transmission> log;
  log.reserve(traj.jumps.size());
  double previous = 0.0;
  for (const JumpRecord& jr : traj.jumps) {
    Transmission tx;
    tx.t = jr.time.t;
    const Vector e = layout.e(jr.pre);
    tx.node = protocol.select(layout.kappa(jr.pre), e) + 1;
    tx.e_abs.reserve(protocol.nodes());
    for (std::size_t i = 0; i < protocol.nodes(); ++i)
      tx.e_abs.push_back(protocol.partition.node_norm(e, i));
    tx.interval = tx.t - previous;
    previous = tx.t;
    log.push_back(std::move(tx));
  }
  return log;
}

}  // namespace

RunRecord run_single(const BuiltExperiment& ex, const ExperimentConfig& config, const Vector& x0,
                     const Vector& e0) {
  RunRecord rec;
  rec.policy = config.policy.name;
  rec.x0 = x0;
  HybridTrajectory traj;
  try {
    traj = simulate_hybrid(ex.hybrid, ex.initial_state(x0, e0), config.integrator);
  } catch (const Error& err) {
    rec.aborted = true;
    rec.error = err.what();
    return rec;
  }

  rec.log = transmission_log(traj, ex.protocol, ex.layout);
  rec.jumps = traj.jumps.size();
  rec.final_time = traj.final_time();
  rec.final_x = ex.layout.x(traj.final_state());

  if (ex.certificate && config.monitor.enabled) {
    rec.monitor = monitor_trajectory(traj, *ex.certificate, config.monitor.tol);
  } else {
    if (!traj.jumps.empty()) rec.monitor.dwell = dwell_time_report(traj);
    rec.monitor.final_norm = rec.final_x.norm();
    rec.monitor.converged = rec.monitor.final_norm < 0.01;
  }
  rec.mean_interval = rec.monitor.dwell.mean;
  return rec;
}

std::vector<Vector> ensemble_initial_states(const ExperimentConfig& config) {
  const Eigen::Index dim = config.x0.size();
  Rng rng(config.ensemble.seed);
  std::vector<Vector> out;
  out.reserve(config.ensemble.count);
  for (std::size_t i = 0; i < config.ensemble.count; ++i)
    out.push_back(sample_in_ball(rng, dim, config.ensemble.radius));
  return out;
}

EnsembleResult run_ensemble(const ExperimentConfig& config, bool keep_logs) {
  const BuiltExperiment ex = build_experiment(config);
  EnsembleResult result;
  EnsembleSummary& s = result.summary;
  s.policy = config.policy.name;
  s.min_dwell = std::numeric_limits<double>::infinity();

  double mean_sum = 0.0, total_time = 0.0;
  std::size_t total_tx = 0, with_tx = 0;
  for (const Vector& x0 : ensemble_initial_states(config)) {
    RunRecord rec = run_single(ex, config, x0);
    if (rec.aborted) {
      ++s.aborted;
    } else {
      ++s.runs;
      s.violations += rec.violations();
      if (rec.monitor.converged) ++s.converged;
      if (rec.jumps > 0) {
        ++with_tx;
        mean_sum += rec.mean_interval;
        total_time += rec.log.back().t;
        total_tx += rec.jumps;
        s.min_dwell = std::min(s.min_dwell, rec.monitor.dwell.min);
      }
    }
    if (!keep_logs) rec.log.clear();
    result.records.push_back(std::move(rec));
  }
  if (with_tx > 0) {
    s.mean_interval = mean_sum / static_cast<double>(with_tx);
    s.pooled_interval = total_time / static_cast<double>(total_tx);
  } else {
    s.min_dwell = 0.0;
  }
  return result;
}

}  // namespace ncs
