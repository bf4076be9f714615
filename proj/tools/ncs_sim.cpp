// ncs_sim: single runs, ensembles and property checks for the built-in NCS examples.

#include "ncs/errors.hpp"
#include "ncs/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> policies;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> horizon;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "experiment config (INI)");
  cmd->add_option("--policy", o.policies, "policy name(s), comma separated")->delimiter(',');
  cmd->add_option("--seed", o.seed, "ensemble / sampling seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--horizon", o.horizon, "simulated time in seconds");
}

ncs::ExperimentConfig resolve(const CommonOptions& o) {
  ncs::ExperimentConfig c = o.config.empty() ? ncs::default_config("jet_engine")
                                             : ncs::load_config(o.config);
  if (o.seed) {
    c.ensemble.seed = *o.seed;
    c.iss.seed = *o.seed;
    c.ugas.seed = *o.seed;
  }
  if (o.out) c.out_dir = *o.out;
  if (o.horizon) c.integrator.horizon = *o.horizon;
  c.validate();
  return c;
}

std::vector<ncs::ExperimentConfig> per_policy(const CommonOptions& o) {
  const ncs::ExperimentConfig base = resolve(o);
  if (o.policies.empty()) return {base};
  std::vector<ncs::ExperimentConfig> out;
  for (const std::string& p : o.policies) {
    ncs::ExperimentConfig c = base;
    c.policy.name = p;
    c.validate();
    out.push_back(c);
  }
  return out;
}

void print_record(const ncs::RunRecord& r) {
  using ncs::format_number;
  if (r.aborted) {
    std::printf("%-16s aborted: %s\n", r.policy.c_str(), r.error.c_str());
    return;
  }
  std::printf("%-16s jumps=%zu mean_interval=%s min_dwell=%s violations=%zu |x(T)|=%s\n",
              r.policy.c_str(), r.jumps, format_number(r.mean_interval).c_str(),
              format_number(r.monitor.dwell.min).c_str(), r.violations(),
              format_number(r.monitor.final_norm).c_str());
}

int cmd_run(const CommonOptions& o) {
  std::vector<ncs::RunRecord> records;
  bool clean = true;
  for (const ncs::ExperimentConfig& c : per_policy(o)) {
    const ncs::BuiltExperiment ex = ncs::build_experiment(c);
    records.push_back(ncs::run_single(ex, c, c.x0, c.e0));
    print_record(records.back());
    clean = clean && !records.back().aborted && records.back().violations() == 0;
  }
  ncs::export_outputs(resolve(o).out_dir, records, {});
  return clean ? 0 : 1;
}

int cmd_ensemble(const CommonOptions& o) {
  std::vector<ncs::RunRecord> records;
  std::vector<ncs::EnsembleSummary> rows;
  bool clean = true;
  for (const ncs::ExperimentConfig& c : per_policy(o)) {
    ncs::EnsembleResult res = ncs::run_ensemble(c);
    const ncs::EnsembleSummary& s = res.summary;
    std::printf("%-16s runs=%zu aborted=%zu mean_interval=%s pooled=%s min_dwell=%s "
                "violations=%zu converged=%zu/%zu\n",
                s.policy.c_str(), s.runs, s.aborted, ncs::format_number(s.mean_interval).c_str(),
                ncs::format_number(s.pooled_interval).c_str(),
                ncs::format_number(s.min_dwell).c_str(), s.violations, s.converged, s.runs);
    clean = clean && s.aborted == 0 && s.violations == 0;
    rows.push_back(s);
    for (auto& r : res.records) records.push_back(std::move(r));
  }
  ncs::export_outputs(resolve(o).out_dir, records, rows);
  return clean ? 0 : 1;
}

int cmd_verify(const CommonOptions& o) {
  const ncs::ExperimentConfig c = resolve(o);
  bool clean = true;

  const ncs::NcsSystem sys =
      c.system == "jet_engine" ? ncs::jet_engine_system() : ncs::scalar_clock_fixture();
  ncs::Protocol protocol = c.ugas.protocol == "rr"
                               ? ncs::make_rr_protocol(sys.partition,
                                                       ncs::tod_certificate(sys.partition.nodes()))
                               : ncs::make_tod_protocol(sys.partition);
  const ncs::ContractionReport ugas =
      ncs::verify_ugas_contraction(protocol, c.ugas.samples, c.ugas.radius, c.ugas.seed);
  std::printf("ugas %s W=|e|: samples=%zu rho=%s worst_ratio=%s violations=%zu\n",
              protocol.name.c_str(), ugas.samples, ncs::format_number(ugas.rho).c_str(),
              ncs::format_number(ugas.worst_ratio).c_str(), ugas.violations.size());
  clean = clean && ugas.violations.empty();

  if (c.system == "jet_engine") {
    const ncs::JetEngineDesign d = ncs::jet_engine_design();
    const ncs::IssReport iss =
        ncs::check_iss_inequality(sys, d.lyapunov, d.alpha, d.gamma.scaled(c.iss.gamma_scale),
                                  c.iss.samples, c.iss.radius, c.iss.seed);
    std::printf("iss: samples=%zu worst_slack=%s violations=%zu\n", iss.samples,
                ncs::format_number(iss.worst_slack).c_str(), iss.violations.size());
    clean = clean && iss.violations.empty();
  } else {
    std::printf("iss: no published gain for %s, skipped\n", c.system.c_str());
  }
  return clean ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Networked control system simulator"};
  app.require_subcommand(1);
  CommonOptions run_opts, ens_opts, ver_opts;
  CLI::App* run = app.add_subcommand("run", "simulate one initial condition");
  CLI::App* ensemble = app.add_subcommand("ensemble", "random initial conditions in a ball");
  CLI::App* verify = app.add_subcommand("verify", "protocol contraction and ISS spot checks");
  add_common(run, run_opts);
  add_common(ensemble, ens_opts);
  add_common(verify, ver_opts);
  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts);
    if (*ensemble) return cmd_ensemble(ens_opts);
    return cmd_verify(ver_opts);
  } catch (const ncs::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
}
