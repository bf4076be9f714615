#include "ncs/errors.hpp"
#include "ncs/experiments.hpp"

namespace ncs {

namespace {

bool is_threshold_family(const std::string& p) {
  return p == "threshold" || p == "self_threshold" || p == "naive_threshold";
}

bool is_clock_family(const std::string& p) { return p == "clock" || p == "self_clock"; }

Protocol build_protocol(const PolicyConfig& cfg, const NodePartition& partition) {
  if (cfg.protocol == "rr" && cfg.rr_norm_certificate)
    return make_rr_protocol(partition, tod_certificate(partition.nodes()));
  return make_protocol(cfg.protocol, partition);
}

}  // namespace

BuiltExperiment build_experiment(const ExperimentConfig& config) {
  config.validate();
  const PolicyConfig& pc = config.policy;
  const bool jet = config.system == "jet_engine";

  BuiltExperiment ex;
  ex.sys = jet ? jet_engine_system() : scalar_clock_fixture();
  ex.protocol = build_protocol(pc, ex.sys.partition);

  EventTriggeredModel base;
  std::optional<SelfTriggeredPolicy> stp;

  if (is_threshold_family(pc.name)) {
    if (!jet) throw ConfigError("policy '" + pc.name + "' needs the jet_engine design");
    const JetEngineDesign d = jet_engine_design();
    ThresholdPolicy tp{d.gamma_tilde.scaled(pc.gamma_tilde_scale), d.delta,
                       pc.eta0.value_or(d.eta0), d.lyapunov};
    base = pc.name == "naive_threshold" ? make_naive_threshold_model(ex.sys, ex.protocol, tp)
                                        : make_threshold_model(ex.sys, ex.protocol, tp);
    ex.certificate = threshold_certificate(base.layout, d.lyapunov, d.gamma_tilde, ex.protocol);
    if (pc.name == "self_threshold")
      stp = SelfTriggeredPolicy{{pc.sigma_eta.value_or(d.sigma_eta),
                                 pc.sigma_lyap.value_or(d.sigma_lyap)},
                                pc.t_star.value_or(d.t_star),
                                pc.epsilon.value_or(d.epsilon)};
  } else if (is_clock_family(pc.name)) {
    if (jet) throw ConfigError("policy '" + pc.name + "' needs the scalar_clock_fixture design");
    const ScalarClockDesign d = scalar_clock_design();
    ClockPolicy cp;
    cp.L = [L = d.L](const Vector&, const Vector&) { return L; };
    cp.G = [G = d.G](const Vector&, const Vector&) { return G; };
    cp.a = pc.clock_a;
    cp.rho = ex.protocol.rho();
    base = make_clock_model(ex.sys, ex.protocol, cp);
    if (pc.eta0) base.eta0 = *pc.eta0;
    ex.certificate = clock_certificate(base.layout, d.lyapunov, ex.protocol);
    if (pc.name == "self_clock")
      stp = SelfTriggeredPolicy{{pc.sigma_clock}, pc.t_star.value_or(1.0),
                                pc.epsilon.value_or(1e-4)};
  } else {
    base = make_periodic_model(ex.sys, ex.protocol, PeriodicPolicy{pc.period});
  }

  ex.base_layout = base.layout;
  const Eigen::Index nb = base.layout.size();
  const StateLayout base_layout = base.layout;
  ex.base_guard = [guard = base.guard, nb](const Vector& q) { return guard(q.head(nb)); };

  auto base_initial = [base, base_layout](const Vector& x0, const Vector& e0) {
    Vector q = base.initial_state(x0);
    if (e0.size() > 0) {
      if (e0.size() != base_layout.n_e)
        throw DimensionMismatch("e0 has " + std::to_string(e0.size()) + " entries, expected " +
                                std::to_string(base_layout.n_e));
      q.segment(base_layout.n_x, base_layout.n_e) = e0;
    }
    return q;
  };
  auto check_x0 = [n_x = base_layout.n_x](const Vector& x0) {
    if (x0.size() != n_x)
      throw DimensionMismatch("x0 has " + std::to_string(x0.size()) + " entries, expected " +
                              std::to_string(n_x));
  };

  if (stp) {
    ex.self_triggered = self_triggered_wrap(base, *stp);
    ex.hybrid = ex.self_triggered->system;
    ex.layout = ex.self_triggered->layout;
    ex.initial_state = [st = *ex.self_triggered, base_initial, check_x0](const Vector& x0,
                                                                          const Vector& e0) {
      check_x0(x0);
      const Vector q = base_initial(x0, e0);
      Vector out(st.layout.size());
      out.head(q.size()) = q;
      out[st.layout.tau1_index()] = 0.0;
      out[st.layout.tau2_index()] = st.next_interval(q);
      return out;
    };
  } else {
    ex.hybrid = base.system();
    ex.layout = base.layout;
    ex.initial_state = [base_initial, check_x0](const Vector& x0, const Vector& e0) {
      check_x0(x0);
      return base_initial(x0, e0);
    };
  }
  ex.event_triggered = std::move(base);
  return ex;
}

}  // namespace ncs
