#include "ncs/errors.hpp"
#include "ncs/triggers.hpp"

#include <algorithm>

namespace ncs {

namespace {

StateLayout base_layout(const NcsSystem& sys) { return {sys.n_x(), sys.n_e(), false}; }

double gamma_of_w(const ThresholdPolicy& policy, const Protocol& protocol, std::uint64_t kappa,
                  const Vector& e) {
  return policy.gamma_tilde(protocol.W(kappa, e));
}

}  // namespace

double threshold_guard(const NcsState& q, const ThresholdPolicy& policy, const Protocol& protocol) {
  return gamma_of_w(policy, protocol, q.kappa, q.e) -
         std::max(policy.lyapunov.value(q.x), q.eta);
}

NcsState threshold_jump(const NcsState& q, const ThresholdPolicy& policy, const Protocol& protocol) {
  NcsState next = q;
  next.e = protocol.jump(q.kappa, q.e);
  next.kappa = q.kappa + 1;
  next.eta = gamma_of_w(policy, protocol, q.kappa, q.e);
  return next;
}

EventTriggeredModel make_threshold_model(const NcsSystem& sys, const Protocol& protocol,
                                         const ThresholdPolicy& policy) {
  sys.validate();
  if (!protocol.certificate)
    throw ConfigError("threshold trigger needs a protocol certificate (W, rho)");

  EventTriggeredModel m;
  m.policy = "threshold";
  m.layout = base_layout(sys);
  m.eta0 = policy.eta0;
  const StateLayout layout = m.layout;
  const Polynomial d_gamma = policy.gamma_tilde.derivative();

  m.flow = [sys, policy, layout](const Vector& q) {
    const ClosedLoopRates r = closed_loop_flow(sys, layout.x(q), layout.e(q));
    Vector dq(layout.size());
    dq.head(layout.n_x) = r.x_dot;
    dq.segment(layout.n_x, layout.n_e) = r.e_dot;
    dq[layout.kappa_index()] = 0.0;
    dq[layout.eta_index()] = -policy.delta(layout.eta(q));
    return dq;
  };
  m.jump = [policy, protocol, layout](const Vector& q) {
    return pack(threshold_jump(unpack(q, layout), policy, protocol), layout);
  };
  m.guard = [policy, protocol, layout](const Vector& q) {
    return gamma_of_w(policy, protocol, layout.kappa(q), layout.e(q)) -
           std::max(policy.lyapunov.value(layout.x(q)), layout.eta(q));
  };

  // d/de gamma_tilde(W(kappa, e)) = gamma_tilde'(W) dW/de.
  auto gamma_gradient = [protocol, layout, d_gamma](const Vector& q) {
    Vector g = Vector::Zero(layout.size());
    const Vector e = layout.e(q);
    const std::uint64_t kappa = layout.kappa(q);
    if (protocol.certificate->gradient)
      g.segment(layout.n_x, layout.n_e) =
          d_gamma(protocol.W(kappa, e)) * protocol.certificate->gradient(kappa, e);
    return g;
  };
  const bool closed_form = static_cast<bool>(protocol.certificate->gradient);

  TriggerFunction vs_eta;
  vs_eta.name = "gamma_tilde(W) - eta";
  vs_eta.value = [policy, protocol, layout](const Vector& q) {
    return gamma_of_w(policy, protocol, layout.kappa(q), layout.e(q)) - layout.eta(q);
  };
  if (closed_form)
    vs_eta.gradient = [gamma_gradient, layout](const Vector& q) {
      Vector g = gamma_gradient(q);
      g[layout.eta_index()] = -1.0;
      return g;
    };

  TriggerFunction vs_lyap;
  vs_lyap.name = "gamma_tilde(W) - V";
  vs_lyap.value = [policy, protocol, layout](const Vector& q) {
    return gamma_of_w(policy, protocol, layout.kappa(q), layout.e(q)) -
           policy.lyapunov.value(layout.x(q));
  };
  if (closed_form && policy.lyapunov.gradient)
    vs_lyap.gradient = [gamma_gradient, policy, layout](const Vector& q) {
      Vector g = gamma_gradient(q);
      g.head(layout.n_x) = -policy.lyapunov.gradient(layout.x(q));
      return g;
    };

  m.triggers = {vs_eta, vs_lyap};
  return m;
}

EventTriggeredModel make_naive_threshold_model(const NcsSystem& sys, const Protocol& protocol,
                                               const ThresholdPolicy& policy) {
  EventTriggeredModel m = make_threshold_model(sys, protocol, policy);
  m.policy = "naive_threshold";
  const StateLayout layout = m.layout;
  auto base_flow = m.flow;
  m.flow = [base_flow, layout](const Vector& q) {
    Vector dq = base_flow(q);
    dq[layout.eta_index()] = 0.0;
    return dq;
  };
  m.jump = [protocol, layout](const Vector& q) {
    NcsState s = unpack(q, layout);
    s.e = protocol.jump(s.kappa, s.e);
    ++s.kappa;
    return pack(s, layout);
  };
  m.guard = m.triggers[1].value;
  m.triggers = {m.triggers[1]};
  m.eta0 = 0.0;
  return m;
}

}  // namespace ncs
