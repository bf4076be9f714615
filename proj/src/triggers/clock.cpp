#include "ncs/errors.hpp"
#include "ncs/triggers.hpp"

#include <algorithm>
#include <string>

namespace ncs {

double ClockPolicy::lower() const {
  if (rho > 0.0) return a * rho * rho;
  return rho_zero_range->first;
}

double ClockPolicy::upper() const {
  if (rho > 0.0) return a;
  return rho_zero_range->second;
}

void ClockPolicy::validate() const {
  if (!L || !G) throw ConfigError("clock policy needs L and G");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("clock policy: rho must lie in [0, 1)");
  if (rho > 0.0 && !(a > rho)) throw ConfigError("clock policy: reset value a must exceed rho");
  if (rho == 0.0) {
    if (!rho_zero_range) throw ConfigError("clock policy: rho = 0 requires the range [b, c]");
    const auto [b, c] = *rho_zero_range;
    if (!(b > 0.0 && b < c)) throw ConfigError("clock policy: need 0 < b < c");
  }
}

namespace {

void check_range(double eta, const ClockPolicy& policy) {
  const double tol = policy.range_tol * std::max(1.0, policy.upper());
  if (eta < policy.lower() - tol || eta > policy.upper() + tol)
    throw EtaOutOfRange("clock variable " + std::to_string(eta) + " left [" +
                        std::to_string(policy.lower()) + ", " + std::to_string(policy.upper()) +
                        "]");
}

}  // namespace

double clock_guard(const NcsState& q, const ClockPolicy& policy, const Protocol&) {
  check_range(q.eta, policy);
  return policy.lower() - q.eta;
}

NcsState clock_jump(const NcsState& q, const ClockPolicy& policy, const Protocol& protocol) {
  check_range(q.eta, policy);
  NcsState next = q;
  next.e = protocol.jump(q.kappa, q.e);
  next.kappa = q.kappa + 1;
  next.eta = policy.upper();
  return next;
}

EventTriggeredModel make_clock_model(const NcsSystem& sys, const Protocol& protocol,
                                     const ClockPolicy& policy) {
  sys.validate();
  policy.validate();
  EventTriggeredModel m;
  m.policy = "clock";
  m.layout = {sys.n_x(), sys.n_e(), false};
  m.eta0 = policy.upper();
  const StateLayout layout = m.layout;
  const double lower = policy.lower();

  m.flow = [sys, policy, layout](const Vector& q) {
    const Vector x = layout.x(q);
    const Vector e = layout.e(q);
    const ClosedLoopRates r = closed_loop_flow(sys, x, e);
    const double eta = layout.eta(q);
    Vector dq(layout.size());
    dq.head(layout.n_x) = r.x_dot;
    dq.segment(layout.n_x, layout.n_e) = r.e_dot;
    dq[layout.kappa_index()] = 0.0;
    dq[layout.eta_index()] = -2.0 * eta * policy.L(x, e) - eta * eta - policy.G(x, e);
    return dq;
  };
  m.jump = [policy, protocol, layout](const Vector& q) {
    return pack(clock_jump(unpack(q, layout), policy, protocol), layout);
  };
  m.guard = [layout, lower](const Vector& q) { return lower - layout.eta(q); };

  TriggerFunction decay;
  decay.name = "lower - eta";
  decay.value = m.guard;
  decay.gradient = [layout](const Vector&) {
    Vector g = Vector::Zero(layout.size());
    g[layout.eta_index()] = -1.0;
    return g;
  };
  m.triggers = {decay};
  return m;
}

}  // namespace ncs
