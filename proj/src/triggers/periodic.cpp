#include "ncs/errors.hpp"
#include "ncs/triggers.hpp"

namespace ncs {

EventTriggeredModel make_periodic_model(const NcsSystem& sys, const Protocol& protocol,
                                        const PeriodicPolicy& policy) {
  sys.validate();
  if (!(policy.period > 0.0)) throw ConfigError("periodic policy: period must be positive");
  EventTriggeredModel m;
  m.policy = "periodic";
  m.layout = {sys.n_x(), sys.n_e(), false};
  m.eta0 = 0.0;
  const StateLayout layout = m.layout;
  const double period = policy.period;

  m.flow = [sys, layout](const Vector& q) {
    const ClosedLoopRates r = closed_loop_flow(sys, layout.x(q), layout.e(q));
    Vector dq(layout.size());
    dq.head(layout.n_x) = r.x_dot;
    dq.segment(layout.n_x, layout.n_e) = r.e_dot;
    dq[layout.kappa_index()] = 0.0;
    dq[layout.eta_index()] = 1.0;
    return dq;
  };
  m.jump = [protocol, layout](const Vector& q) {
    NcsState s = unpack(q, layout);
    s.e = protocol.jump(s.kappa, s.e);
    ++s.kappa;
    s.eta = 0.0;
    return pack(s, layout);
  };
  m.guard = [layout, period](const Vector& q) { return layout.eta(q) - period; };
  return m;
}

}  // namespace ncs
