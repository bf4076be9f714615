#include "ncs/errors.hpp"
#include "ncs/triggers.hpp"

#include <algorithm>
#include <string>

namespace ncs {

namespace {

double predict_interval(const EventTriggeredModel& base, const SelfTriggeredPolicy& policy,
                        const Vector& q) {
  std::vector<int> orders;
  for (const auto& sigma : policy.sigma) orders.push_back(static_cast<int>(sigma.size()));
  const auto lie = lie_table(base.triggers, base.flow, q, orders);
  double tau = policy.epsilon;
  for (std::size_t i = 0; i < lie.size(); ++i)
    tau = std::max(tau, solve_next_time(lie[i], policy.sigma[i], policy.t_star, policy.epsilon).tau);
  return tau;
}

}  // namespace

double SelfTriggeredModel::next_interval(const Vector& q) const {
  return predict_interval(base, policy, q);
}

Vector SelfTriggeredModel::initial_state(const Vector& x0) const {
  const Vector q0 = base.initial_state(x0);
  Vector out(layout.size());
  out.head(q0.size()) = q0;
  out[layout.tau1_index()] = 0.0;
  out[layout.tau2_index()] = next_interval(q0);
  return out;
}

SelfTriggeredModel self_triggered_wrap(const EventTriggeredModel& base,
                                       const SelfTriggeredPolicy& policy) {
  if (base.triggers.empty())
    throw ConfigError("policy '" + base.policy + "' exposes no smooth triggering function");
  if (policy.sigma.size() != base.triggers.size())
    throw ConfigError("self-trigger: expected " + std::to_string(base.triggers.size()) +
                      " coefficient lists, got " + std::to_string(policy.sigma.size()));
  for (const auto& s : policy.sigma)
    if (s.size() < 2 || s.size() > 7)
      throw ConfigError("self-trigger: each coefficient list needs 2 to 7 entries");
  if (!(policy.t_star > 0.0) || !(policy.epsilon > 0.0))
    throw ConfigError("self-trigger: t_star and epsilon must be positive");

  SelfTriggeredModel m;
  m.base = base;
  m.policy = policy;
  m.layout = base.layout;
  m.layout.clocks = true;
  const StateLayout layout = m.layout;
  const Eigen::Index nb = base.layout.size();

  m.system.state_dim = layout.size();
  m.system.flow = [base, layout, nb](const Vector& q) {
    Vector dq(layout.size());
    dq.head(nb) = base.flow(q.head(nb));
    dq[layout.tau1_index()] = 1.0;
    dq[layout.tau2_index()] = 0.0;
    return dq;
  };
  m.system.guard = [layout](const Vector& q) {
    return q[layout.tau1_index()] - q[layout.tau2_index()];
  };
  m.system.jump = [base, policy, layout, nb](const Vector& q) {
    Vector next(layout.size());
    const Vector q_plus = base.jump(q.head(nb));
    next.head(nb) = q_plus;
    next[layout.tau1_index()] = 0.0;
    next[layout.tau2_index()] = predict_interval(base, policy, q_plus);
    return next;
  };
  return m;
}

}  // namespace ncs
