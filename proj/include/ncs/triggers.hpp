#pragma once

/**
 * @file triggers.hpp
 * @brief Transmission policies as hybrid models over q = (x, e, kappa, eta)
 *
 * Every policy yields an EventTriggeredModel: the flow f_q, the jump map
 * h_q and a scalar guard whose zero crossing triggers a transmission.
 * Policies with smooth triggering functions also expose them as
 * `triggers` (D is the set where all of them are non-negative), which the
 * self-triggered wrapper uses to predict the next crossing from Lie
 * derivatives evaluated right after each transmission.
 */

#include "ncs/hybrid.hpp"
#include "ncs/model.hpp"
#include "ncs/polynomial.hpp"
#include "ncs/protocols.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ncs {

/// Packing of the hybrid state into a flat vector:
/// [x (n_x) | e (n_e) | kappa | eta | tau1 tau2 (self-triggered only)].
/// kappa is stored as a double and is exact below 2^53.
struct StateLayout {
  Eigen::Index n_x = 0;
  Eigen::Index n_e = 0;
  bool clocks = false;

  Eigen::Index kappa_index() const { return n_x + n_e; }
  Eigen::Index eta_index() const { return n_x + n_e + 1; }
  Eigen::Index tau1_index() const { return n_x + n_e + 2; }
  Eigen::Index tau2_index() const { return n_x + n_e + 3; }
  Eigen::Index size() const { return n_x + n_e + (clocks ? 4 : 2); }

  Vector x(const Vector& q) const { return q.head(n_x); }
  Vector e(const Vector& q) const { return q.segment(n_x, n_e); }
  std::uint64_t kappa(const Vector& q) const {
    return static_cast<std::uint64_t>(q[kappa_index()]);
  }
  double eta(const Vector& q) const { return q[eta_index()]; }
};

struct NcsState {
  Vector x;
  Vector e;
  std::uint64_t kappa = 0;
  double eta = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

Vector pack(const NcsState& s, const StateLayout& layout);
NcsState unpack(const Vector& q, const StateLayout& layout);

/// A smooth triggering function Gamma(q); C = {Gamma <= 0}, D = {Gamma >= 0}.
struct TriggerFunction {
  std::string name;
  std::function<double(const Vector& q)> value;
  /// Gradient with respect to the packed q (kappa entry ignored); optional.
  std::function<Vector(const Vector& q)> gradient;
};

struct EventTriggeredModel {
  std::string policy;
  StateLayout layout;
  std::function<Vector(const Vector&)> flow;
  std::function<Vector(const Vector&)> jump;
  std::function<double(const Vector&)> guard;
  std::vector<TriggerFunction> triggers;
  double eta0 = 0.0;

  HybridSystem system() const { return {flow, jump, guard, layout.size()}; }
  /// (x0, e = 0, kappa = 0, eta = eta0).
  Vector initial_state(const Vector& x0) const;
};

// ---------------------------------------------------------------------------
// Threshold-variable trigger

struct ThresholdPolicy {
  Polynomial gamma_tilde;  ///< class-K_inf gain applied to W(kappa, e)
  Polynomial delta;        ///< eta' = -delta(eta)
  double eta0 = 0.0;
  SmoothFunction lyapunov;
};

/// gamma_tilde(W(kappa, e)) - max{V(x), eta}.
double threshold_guard(const NcsState& q, const ThresholdPolicy& policy, const Protocol& protocol);
/// x kept, e reset by the protocol, kappa + 1, eta = gamma_tilde(W) at the pre-jump state.
NcsState threshold_jump(const NcsState& q, const ThresholdPolicy& policy, const Protocol& protocol);

EventTriggeredModel make_threshold_model(const NcsSystem& sys, const Protocol& protocol,
                                         const ThresholdPolicy& policy);

/// Trigger on gamma_tilde(W) >= V(x) alone, without the threshold variable.
/// Only one node is reset per jump, so this may jump repeatedly at one instant.
EventTriggeredModel make_naive_threshold_model(const NcsSystem& sys, const Protocol& protocol,
                                               const ThresholdPolicy& policy);

// ---------------------------------------------------------------------------
// Clock-variable trigger

struct ClockPolicy {
  std::function<double(const Vector& x, const Vector& e)> L;
  std::function<double(const Vector& x, const Vector& e)> G;
  double a = 1.0;    ///< reset value, a > rho
  double rho = 0.0;  ///< protocol contraction factor
  /// Range [b, c] used instead of [a rho^2, a] when rho = 0.
  std::optional<std::pair<double, double>> rho_zero_range;
  double range_tol = 1e-8;

  double lower() const;
  double upper() const;
  /// Throws ConfigError on an inconsistent parameter set.
  void validate() const;
};

/// lower - eta; throws EtaOutOfRange when eta is outside [lower, upper] by more than range_tol.
double clock_guard(const NcsState& q, const ClockPolicy& policy, const Protocol& protocol);
NcsState clock_jump(const NcsState& q, const ClockPolicy& policy, const Protocol& protocol);

EventTriggeredModel make_clock_model(const NcsSystem& sys, const Protocol& protocol,
                                     const ClockPolicy& policy);

// ---------------------------------------------------------------------------
// Periodic baseline: eta is a clock reset at every transmission.

struct PeriodicPolicy {
  double period = 0.010;
};

EventTriggeredModel make_periodic_model(const NcsSystem& sys, const Protocol& protocol,
                                        const PeriodicPolicy& policy);

// ---------------------------------------------------------------------------
// Self-triggered emulation

struct SelfTriggeredPolicy {
  /// Coefficients per triggering function, in the model's `triggers` order.
  /// The polynomial order of trigger i is sigma[i].size().
  std::vector<std::vector<double>> sigma;
  double t_star = 1e-3;
  double epsilon = 1e-4;
};

struct NextTime {
  double tau = 0.0;
  std::optional<double> lambda;  ///< smallest positive root, when one exists
  bool degenerate = false;       ///< every sigma_i g_i vanished
};

/// tau = max{lambda t_star, epsilon} with lambda the smallest positive root of
/// sum_i sigma_i g_i lambda^i; epsilon when no positive root exists.
NextTime solve_next_time(std::span<const double> lie, std::span<const double> sigma,
                         double t_star, double epsilon);

/// [Gamma, L_f Gamma, ..., L_f^{n-1} Gamma] at q, 1 <= n <= 7. The first
/// derivative uses the gradient when available. Higher orders are the
/// derivatives of t -> Gamma(phi_t(q)) at 0, from 9-point stencils on an
/// RK4 trajectory at two grid spacings; NonSmoothGuard is thrown when the
/// two disagree by more than 1e-3 relative (and more than rounding noise).
std::vector<double> lie_values(const TriggerFunction& gamma,
                               const std::function<Vector(const Vector&)>& flow, const Vector& q,
                               int n);

/// lie_values for several functions at once, sharing one trajectory.
std::vector<std::vector<double>> lie_table(std::span<const TriggerFunction> gammas,
                                           const std::function<Vector(const Vector&)>& flow,
                                           const Vector& q, std::span<const int> orders);

struct SelfTriggeredModel {
  EventTriggeredModel base;
  SelfTriggeredPolicy policy;
  StateLayout layout;  ///< base layout with the two clocks
  HybridSystem system;

  /// Next inter-transmission time predicted from the base state q.
  double next_interval(const Vector& q) const;
  /// Base initial state extended with tau1 = 0 and tau2 = next_interval(q0).
  Vector initial_state(const Vector& x0) const;
  /// Drops the clocks.
  Vector base_state(const Vector& q_tilde) const { return q_tilde.head(base.layout.size()); }
};

SelfTriggeredModel self_triggered_wrap(const EventTriggeredModel& base,
                                       const SelfTriggeredPolicy& policy);

}  // namespace ncs
