#pragma once

/**
 * @file monitor.hpp
 * @brief Runtime checks of Lyapunov certificates along simulated trajectories
 *
 * R is checked in sampled form: non-increasing between consecutive flow
 * samples (up to a relative tolerance), strictly lower at the end of every
 * flow segment than at its start, and non-increasing across each jump.
 */

#include "ncs/hybrid.hpp"
#include "ncs/model.hpp"
#include "ncs/polynomial.hpp"
#include "ncs/protocols.hpp"
#include "ncs/triggers.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ncs {

struct MonitorTolerance {
  double rel = 1e-6;
  double abs = 1e-10;
};

enum class CertificateKind { Threshold, Clock };

struct LyapunovSpec {
  CertificateKind kind = CertificateKind::Threshold;
  StateLayout layout;
  SmoothFunction lyapunov;
  Protocol protocol;
  Polynomial gamma_tilde;  ///< threshold certificate only

  /// max{V(x), gamma_tilde(W), eta} or V(x) + eta W^2.
  double R(const Vector& q) const;
};

LyapunovSpec threshold_certificate(const StateLayout& layout, const SmoothFunction& V,
                                   const Polynomial& gamma_tilde, const Protocol& protocol);
LyapunovSpec clock_certificate(const StateLayout& layout, const SmoothFunction& V,
                               const Protocol& protocol);

struct JumpViolation {
  std::size_t jump_index = 0;
  double increase = 0.0;  ///< R(q+) - R(q)
};

struct FlowViolation {
  HybridTime time;
  double increase = 0.0;
};

std::vector<JumpViolation> check_jump_nonincrease(const HybridTrajectory& traj,
                                                  const LyapunovSpec& spec,
                                                  const MonitorTolerance& tol = {});

std::vector<FlowViolation> check_flow_decrease(const HybridTrajectory& traj,
                                               const LyapunovSpec& spec,
                                               const MonitorTolerance& tol = {});

struct IssViolation {
  Vector x;
  Vector e;
  double slack = 0.0;
};

struct IssReport {
  std::size_t samples = 0;
  /// max over samples of <grad V, f_x> + alpha(V) - gamma(|e|); <= 0 when the bound holds.
  double worst_slack = 0.0;
  std::vector<IssViolation> violations;
};

/// Samples x and e uniformly in radius balls and checks
/// <grad V(x), f_x(x, e)> <= -alpha(V(x)) + gamma(|e|).
IssReport check_iss_inequality(const NcsSystem& sys, const SmoothFunction& V,
                               const Polynomial& alpha, const Polynomial& gamma,
                               std::size_t samples, double radius, std::uint64_t seed);

struct DwellReport {
  /// Bucket i counts intervals in [edges[i-1], edges[i]); first and last are open-ended.
  static constexpr std::array<double, 7> edges{1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};

  double min = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
  std::array<std::size_t, edges.size() + 1> histogram{};
};

DwellReport dwell_time_report(const HybridTrajectory& traj);

struct MonitorReport {
  std::vector<FlowViolation> flow_violations;
  std::vector<JumpViolation> jump_violations;
  DwellReport dwell;
  bool converged = false;
  double final_norm = 0.0;

  bool clean() const { return flow_violations.empty() && jump_violations.empty(); }
};

/// Runs both certificate checks and the dwell-time statistics; the run
/// counts as converged when |x| < 0.01 at the final time.
MonitorReport monitor_trajectory(const HybridTrajectory& traj, const LyapunovSpec& spec,
                                 const MonitorTolerance& tol = {});

}  // namespace ncs
