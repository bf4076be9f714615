#pragma once

/**
 * @file hybrid.hpp
 * @brief Flow/jump integration of hybrid systems
 *
 * A hybrid system flows along `flow` while `guard < 0` and applies `jump`
 * once the guard reaches zero. The flow is integrated with an adaptive
 * Dormand-Prince 5(4) pair; guard crossings are localized on the dense
 * output to within `event_time_tol`.
 */

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace ncs {

using Vector = Eigen::VectorXd;

/// A point (t, j) of a hybrid time domain.
struct HybridTime {
  double t = 0.0;
  std::uint64_t j = 0;

  friend bool operator==(const HybridTime&, const HybridTime&) = default;
};

/// (t, j) precedes-or-equals (t', j') on a hybrid time domain.
inline bool precedes(const HybridTime& a, const HybridTime& b) { return a.t <= b.t && a.j <= b.j; }

struct HybridSystem {
  std::function<Vector(const Vector&)> flow;
  std::function<Vector(const Vector&)> jump;
  /// Negative inside C \ D, zero on the boundary, positive inside D \ C.
  std::function<double(const Vector&)> guard;
  Eigen::Index state_dim = 0;
};

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 1e-3;
  double event_time_tol = 1e-9;
  double horizon = 1.0;
  std::uint64_t max_jumps = 10'000'000;
  std::uint64_t max_consecutive_jumps = 8;
  /// Keep one sample per accepted step. When false only the segment
  /// endpoints are stored (long runs that only need summaries).
  bool record_steps = true;

  /// Throws ConfigError when a tolerance is non-positive.
  void validate() const;
};

struct Sample {
  double t = 0.0;
  Vector state;
};

/// One flow arc between two jumps.
struct FlowSegment {
  HybridTime start;
  std::vector<Sample> samples;
};

struct JumpRecord {
  HybridTime time;  ///< hybrid time of the pre-jump state
  Vector pre;
  Vector post;
  /// Guard at the pre-jump state and the width of the guard bracket the
  /// localization ended with: |guard_pre| <= guard_bracket for flow hits.
  double guard_pre = 0.0;
  double guard_bracket = 0.0;
  bool from_flow = true;
};

enum class StopReason { Horizon, MaxJumps };

struct HybridTrajectory {
  std::vector<FlowSegment> segments;
  std::vector<JumpRecord> jumps;
  StopReason stop = StopReason::Horizon;

  const Vector& final_state() const { return segments.back().samples.back().state; }
  double final_time() const { return segments.back().samples.back().t; }
};

/// Result of flowing from one state until the guard fires or time runs out.
struct FlowArc {
  std::vector<Sample> samples;  ///< first sample is the initial state
  bool hit = false;
  /// |guard(t_hi) - guard(t_lo)| of the final localization bracket.
  double guard_bracket = 0.0;
};

/// Integrates q' = flow(q) from `t0` until the guard crosses zero or the
/// configured horizon (absolute time) is reached.
FlowArc integrate_flow(const Vector& state, const HybridSystem& system,
                       const IntegratorConfig& config, double t0 = 0.0);

/// Alternates flows and jumps from `initial` over [0, horizon].
/// Throws ConsecutiveJumpOverflow when the jump map keeps the state in D.
HybridTrajectory simulate_hybrid(const HybridSystem& system, const Vector& initial,
                                 const IntegratorConfig& config);

/// Durations between consecutive jumps, the first measured from t = 0.
std::vector<double> inter_jump_intervals(const HybridTrajectory& traj);

}  // namespace ncs
