#include "ncs/errors.hpp"
#include "ncs/hybrid.hpp"

#include <string>
#include <utility>

namespace ncs {

HybridTrajectory simulate_hybrid(const HybridSystem& system, const Vector& initial,
                                 const IntegratorConfig& config) {
  config.validate();
  HybridTrajectory traj;
  Vector state = initial;
  HybridTime now{0.0, 0};
  std::uint64_t consecutive = 0;

  while (true) {
    FlowArc arc = integrate_flow(state, system, config, now.t);
    const double t_end = arc.samples.back().t;
    if (t_end > now.t) consecutive = 0;
    const bool flowed = arc.samples.size() > 1;
    const double bracket = arc.guard_bracket;
    traj.segments.push_back({now, std::move(arc.samples)});

    if (!arc.hit) {
      traj.stop = StopReason::Horizon;
      return traj;
    }
    if (traj.jumps.size() >= config.max_jumps) {
      traj.stop = StopReason::MaxJumps;
      return traj;
    }

    const Vector& pre = traj.segments.back().samples.back().state;
    Vector post = system.jump(pre);
    if (post.size() != system.state_dim)
      throw DimensionMismatch("jump map returned dimension " + std::to_string(post.size()));
    if (!post.allFinite()) throw NonFiniteState("jump map produced a non-finite state");

    now.t = t_end;
    traj.jumps.push_back({now, pre, post, system.guard(pre), bracket, flowed});

    if (++consecutive > config.max_consecutive_jumps)
      throw ConsecutiveJumpOverflow(now.t, traj.jumps.size());

    ++now.j;
    state = std::move(post);
  }
}

std::vector<double> inter_jump_intervals(const HybridTrajectory& traj) {
  if (traj.jumps.empty()) throw EmptyTrajectory();
  std::vector<double> out;
  out.reserve(traj.jumps.size());
  double prev = 0.0;
  for (const auto& jump : traj.jumps) {
    out.push_back(jump.time.t - prev);
    prev = jump.time.t;
  }
  return out;
}

}  // namespace ncs
