#include "ncs/monitor.hpp"

#include "ncs/errors.hpp"
#include "ncs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncs {

double LyapunovSpec::R(const Vector& q) const {
  const Vector x = layout.x(q);
  const Vector e = layout.e(q);
  const std::uint64_t kappa = layout.kappa(q);
  const double eta = layout.eta(q);
  const double v = lyapunov.value(x);
  const double w = protocol.W(kappa, e);
  if (kind == CertificateKind::Threshold) return std::max({v, gamma_tilde(w), eta});
  return v + eta * w * w;
}

LyapunovSpec threshold_certificate(const StateLayout& layout, const SmoothFunction& V,
                                   const Polynomial& gamma_tilde, const Protocol& protocol) {
  LyapunovSpec s;
  s.kind = CertificateKind::Threshold;
  s.layout = layout;
  s.lyapunov = V;
  s.protocol = protocol;
  s.gamma_tilde = gamma_tilde;
  return s;
}

LyapunovSpec clock_certificate(const StateLayout& layout, const SmoothFunction& V,
                               const Protocol& protocol) {
  LyapunovSpec s;
  s.kind = CertificateKind::Clock;
  s.layout = layout;
  s.lyapunov = V;
  s.protocol = protocol;
  return s;
}

std::vector<JumpViolation> check_jump_nonincrease(const HybridTrajectory& traj,
                                                  const LyapunovSpec& spec,
                                                  const MonitorTolerance& tol) {
  std::vector<JumpViolation> out;
  for (std::size_t k = 0; k < traj.jumps.size(); ++k) {
    const double before = spec.R(traj.jumps[k].pre);
    const double after = spec.R(traj.jumps[k].post);
    if (after > before * (1.0 + tol.rel) + tol.abs) out.push_back({k, after - before});
  }
  return out;
}

std::vector<FlowViolation> check_flow_decrease(const HybridTrajectory& traj,
                                               const LyapunovSpec& spec,
                                               const MonitorTolerance& tol) {
  // Below this level R is lost in integration noise and only the sampled
  // non-increase is checked.
  const double strict_floor = 1e3 * tol.abs;
  std::vector<FlowViolation> out;
  for (const FlowSegment& seg : traj.segments) {
    if (seg.samples.size() < 2) continue;
    std::vector<double> r;
    r.reserve(seg.samples.size());
    double scale = 0.0;
    for (const Sample& s : seg.samples) {
      r.push_back(spec.R(s.state));
      scale = std::max(scale, std::abs(r.back()));
    }
    const double slack = tol.rel * scale + tol.abs;
    for (std::size_t k = 1; k < r.size(); ++k) {
      if (r[k] - r[k - 1] > slack)
        out.push_back({{seg.samples[k].t, seg.start.j}, r[k] - r[k - 1]});
    }
    const double duration = seg.samples.back().t - seg.samples.front().t;
    if (duration > 0.0 && r.front() > strict_floor && r.back() >= r.front())
      out.push_back({{seg.samples.back().t, seg.start.j}, r.back() - r.front()});
  }
  return out;
}

IssReport check_iss_inequality(const NcsSystem& sys, const SmoothFunction& V,
                               const Polynomial& alpha, const Polynomial& gamma,
                               std::size_t samples, double radius, std::uint64_t seed) {
  sys.validate();
  IssReport report;
  report.worst_slack = -std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = sample_in_ball(rng, sys.n_x(), radius);
    const Vector e = sample_in_ball(rng, sys.n_e(), radius);
    const ClosedLoopRates rates = closed_loop_flow(sys, x, e);
    const double lhs = V.gradient(x).dot(rates.x_dot);
    const double rhs = -alpha(V.value(x)) + gamma(e.norm());
    const double slack = lhs - rhs;
    ++report.samples;
    report.worst_slack = std::max(report.worst_slack, slack);
    // Rounding allowance proportional to the size of the terms.
    const double noise = 1e-12 * (std::abs(lhs) + std::abs(rhs));
    if (slack > noise) report.violations.push_back({x, e, slack});
  }
  return report;
}

DwellReport dwell_time_report(const HybridTrajectory& traj) {
  const std::vector<double> intervals = inter_jump_intervals(traj);
  DwellReport d;
  d.count = intervals.size();
  d.min = *std::min_element(intervals.begin(), intervals.end());
  double sum = 0.0;
  for (double v : intervals) {
    sum += v;
    const auto it = std::upper_bound(DwellReport::edges.begin(), DwellReport::edges.end(), v);
    ++d.histogram[static_cast<std::size_t>(it - DwellReport::edges.begin())];
  }
  d.mean = sum / static_cast<double>(d.count);
  return d;
}

MonitorReport monitor_trajectory(const HybridTrajectory& traj, const LyapunovSpec& spec,
                                 const MonitorTolerance& tol) {
  MonitorReport r;
  r.flow_violations = check_flow_decrease(traj, spec, tol);
  r.jump_violations = check_jump_nonincrease(traj, spec, tol);
  if (!traj.jumps.empty()) r.dwell = dwell_time_report(traj);
  r.final_norm = spec.layout.x(traj.final_state()).norm();
  r.converged = r.final_norm < 0.01;
  return r;
}

}  // namespace ncs
