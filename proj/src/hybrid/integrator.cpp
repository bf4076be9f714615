#include "ncs/hybrid.hpp"

#include "ncs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncs {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer & Wanner, dopri5 contd5).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

bool all_finite(const Vector& v) { return v.allFinite(); }

double scaled_norm(const Vector& v, const Vector& y0, const Vector& y1, const IntegratorConfig& c) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sc = c.abs_tol + c.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = v[i] / sc;
    acc += r * r;
  }
  return v.size() == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(v.size()));
}

double initial_step(const HybridSystem& sys, const Vector& y0, const Vector& f0,
                    const IntegratorConfig& c) {
  const double d0 = scaled_norm(y0, y0, y0, c);
  const double d1n = scaled_norm(f0, y0, y0, c);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, c.max_step);
  const Vector y1 = y0 + h0 * f0;
  const Vector f1 = sys.flow(y1);
  const double d2 = scaled_norm(f1 - f0, y0, y0, c) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, c.max_step});
}

// Dense output of one accepted step.
struct DenseStep {
  Vector r0, r1, r2, r3, r4;

  Vector at(double theta) const {
    const double th1 = 1.0 - theta;
    return r0 + theta * (r1 + th1 * (r2 + theta * (r3 + th1 * r4)));
  }
};

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0) || !(max_step > 0) || !(event_time_tol > 0))
    throw ConfigError("integrator tolerances and max_step must be strictly positive");
  if (!(horizon > 0)) throw ConfigError("integrator horizon must be strictly positive");
  if (max_consecutive_jumps == 0) throw ConfigError("max_consecutive_jumps must be >= 1");
}

FlowArc integrate_flow(const Vector& state, const HybridSystem& system,
                       const IntegratorConfig& config, double t0) {
  config.validate();
  if (state.size() != system.state_dim)
    throw DimensionMismatch("integrate_flow: state has dimension " + std::to_string(state.size()) +
                            ", system expects " + std::to_string(system.state_dim));
  if (!all_finite(state)) throw NonFiniteState("integrate_flow: non-finite initial state");

  FlowArc arc;
  arc.samples.push_back({t0, state});

  if (system.guard(state) >= 0.0) {
    arc.hit = true;
    return arc;
  }
  if (t0 >= config.horizon) return arc;

  double t = t0;
  Vector y = state;
  Vector k1 = system.flow(y);
  if (!all_finite(k1)) throw NonFiniteState("integrate_flow: non-finite derivative");
  double h = initial_step(system, y, k1, config);
  double g_prev = system.guard(y);
  bool last_rejected = false;

  while (true) {
    const double remaining = config.horizon - t;
    if (remaining <= 0.0) break;
    const bool final_step = h >= remaining;
    if (final_step) h = remaining;

    const Vector k2 = system.flow(y + h * (a21 * k1));
    const Vector k3 = system.flow(y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = system.flow(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = system.flow(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = system.flow(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vector k7 = system.flow(y1);
    const Vector err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const bool finite = all_finite(y1) && all_finite(k7);
    const double err = finite ? scaled_norm(err_vec, y, y1, config) : INFINITY;

    const double min_step = 1e-14 * std::max(1.0, std::abs(t));
    if (!(err <= 1.0)) {
      if (h <= min_step) {
        if (!finite) throw NonFiniteState("integrate_flow: state became non-finite at t = " +
                                          std::to_string(t));
        throw StepUnderflow("integrate_flow: step size underflow at t = " + std::to_string(t));
      }
      const double fac = finite ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.25;
      h *= fac;
      last_rejected = true;
      continue;
    }

    const double g1 = system.guard(y1);
    const double t1 = final_step ? config.horizon : t + h;
    if (g1 >= 0.0) {
      DenseStep dense;
      dense.r0 = y;
      dense.r1 = y1 - y;
      dense.r2 = h * k1 - dense.r1;
      dense.r3 = dense.r1 - h * k7 - dense.r2;
      dense.r4 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

      // Illinois iteration on the guard along the dense output, keeping a
      // sign bracket [lo, hi] with guard(lo) < 0 <= guard(hi).
      double lo = 0.0, hi = 1.0, g_lo = g_prev, g_hi = g1;
      Vector y_hi = y1;
      int side = 0;
      for (int it = 0; it < 200 && (hi - lo) * h > config.event_time_tol && g_hi > 0.0; ++it) {
        double m = hi - g_hi * (hi - lo) / (g_hi - g_lo);
        if (!(m > lo && m < hi) || it % 4 == 3) m = 0.5 * (lo + hi);
        const Vector ym = dense.at(m);
        const double gm = system.guard(ym);
        if (gm >= 0.0) {
          hi = m;
          g_hi = gm;
          y_hi = ym;
          if (side == +1) g_lo *= 0.5;
          side = +1;
        } else {
          lo = m;
          g_lo = gm;
          if (side == -1) g_hi *= 0.5;
          side = -1;
        }
      }
      // Halving in the Illinois step rescales g_lo/g_hi; re-evaluate the bracket ends.
      const double g_hi_true = system.guard(y_hi);
      const double g_lo_true = lo == 0.0 ? g_prev : system.guard(dense.at(lo));
      arc.guard_bracket = std::abs(g_hi_true - g_lo_true);
      arc.samples.push_back({hi == 1.0 ? t1 : t + hi * h, y_hi});
      arc.hit = true;
      return arc;
    }

    t = t1;
    y = y1;
    k1 = k7;
    g_prev = g1;
    if (config.record_steps || final_step) arc.samples.push_back({t, y});
    if (final_step) break;

    double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    h = std::min(h * fac, config.max_step);
  }

  if (arc.samples.back().t != t) arc.samples.push_back({t, y});
  return arc;
}

}  // namespace ncs
