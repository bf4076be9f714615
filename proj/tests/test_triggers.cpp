#include "ncs/errors.hpp"
#include "ncs/triggers.hpp"
#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using ncs::Vector;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

const ncs::NodePartition kTwo({1, 1});

ncs::ThresholdPolicy jet_threshold() {
  const auto d = ncs::jet_engine_design();
  return {d.gamma_tilde, d.delta, d.eta0, d.lyapunov};
}

ncs::NcsState state(const Vector& x, const Vector& e, double eta, std::uint64_t kappa = 0) {
  ncs::NcsState s;
  s.x = x;
  s.e = e;
  s.eta = eta;
  s.kappa = kappa;
  return s;
}

ncs::ClockPolicy scalar_clock_policy() {
  const auto d = ncs::scalar_clock_design();
  ncs::ClockPolicy cp;
  cp.L = [L = d.L](const Vector&, const Vector&) { return L; };
  cp.G = [G = d.G](const Vector&, const Vector&) { return G; };
  cp.a = d.a;
  cp.rho = 1.0 / std::sqrt(2.0);
  return cp;
}

// Time for eta' = -(2 L eta + eta^2 + G) to fall from hi to lo.
double clock_fall_time(double L, double G, double lo, double hi) {
  auto integrand = [&](double eta) { return 1.0 / (2 * L * eta + eta * eta + G); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15,
                                                                        1e-14);
}

ncs::HybridTrajectory jet_threshold_run(double horizon) {
  const auto model = ncs::make_threshold_model(ncs::jet_engine_system(),
                                               ncs::make_tod_protocol(kTwo), jet_threshold());
  ncs::IntegratorConfig cfg;
  cfg.horizon = horizon;
  return ncs::simulate_hybrid(model.system(), model.initial_state(v2(0.95, -0.14)), cfg);
}

}  // namespace

TEST(StateLayout, PackUnpackRoundTrip) {
  const ncs::StateLayout layout{2, 2, true};
  ncs::NcsState s = state(v2(1, 2), v2(3, 4), 5.0, 7);
  s.tau1 = 0.1;
  s.tau2 = 0.2;
  const Vector q = ncs::pack(s, layout);
  EXPECT_EQ(q.size(), 8);
  const ncs::NcsState back = ncs::unpack(q, layout);
  EXPECT_EQ(back.x, s.x);
  EXPECT_EQ(back.e, s.e);
  EXPECT_EQ(back.kappa, 7u);
  EXPECT_EQ(back.eta, 5.0);
  EXPECT_EQ(back.tau1, 0.1);
  EXPECT_EQ(back.tau2, 0.2);
}

// ---------------------------------------------------------------------------

TEST(ThresholdGuard, ZeroErrorIsStrictlyInC) {
  const auto p = jet_threshold();
  const auto tod = ncs::make_tod_protocol(kTwo);
  const Vector x = v2(0.5, 0.2);
  const double v = p.lyapunov.value(x);
  EXPECT_DOUBLE_EQ(ncs::threshold_guard(state(x, v2(0, 0), 0.1), p, tod), -std::max(v, 0.1));
}

TEST(ThresholdGuard, BoundaryWhenGainEqualsMax) {
  const auto p = jet_threshold();
  const auto tod = ncs::make_tod_protocol(kTwo);
  // V(0, 2) = 2; pick |e| with gamma_tilde(|e|) = 2.
  const std::vector<double> c{-2.0, 0.0, 7.34e5, 0.0, 1.52e8};
  const double w = *ncs::smallest_positive_root(c);
  EXPECT_NEAR(ncs::threshold_guard(state(v2(0, 2), v2(w, 0), 1.0), p, tod), 0.0, 1e-12);
}

TEST(ThresholdGuard, PublishedGainAtOneMillimetre) {
  const auto p = jet_threshold();
  const auto tod = ncs::make_tod_protocol(kTwo);
  // V(0, sqrt 2) = 1.
  const double g = ncs::threshold_guard(state(v2(0, std::sqrt(2.0)), v2(1e-3, 0), 0.0), p, tod);
  EXPECT_NEAR(g, 0.734152 - 1.0, 1e-12);
}

TEST(ThresholdJump, ZeroErrorResetsEta) {
  const auto next = ncs::threshold_jump(state(v2(1, 1), v2(0, 0), 3.0, 4), jet_threshold(),
                                        ncs::make_tod_protocol(kTwo));
  EXPECT_EQ(next.eta, 0.0);
  EXPECT_EQ(next.e, v2(0, 0));
  EXPECT_EQ(next.kappa, 5u);
  EXPECT_EQ(next.x, v2(1, 1));
}

TEST(ThresholdJump, TieCase) {
  const auto p = jet_threshold();
  const auto tod = ncs::make_tod_protocol(kTwo);
  const auto next = ncs::threshold_jump(state(v2(0, 0), v2(0.5, 0.5), 0.0), p, tod);
  EXPECT_DOUBLE_EQ(next.eta, p.gamma_tilde(std::sqrt(0.5)));
  EXPECT_EQ(next.e, v2(0, 0.5));
  EXPECT_LT(p.gamma_tilde(0.5), next.eta);
}

TEST(ThresholdModel, JumpsLandInCAndEtaBehaves) {
  const auto traj = jet_threshold_run(2.0);
  const auto model = ncs::make_threshold_model(ncs::jet_engine_system(),
                                               ncs::make_tod_protocol(kTwo), jet_threshold());
  ASSERT_GT(traj.jumps.size(), 5u);
  for (const auto& jr : traj.jumps) EXPECT_LE(model.guard(jr.post), 1e-9);
  for (const auto& seg : traj.segments) {
    for (std::size_t i = 0; i < seg.samples.size(); ++i) {
      const double eta = model.layout.eta(seg.samples[i].state);
      EXPECT_GE(eta, 0.0);
      if (i > 0) EXPECT_LE(eta, model.layout.eta(seg.samples[i - 1].state));
    }
  }
}

TEST(ThresholdModel, TriggerGradientsMatchFiniteDifferences) {
  const auto model = ncs::make_threshold_model(ncs::jet_engine_system(),
                                               ncs::make_tod_protocol(kTwo), jet_threshold());
  Vector q(6);
  q << 0.4, -0.2, 0.003, -0.001, 0.0, 2.5;
  for (const auto& trig : model.triggers) {
    ASSERT_TRUE(trig.gradient) << trig.name;
    const Vector g = trig.gradient(q);
    for (Eigen::Index i : {0, 1, 2, 3, 5}) {
      const double h = 1e-7 * (1 + std::abs(q[i]));
      Vector up = q, dn = q;
      up[i] += h;
      dn[i] -= h;
      const double fd = (trig.value(up) - trig.value(dn)) / (2 * h);
      EXPECT_NEAR(g[i], fd, 1e-5 * (1 + std::abs(fd))) << trig.name << " component " << i;
    }
  }
}

TEST(NaiveThreshold, RepeatedJumpsAbort) {
  const auto model = ncs::make_naive_threshold_model(
      ncs::jet_engine_system(), ncs::make_tod_protocol(kTwo), jet_threshold());
  Vector q0 = model.initial_state(v2(0, 0));
  q0.segment(2, 2) = v2(0.1, 0.1);
  EXPECT_THROW(ncs::simulate_hybrid(model.system(), q0, {}), ncs::ConsecutiveJumpOverflow);
}

TEST(ThresholdModel, NeedsCertificate) {
  EXPECT_THROW(ncs::make_threshold_model(ncs::jet_engine_system(), ncs::make_rr_protocol(kTwo),
                                         jet_threshold()),
               ncs::ConfigError);
}

// ---------------------------------------------------------------------------

TEST(ClockPolicy, RangeFromRho) {
  const auto cp = scalar_clock_policy();
  EXPECT_NEAR(cp.lower(), 0.5, 1e-15);
  EXPECT_EQ(cp.upper(), 1.0);
  EXPECT_NO_THROW(cp.validate());
}

TEST(ClockPolicy, RhoZeroUsesRange) {
  auto cp = scalar_clock_policy();
  cp.rho = 0.0;
  EXPECT_THROW(cp.validate(), ncs::ConfigError);
  cp.rho_zero_range = std::make_pair(0.5, 1.0);
  EXPECT_NO_THROW(cp.validate());
  const auto tod = ncs::make_tod_protocol(kTwo);
  EXPECT_DOUBLE_EQ(ncs::clock_guard(state(Vector::Zero(1), v2(0, 0), 0.8), cp, tod), 0.5 - 0.8);
  EXPECT_EQ(ncs::clock_jump(state(Vector::Zero(1), v2(0, 0), 0.5), cp, tod).eta, 1.0);
}

TEST(ClockPolicy, InvalidParameters) {
  auto cp = scalar_clock_policy();
  cp.a = 0.5;
  EXPECT_THROW(cp.validate(), ncs::ConfigError);
  cp = scalar_clock_policy();
  cp.rho = 1.0;
  EXPECT_THROW(cp.validate(), ncs::ConfigError);
}

TEST(ClockPolicy, OutOfRangeEtaThrows) {
  const auto cp = scalar_clock_policy();
  const auto tod = ncs::make_tod_protocol(kTwo);
  EXPECT_THROW(ncs::clock_guard(state(Vector::Zero(1), v2(0, 0), 1.5), cp, tod),
               ncs::EtaOutOfRange);
  EXPECT_THROW(ncs::clock_guard(state(Vector::Zero(1), v2(0, 0), 0.2), cp, tod),
               ncs::EtaOutOfRange);
}

TEST(ClockPolicy, JumpResetsToA) {
  const auto cp = scalar_clock_policy();
  const auto next = ncs::clock_jump(state(Vector::Constant(1, 0.3), v2(0.2, -0.1), 0.5, 2), cp,
                                    ncs::make_tod_protocol(kTwo));
  EXPECT_EQ(next.eta, 1.0);
  EXPECT_EQ(next.e, v2(0, -0.1));
  EXPECT_EQ(next.kappa, 3u);
}

TEST(ClockModel, IntervalMatchesQuadrature) {
  const auto d = ncs::scalar_clock_design();
  const auto model = ncs::make_clock_model(ncs::scalar_clock_fixture(),
                                           ncs::make_tod_protocol(kTwo), scalar_clock_policy());
  ncs::IntegratorConfig cfg;
  cfg.horizon = 1.0;
  const auto traj = ncs::simulate_hybrid(model.system(),
                                         model.initial_state(Vector::Constant(1, 1.0)), cfg);
  const double expected = clock_fall_time(d.L, d.G, 0.5, 1.0);
  // Closed form with omega^2 = G - L^2 as a second check of the oracle.
  const double w = std::sqrt(d.G - d.L * d.L);
  EXPECT_NEAR(expected, (std::atan((1 + d.L) / w) - std::atan((0.5 + d.L) / w)) / w, 1e-14);
  const auto intervals = ncs::inter_jump_intervals(traj);
  ASSERT_GE(intervals.size(), 15u);
  for (double t : intervals) EXPECT_NEAR(t, expected, 1e-6 * expected);
}

TEST(ClockModel, EtaStaysInRangeAndDecreases) {
  const auto cp = scalar_clock_policy();
  const auto model =
      ncs::make_clock_model(ncs::scalar_clock_fixture(), ncs::make_tod_protocol(kTwo), cp);
  const auto traj = ncs::simulate_hybrid(model.system(),
                                         model.initial_state(Vector::Constant(1, -0.7)), {});
  for (const auto& seg : traj.segments)
    for (std::size_t i = 0; i < seg.samples.size(); ++i) {
      const double eta = model.layout.eta(seg.samples[i].state);
      EXPECT_GE(eta, cp.lower() - 1e-8);
      EXPECT_LE(eta, cp.upper());
      if (i > 0) EXPECT_LT(eta, model.layout.eta(seg.samples[i - 1].state));
    }
}

// ---------------------------------------------------------------------------

TEST(PeriodicModel, JumpsAtMultiplesOfPeriod) {
  const auto model = ncs::make_periodic_model(ncs::jet_engine_system(),
                                              ncs::make_tod_protocol(kTwo), {0.010});
  ncs::IntegratorConfig cfg;
  cfg.horizon = 1.0;
  const auto traj = ncs::simulate_hybrid(model.system(), model.initial_state(v2(0.95, -0.14)), cfg);
  ASSERT_GE(traj.jumps.size(), 99u);
  ASSERT_LE(traj.jumps.size(), 101u);
  for (std::size_t k = 0; k < traj.jumps.size(); ++k)
    EXPECT_NEAR(traj.jumps[k].time.t, 0.010 * static_cast<double>(k + 1),
                (k + 1) * cfg.event_time_tol);
}

// ---------------------------------------------------------------------------

TEST(SolveNextTime, LinearRoot) {
  const std::vector<double> g{-2.0, 1.0}, s{1.0, 1.0};
  const auto r = ncs::solve_next_time(g, s, 1e-3, 1e-4);
  ASSERT_TRUE(r.lambda);
  EXPECT_DOUBLE_EQ(*r.lambda, 2.0);
  EXPECT_DOUBLE_EQ(r.tau, 2e-3);
}

TEST(SolveNextTime, NoPositiveRootFallsBackToEpsilon) {
  const std::vector<double> g{-2.0, 1.0}, s{-1.0, 1.0};
  const auto r = ncs::solve_next_time(g, s, 1e-3, 1e-4);
  EXPECT_FALSE(r.lambda);
  EXPECT_EQ(r.tau, 1e-4);
}

TEST(SolveNextTime, FloorAppliesToSmallRoots) {
  const std::vector<double> g{-1e-3, 1.0}, s{1.0, 1.0};
  EXPECT_EQ(ncs::solve_next_time(g, s, 1e-3, 1e-4).tau, 1e-4);
}

TEST(SolveNextTime, DegenerateCoefficients) {
  const std::vector<double> g{0.0, 0.0, 0.0}, s{1.0, 2.0, 3.0};
  const auto r = ncs::solve_next_time(g, s, 1e-3, 1e-4);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.tau, 1e-4);
}

TEST(SolveNextTime, BadInputs) {
  const std::vector<double> g{1.0, 2.0}, s{1.0};
  EXPECT_THROW(ncs::solve_next_time(g, s, 1e-3, 1e-4), ncs::DimensionMismatch);
  const std::vector<double> s2{1.0, 1.0};
  EXPECT_THROW(ncs::solve_next_time(g, s2, 0.0, 1e-4), ncs::ConfigError);
}

// The returned root is a root and nothing smaller and positive is.
TEST(SolveNextTime, SmallestPositiveRootProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<int> n_dist(2, 5);
  int with_root = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = n_dist(rng);
    std::vector<double> g(n), s(n), c(n);
    for (int i = 0; i < n; ++i) {
      g[i] = u(rng);
      s[i] = u(rng);
      c[i] = g[i] * s[i];
    }
    const auto r = ncs::solve_next_time(g, s, 1.0, 1e-12);
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    const auto sweep = oracle::bisection_roots(c, 1e-9, 50.0, 200000);
    if (!r.lambda) {
      // Any oracle root must be a near-double root the sweep split in two, or none at all.
      EXPECT_TRUE(sweep.empty()) << "trial " << trial;
      continue;
    }
    ++with_root;
    const double lam = *r.lambda;
    EXPECT_LE(std::abs(oracle::horner(c, lam)),
              1e-9 * cmax * std::max(1.0, std::pow(lam, n - 1)));
    for (double w : sweep) EXPECT_GE(w, lam - 1e-6 * std::max(1.0, lam)) << "trial " << trial;
  }
  EXPECT_GT(with_root, 50);
}

// ---------------------------------------------------------------------------

TEST(LieValues, ThresholdVariableDecay) {
  const auto model = ncs::make_threshold_model(ncs::jet_engine_system(),
                                               ncs::make_tod_protocol(kTwo), jet_threshold());
  ncs::TriggerFunction eta_fn{"eta", [&](const Vector& q) { return model.layout.eta(q); }, {}};
  const Vector q = model.initial_state(v2(0.95, -0.14));
  const auto lie = ncs::lie_values(eta_fn, model.flow, q, 2);
  EXPECT_DOUBLE_EQ(lie[0], 5000.0);
  EXPECT_NEAR(lie[1], -50.0, 1e-6);
  // delta is linear, so L^k eta = (-0.01)^k eta. The numeric orders lose
  // digits to the size of eta itself (5000 differentiated on a ~1e-3 s grid).
  const auto lie4 = ncs::lie_values(eta_fn, model.flow, q, 4);
  EXPECT_NEAR(lie4[1], -50.0, 1e-6);
  EXPECT_NEAR(lie4[2], 0.5, 1e-3);
  EXPECT_NEAR(lie4[3], -0.005, 0.2);
}

TEST(LieValues, ConstantFunction) {
  ncs::TriggerFunction c{"c", [](const Vector&) { return 3.5; }, {}};
  const auto lie = ncs::lie_values(c, [](const Vector& q) { return Vector(-q); }, v2(1, 2), 4);
  EXPECT_EQ(lie[0], 3.5);
  for (int i = 1; i < 4; ++i) EXPECT_EQ(lie[i], 0.0);
}

TEST(LieValues, QuadraticAlongLinearFlow) {
  // Gamma = x^2, x' = -x: L^k Gamma = (-2)^k x^2.
  ncs::TriggerFunction sq{"x^2", [](const Vector& q) { return q.squaredNorm(); }, {}};
  const auto lie =
      ncs::lie_values(sq, [](const Vector& q) { return Vector(-q); }, Vector::Constant(1, 0.7), 4);
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(lie[k], std::pow(-2.0, k) * 0.49, 1e-6 * std::pow(2.0, k));
}

TEST(LieValues, LyapunovAlongJetFlowMatchesSimulation) {
  const auto d = ncs::jet_engine_design();
  const auto model = ncs::make_threshold_model(ncs::jet_engine_system(),
                                               ncs::make_tod_protocol(kTwo), jet_threshold());
  const ncs::StateLayout layout = model.layout;
  ncs::TriggerFunction V{"V", [&](const Vector& q) { return d.lyapunov.value(layout.x(q)); },
                         [&](const Vector& q) {
                           Vector g = Vector::Zero(layout.size());
                           g.head(2) = d.lyapunov.gradient(layout.x(q));
                           return g;
                         }};
  Vector q = model.initial_state(v2(1, 1));
  const auto lie = ncs::lie_values(V, model.flow, q, 2);
  // Finite difference of t -> V(x(t)) along RK4 flows forwards and backwards.
  const double h = 1e-4;
  const Vector fwd = oracle::rk4(model.flow, q, h, 1e-6);
  const Vector bwd = oracle::rk4([&](const Vector& p) { return Vector(-model.flow(p)); }, q, h, 1e-6);
  const double fd = (V.value(fwd) - V.value(bwd)) / (2 * h);
  EXPECT_NEAR(lie[1], fd, 1e-6 * std::abs(fd));
}

TEST(LieValues, KinkIsDetected) {
  // |x - 0.001| along x' = 1: the kink sits inside the sampling window.
  ncs::TriggerFunction kink{"kink", [](const Vector& q) { return std::abs(q[0] - 0.001); }, {}};
  EXPECT_THROW(ncs::lie_values(kink, [](const Vector&) { return Vector::Constant(1, 1.0).eval(); },
                               Vector::Constant(1, 0.0), 3),
               ncs::NonSmoothGuard);
}

TEST(LieValues, OrderLimits) {
  ncs::TriggerFunction c{"c", [](const Vector&) { return 1.0; }, {}};
  auto f = [](const Vector& q) { return Vector(-q); };
  EXPECT_THROW(ncs::lie_values(c, f, v2(1, 1), 0), ncs::DimensionMismatch);
  EXPECT_THROW(ncs::lie_values(c, f, v2(1, 1), 9), ncs::DimensionMismatch);
}

// ---------------------------------------------------------------------------

namespace {

ncs::SelfTriggeredModel scalar_self_clock() {
  const auto base = ncs::make_clock_model(ncs::scalar_clock_fixture(),
                                          ncs::make_tod_protocol(kTwo), scalar_clock_policy());
  return ncs::self_triggered_wrap(base, {{{1.0, 1.0}}, 1.0, 1e-4});
}

}  // namespace

TEST(SelfTriggered, IntervalsEqualPredictedTau) {
  const auto st = scalar_self_clock();
  ncs::IntegratorConfig cfg;
  cfg.horizon = 1.0;
  const Vector q0 = st.initial_state(Vector::Constant(1, 0.8));
  EXPECT_EQ(q0[st.layout.tau2_index()], st.next_interval(st.base_state(q0)));
  const auto traj = ncs::simulate_hybrid(st.system, q0, cfg);
  ASSERT_GT(traj.jumps.size(), 5u);
  double prev_t = 0.0, tau2 = q0[st.layout.tau2_index()];
  for (const auto& jr : traj.jumps) {
    EXPECT_NEAR(jr.time.t - prev_t, tau2, 2 * cfg.event_time_tol);
    EXPECT_GE(jr.time.t - prev_t, 1e-4 - 2 * cfg.event_time_tol);
    prev_t = jr.time.t;
    tau2 = jr.post[st.layout.tau2_index()];
    EXPECT_EQ(jr.post[st.layout.tau1_index()], 0.0);
  }
}

TEST(SelfTriggered, ClockPredictionIsConservative) {
  const auto st = scalar_self_clock();
  const auto d = ncs::scalar_clock_design();
  const double exact = clock_fall_time(d.L, d.G, 0.5, 1.0);
  const double tau = st.next_interval(st.base.initial_state(Vector::Constant(1, 0.3)));
  EXPECT_LE(tau, exact);
  // First-order prediction: (a - a rho^2) / (2 L a + a^2 + G).
  EXPECT_NEAR(tau, 0.5 / (2 * d.L + 1 + d.G), 1e-9);
  // The base guard never becomes positive on flows.
  const auto traj = ncs::simulate_hybrid(st.system, st.initial_state(Vector::Constant(1, 0.3)), {});
  for (const auto& seg : traj.segments)
    for (const auto& s : seg.samples) EXPECT_LE(st.base.guard(st.base_state(s.state)), 1e-9);
}

TEST(SelfTriggered, JetPredictionBelowEventCrossing) {
  const auto base = ncs::make_threshold_model(ncs::jet_engine_system(),
                                              ncs::make_tod_protocol(kTwo), jet_threshold());
  const auto d = ncs::jet_engine_design();
  const auto st = ncs::self_triggered_wrap(base, {{d.sigma_eta, d.sigma_lyap}, d.t_star, d.epsilon});
  const auto traj = jet_threshold_run(1.0);
  ncs::IntegratorConfig cfg;
  cfg.horizon = 5.0;
  for (std::size_t k = 0; k < std::min<std::size_t>(traj.jumps.size(), 10); ++k) {
    const Vector& q = traj.jumps[k].post;
    const ncs::FlowArc arc = ncs::integrate_flow(q, base.system(), cfg);
    const double crossing = arc.hit ? arc.samples.back().t : cfg.horizon;
    EXPECT_LE(st.next_interval(q), crossing + cfg.event_time_tol) << "jump " << k;
    EXPECT_GE(st.next_interval(q), d.epsilon);
  }
}

TEST(SelfTriggered, WrapValidatesCoefficients) {
  const auto base = ncs::make_threshold_model(ncs::jet_engine_system(),
                                              ncs::make_tod_protocol(kTwo), jet_threshold());
  EXPECT_THROW(ncs::self_triggered_wrap(base, {{{1.0, 1.0}}, 1e-3, 1e-4}), ncs::ConfigError);
  EXPECT_THROW(ncs::self_triggered_wrap(base, {{{1.0}, {1.0, 1.0}}, 1e-3, 1e-4}),
               ncs::ConfigError);
  const auto periodic = ncs::make_periodic_model(ncs::jet_engine_system(),
                                                 ncs::make_tod_protocol(kTwo), {0.01});
  EXPECT_THROW(ncs::self_triggered_wrap(periodic, {{}, 1e-3, 1e-4}), ncs::ConfigError);
}
