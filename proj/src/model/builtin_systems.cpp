#include "ncs/model.hpp"

#include <cmath>

namespace ncs {

NcsSystem jet_engine_system() {
  NcsSystem sys;
  sys.plant.n_p = 2;
  sys.plant.n_u = 1;
  sys.plant.f = [](const Vector& x, const Vector& u) {
    Vector dx(2);
    dx[0] = -x[1] - 1.5 * x[0] * x[0] - 0.5 * x[0] * x[0] * x[0];
    dx[1] = u[0];
    return dx;
  };
  sys.controller.n_c = 0;
  sys.controller.f = [](const Vector&, const Vector&) { return Vector(0); };
  sys.controller.g = [](const Vector&, const Vector& xh) {
    Vector u(1);
    u[0] = 4.0 * xh[0] - 4.0 * xh[1] - 4.5 * xh[0] * xh[0] - 1.5 * xh[0] * xh[0] * xh[0];
    return u;
  };
  sys.controller.dg_dxc = [](const Vector&, const Vector&) { return Eigen::MatrixXd(1, 0); };
  sys.controller.dg_dxhat = [](const Vector&, const Vector& xh) {
    Eigen::MatrixXd j(1, 2);
    j << 4.0 - 9.0 * xh[0] - 4.5 * xh[0] * xh[0], -4.0;
    return j;
  };
  sys.partition = NodePartition({1, 1});
  sys.networked_input = false;
  return sys;
}

JetEngineDesign jet_engine_design() {
  JetEngineDesign d;
  d.lyapunov.value = [](const Vector& x) {
    const double s = x[1] - 3.0 * x[0];
    return 0.5 * x[0] * x[0] + 0.5 * s * s;
  };
  d.lyapunov.gradient = [](const Vector& x) {
    Vector g(2);
    g << 10.0 * x[0] - 3.0 * x[1], x[1] - 3.0 * x[0];
    return g;
  };
  d.alpha = Polynomial({0.0, 0.066});
  d.gamma = Polynomial({0.0, 0.0, 4.37e4, 0.0, 9.10e6});
  d.gamma_tilde = Polynomial({0.0, 0.0, 7.34e5, 0.0, 1.52e8});
  d.delta = Polynomial({0.0, 0.01});
  d.sigma_eta = {-8.06e3, -226.07, 481.76, -258.47};
  d.sigma_lyap = {-1.46e3, -1.21e3, 4.94e3};
  return d;
}

NcsSystem scalar_clock_fixture() {
  NcsSystem sys;
  sys.plant.n_p = 1;
  sys.plant.n_u = 1;
  sys.plant.f = [](const Vector&, const Vector& u) { return Vector(u); };
  sys.controller.n_c = 0;
  sys.controller.f = [](const Vector&, const Vector&) { return Vector(0); };
  sys.controller.g = [](const Vector&, const Vector& xh) { return Vector(-2.0 * xh); };
  sys.controller.dg_dxc = [](const Vector&, const Vector&) { return Eigen::MatrixXd(1, 0); };
  sys.controller.dg_dxhat = [](const Vector&, const Vector&) {
    return Eigen::MatrixXd::Constant(1, 1, -2.0);
  };
  sys.partition = NodePartition({1, 1});
  sys.networked_input = true;
  return sys;
}

ScalarClockDesign scalar_clock_design() {
  // x' = -2x - 2e1 + e2, so |x' | <= 2|x| + sqrt(5)|e|. With V = c x^2 and
  // 2 c sqrt(5)|x||e| <= c (2 x^2 + 5/2 |e|^2), c = 9/4 gives
  // V' <= -9/2 x^2 + 45/8 |e|^2 = -x^2/2 - |e|^2/2 - (2x)^2 + 49/8 |e|^2.
  ScalarClockDesign d;
  d.lyapunov.value = [](const Vector& x) { return 2.25 * x[0] * x[0]; };
  d.lyapunov.gradient = [](const Vector& x) { return Vector(4.5 * x); };
  d.L = std::sqrt(5.0);
  d.G = 49.0 / 8.0;
  d.H = [](const Vector& x) { return 2.0 * std::abs(x[0]); };
  d.a = 1.0;
  return d;
}

}  // namespace ncs
