#include "ncs/errors.hpp"
#include "ncs/triggers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace ncs {

namespace {

using VectorField = std::function<Vector(const Vector&)>;

// Derivatives of Gamma along the flow are the derivatives of
// g(t) = Gamma(phi_t(q)) at t = 0. g is sampled on a symmetric grid of
// 2M + 1 points with spacing s and, as a cross-check, s / 2; derivatives
// come from the interpolating polynomial through those points.
constexpr int kHalfWidth = 4;
constexpr int kPoints = 2 * kHalfWidth + 1;
constexpr int kSubsteps = 4;  // RK4 steps per coarse grid spacing

// Row k holds the weights of the k-th derivative at 0 on the integer grid
// -M..M (Fornberg's recurrence).
const Eigen::Matrix<double, kPoints, kPoints>& derivative_weights() {
  static const Eigen::Matrix<double, kPoints, kPoints> w = [] {
    // c(j, k): weight of node j in the k-th derivative.
    Eigen::Matrix<double, kPoints, kPoints> c = Eigen::Matrix<double, kPoints, kPoints>::Zero();
    auto x = [](int j) { return static_cast<double>(j - kHalfWidth); };
    double c1 = 1.0, c4 = x(0);
    c(0, 0) = 1.0;
    for (int i = 1; i < kPoints; ++i) {
      double c2 = 1.0;
      const double c5 = c4;
      c4 = x(i);
      for (int j = 0; j < i; ++j) {
        const double c3 = x(i) - x(j);
        c2 *= c3;
        if (j == i - 1) {
          for (int k = i; k >= 1; --k)
            c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
          c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
        }
        for (int k = i; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
        c(j, 0) = c4 * c(j, 0) / c3;
      }
      c1 = c2;
    }
    return Eigen::Matrix<double, kPoints, kPoints>(c.transpose());
  }();
  return w;
}

Vector rk4_step(const VectorField& flow, const Vector& q, double h) {
  const Vector k1 = flow(q);
  const Vector k2 = flow(q + 0.5 * h * k1);
  const Vector k3 = flow(q + 0.5 * h * k2);
  const Vector k4 = flow(q + h * k3);
  return q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Grid spacing: a small fraction of the fastest relative rate of change,
// capped so that resting states do not produce huge windows.
double grid_spacing(const Vector& q, const Vector& f) {
  double scale = 1.0;
  for (Eigen::Index i = 0; i < q.size(); ++i)
    if (f[i] != 0.0) scale = std::min(scale, (1.0 + std::abs(q[i])) / std::abs(f[i]));
  return 0.002 * scale;
}

struct FlowGrid {
  double s = 0.0;
  std::vector<Vector> states;  // phi at t = i s / kSubsteps, i = -M kSubsteps .. M kSubsteps
  const Vector& at(int i) const {
    return states[static_cast<std::size_t>(i + kHalfWidth * kSubsteps)];
  }
};

FlowGrid flow_grid(const VectorField& flow, const Vector& q) {
  FlowGrid g;
  g.s = grid_spacing(q, flow(q));
  const double h = g.s / kSubsteps;
  const int n = kHalfWidth * kSubsteps;
  std::vector<Vector> back{q}, fwd{q};
  for (int i = 0; i < n; ++i) {
    back.push_back(rk4_step(flow, back.back(), -h));
    fwd.push_back(rk4_step(flow, fwd.back(), h));
    if (!back.back().allFinite() || !fwd.back().allFinite())
      throw NonFiniteState("Lie derivatives: flow left the finite range near the state");
  }
  g.states.assign(back.rbegin(), back.rend());
  g.states.insert(g.states.end(), fwd.begin() + 1, fwd.end());
  return g;
}

std::vector<double> derivatives_along(const std::function<double(const Vector&)>& gamma,
                                      const FlowGrid& grid, int n) {
  const auto& w = derivative_weights();
  Eigen::Matrix<double, kPoints, 1> coarse, fine;
  double g_max = 0.0;
  // Derivative weights sum to zero, so samples are taken relative to g(0);
  // this keeps a large constant part of Gamma out of the rounding.
  const double g0 = gamma(grid.at(0));
  g_max = std::abs(g0);
  for (int j = -kHalfWidth; j <= kHalfWidth; ++j) {
    coarse[j + kHalfWidth] = gamma(grid.at(j * kSubsteps)) - g0;
    fine[j + kHalfWidth] = gamma(grid.at(j * kSubsteps / 2)) - g0;
    g_max = std::max({g_max, std::abs(coarse[j + kHalfWidth]), std::abs(fine[j + kHalfWidth])});
  }
  const Eigen::Matrix<double, kPoints, 1> d_coarse = w * coarse, d_fine = w * fine;

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 1; k < n; ++k) {
    const double a = d_coarse[k] / std::pow(grid.s, k);
    const double b = d_fine[k] / std::pow(grid.s / 2.0, k);
    const double diff = std::abs(a - b);
    // Rounding in g amplified by the differentiation weights.
    const double noise = 1e-13 * g_max * w.row(k).lpNorm<1>() / std::pow(grid.s / 2.0, k);
    if (diff > 1e-3 * std::max(std::abs(a), std::abs(b)) && diff > noise)
      throw NonSmoothGuard("Lie derivative of order " + std::to_string(k) +
                           ": estimates at two grid spacings disagree (" + std::to_string(a) +
                           " vs " + std::to_string(b) + ")");
    out[static_cast<std::size_t>(k)] = b;
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> lie_table(std::span<const TriggerFunction> gammas,
                                           const VectorField& flow, const Vector& q,
                                           std::span<const int> orders) {
  if (gammas.size() != orders.size())
    throw DimensionMismatch("lie_table: one order per triggering function");
  int n_max = 1;
  for (int n : orders) {
    if (n < 1) throw DimensionMismatch("lie_values: n must be >= 1");
    if (n > kPoints - 2)
      throw DimensionMismatch("lie_values: n must be <= " + std::to_string(kPoints - 2));
    n_max = std::max(n_max, n);
  }
  const Vector f = flow(q);
  std::optional<FlowGrid> grid;
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const TriggerFunction& gamma = gammas[i];
    const int n = orders[i];
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    row[0] = gamma.value(q);
    // At an equilibrium every Lie derivative vanishes.
    if (n > 1 && !f.isZero(0.0)) {
      if (n > 2 || !gamma.gradient) {
        if (!grid) grid = flow_grid(flow, q);
        const std::vector<double> d = derivatives_along(gamma.value, *grid, n);
        std::copy(d.begin() + 1, d.end(), row.begin() + 1);
      }
      if (gamma.gradient) row[1] = gamma.gradient(q).dot(f);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> lie_values(const TriggerFunction& gamma, const VectorField& flow,
                               const Vector& q, int n) {
  const int orders[1] = {n};
  return lie_table(std::span<const TriggerFunction>(&gamma, 1), flow, q, orders).front();
}

}  // namespace ncs
