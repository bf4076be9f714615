#include "ncs/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ncs {

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::scaled(double factor) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= factor;
  return Polynomial(std::move(c));
}

int Polynomial::degree() const {
  for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i)
    if (coeffs_[static_cast<std::size_t>(i)] != 0.0) return i;
  return -1;
}

namespace {

double horner(std::span<const double> c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double horner_derivative(std::span<const double> c, double s) {
  double acc = 0.0;
  for (std::size_t i = c.size() - 1; i >= 1; --i) acc = acc * s + static_cast<double>(i) * c[i];
  return acc;
}

double polish(std::span<const double> c, double r) {
  for (int it = 0; it < 4; ++it) {
    const double p = horner(c, r);
    const double dp = horner_derivative(c, r);
    if (p == 0.0 || dp == 0.0) break;
    const double next = r - p / dp;
    if (!std::isfinite(next) || std::abs(horner(c, next)) >= std::abs(p)) break;
    r = next;
  }
  return r;
}

void quadratic_roots(double a, double b, double c, std::vector<double>& out) {
  double disc = b * b - 4.0 * a * c;
  const double scale = b * b + std::abs(4.0 * a * c);
  if (disc < 0.0) {
    if (disc < -1e-12 * scale) return;
    disc = 0.0;
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) {
    out.push_back(0.0);
    out.push_back(0.0);
    return;
  }
  out.push_back(q / a);
  out.push_back(c / q);
}

void cubic_roots(double a, double b, double c, double d, std::vector<double>& out) {
  const double A = b / a, B = c / a, C = d / a;
  const double Q = (A * A - 3.0 * B) / 9.0;
  const double R = (2.0 * A * A * A - 9.0 * A * B + 27.0 * C) / 54.0;
  const double Q3 = Q * Q * Q;
  const double R2 = R * R;
  if (R2 <= Q3 * (1.0 + 1e-12) && Q > 0.0) {
    const double ratio = std::clamp(R / std::sqrt(Q3), -1.0, 1.0);
    const double theta = std::acos(ratio);
    const double m = -2.0 * std::sqrt(Q);
    for (int k = 0; k < 3; ++k)
      out.push_back(m * std::cos((theta + 2.0 * std::numbers::pi * k) / 3.0) - A / 3.0);
    return;
  }
  const double S = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(std::max(R2 - Q3, 0.0))), R);
  const double T = S == 0.0 ? 0.0 : Q / S;
  out.push_back(S + T - A / 3.0);
}

}  // namespace

std::vector<double> real_roots(std::span<const double> coefficients) {
  std::size_t n = coefficients.size();
  while (n > 0 && coefficients[n - 1] == 0.0) --n;
  const std::span<const double> c = coefficients.first(n);
  std::vector<double> roots;
  if (n <= 1) return roots;

  // Roots at the origin.
  std::size_t lead_zero = 0;
  while (c[lead_zero] == 0.0) ++lead_zero;
  roots.insert(roots.end(), lead_zero, 0.0);
  const std::span<const double> p = c.subspan(lead_zero);
  const std::size_t deg = p.size() - 1;

  std::vector<double> found;
  if (deg == 1) {
    found.push_back(-p[0] / p[1]);
  } else if (deg == 2) {
    quadratic_roots(p[2], p[1], p[0], found);
  } else if (deg == 3) {
    cubic_roots(p[3], p[2], p[1], p[0], found);
  } else if (deg >= 4) {
    const auto m = static_cast<Eigen::Index>(deg);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < m; ++i)
      companion(i, m - 1) = -p[static_cast<std::size_t>(i)] / p[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    for (const auto& z : solver.eigenvalues())
      if (std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z))) found.push_back(z.real());
  }
  for (double r : found) roots.push_back(polish(p, r));
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::optional<double> smallest_positive_root(std::span<const double> coefficients) {
  for (double r : real_roots(coefficients))
    if (r > 0.0) return r;
  return std::nullopt;
}

}  // namespace ncs
