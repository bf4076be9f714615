#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ncs {

/// Real polynomial with coefficients in ascending order, c[0] + c[1] s + ...
///
/// Used for the scalar comparison functions of the controller design
/// (gamma, alpha, delta, the threshold gain) and for next-transmission
/// equations.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  double operator()(double s) const;
  Polynomial derivative() const;
  Polynomial scaled(double factor) const;

  /// Degree after dropping trailing zero coefficients; -1 for the zero polynomial.
  int degree() const;
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// All real roots of sum_i c[i] s^i, ascending, duplicates kept.
/// Degree <= 3 uses closed forms polished by Newton steps; higher degrees
/// use the eigenvalues of the companion matrix.
std::vector<double> real_roots(std::span<const double> coefficients);

/// Smallest strictly positive real root, if any.
std::optional<double> smallest_positive_root(std::span<const double> coefficients);

}  // namespace ncs
