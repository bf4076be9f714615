#include "ncs/errors.hpp"
#include "ncs/polynomial.hpp"
#include "ncs/triggers.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace ncs {

NextTime solve_next_time(std::span<const double> lie, std::span<const double> sigma,
                         double t_star, double epsilon) {
  if (lie.size() != sigma.size() || lie.size() < 2)
    throw DimensionMismatch("solve_next_time: need equally long coefficient lists of length >= 2");
  if (!(t_star > 0.0) || !(epsilon > 0.0))
    throw ConfigError("solve_next_time: t_star and epsilon must be positive");

  std::vector<double> coeffs(lie.size());
  for (std::size_t i = 0; i < lie.size(); ++i) coeffs[i] = sigma[i] * lie[i];

  NextTime out;
  out.tau = epsilon;
  if (std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; })) {
    out.degenerate = true;
    return out;
  }
  out.lambda = smallest_positive_root(coeffs);
  if (out.lambda) out.tau = std::max(*out.lambda * t_star, epsilon);
  return out;
}

}  // namespace ncs
