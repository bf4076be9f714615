#include "ncs/sampling.hpp"

#include <cmath>

namespace ncs {

Vector sample_in_ball(Rng& rng, Eigen::Index dim, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector v(dim);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
    n = v.norm();
  } while (n == 0.0);
  const double r = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(dim));
  return v * (r / n);
}

}  // namespace ncs
