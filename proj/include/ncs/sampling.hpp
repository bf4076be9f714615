#pragma once

#include "ncs/hybrid.hpp"

#include <random>

namespace ncs {

using Rng = std::mt19937_64;

/// Uniform draw from the closed Euclidean ball of the given radius:
/// normalized Gaussian direction scaled by radius * U^(1/dim).
Vector sample_in_ball(Rng& rng, Eigen::Index dim, double radius);

}  // namespace ncs
