#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "maglab/chart.hpp"

namespace maglab {

/// Uniform axis samples t_k = k T / n, k = 0..n-1.
std::vector<double> axis_samples(const SystemChart& sys, int n);

/// Deterministic (seeded) sample of the chart ball: axis points, interior
/// points, and boundary-shell points.  Used for sup-type estimates.
std::vector<Vec> ball_samples(const SystemChart& sys, int n, std::uint64_t seed);

/// Velocity uniformly distributed on the g-sphere of the given speed at p.
Vec random_g_velocity(const SystemChart& sys, const Vec& p, double speed,
                      std::mt19937_64& rng);

}  // namespace maglab
