#include "maglab/sampling.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace maglab {

std::vector<double> axis_samples(const SystemChart& sys, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    out.push_back(sys.period() * static_cast<double>(k) / static_cast<double>(n));
  return out;
}

std::vector<Vec> ball_samples(const SystemChart& sys, int n, std::uint64_t seed) {
  const int m = sys.dim();
  const double R = sys.radius();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n));
  const int n_axis = std::max(8, n / 8);
  for (int k = 0; k < n_axis && static_cast<int>(out.size()) < n; ++k)
    out.push_back(axis_point(sys, sys.period() * k / static_cast<double>(n_axis)));

  // interior (uniform in the ball) and boundary shell samples, interleaved
  while (static_cast<int>(out.size()) < n) {
    Vec p(m);
    p[0] = unif(rng) * sys.period();
    Vec x(m - 1);
    for (int i = 0; i < m - 1; ++i) x[i] = gauss(rng);
    const double nx = x.norm();
    if (nx == 0.0) continue;
    const bool boundary = (out.size() % 4 == 3);
    const double radius =
        boundary ? R : R * std::pow(unif(rng), 1.0 / static_cast<double>(m - 1));
    p.tail(m - 1) = (radius / nx) * x;
    out.push_back(std::move(p));
  }
  return out;
}

Vec random_g_velocity(const SystemChart& sys, const Vec& p, double speed,
                      std::mt19937_64& rng) {
  const int m = sys.dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec w(m);
  for (int i = 0; i < m; ++i) w[i] = gauss(rng);
  const Mat G = metric_at(sys, p);
  const double gnorm = std::sqrt(w.dot(G * w));
  return (speed / gnorm) * w;
}

}  // namespace maglab
