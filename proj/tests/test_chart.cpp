#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "maglab/catalog.hpp"
#include "maglab/chart.hpp"
#include "maglab/errors.hpp"
#include "maglab/sampling.hpp"
#include "oracles.hpp"

using namespace maglab;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

SystemChart wavy_with_radius(double R) {
  const SystemChart w = make_wavy();
  return SystemChart("WAVY_R", w.dim(), w.period(), R, w.metric_upper(),
                     w.alpha(), w.flags(), w.exterior_alpha_bound());
}
}  // namespace

TEST_CASE("metric_at: FLAT is the identity, WAVY matches its coefficients") {
  const SystemChart flat = make_flat();
  const Mat I3 = Mat::Identity(3, 3);
  CHECK((metric_at(flat, axis_point(flat, 1.3)) - I3).norm() == 0.0);

  const SystemChart wavy = make_wavy();
  Vec p = axis_point(wavy, 0.0);
  p[1] = 0.1;
  const Mat G = metric_at(wavy, p);
  CHECK(G(0, 0) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(G(0, 1) == 0.0);  // sin(0)/2
  CHECK(G(1, 1) == 1.0);
  CHECK(G(2, 2) == 1.0);
  CHECK((G - G.transpose()).norm() == 0.0);
}

TEST_CASE("metric_at: positive definiteness crossing found numerically") {
  // For the WAVY coefficients the leading 2x2 minor is
  // 1 + x2 cos t - sin(t)^2/4; scanning over t it first vanishes at |x2| = 1.
  const SystemChart probe = wavy_with_radius(1.2);
  auto min_minor = [&](double x2) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 720; ++k) {
      const double t = kTwoPi * k / 720.0;
      const double minor =
          1.0 + x2 * std::cos(t) - 0.25 * std::sin(t) * std::sin(t);
      worst = std::min(worst, minor);
    }
    return worst;
  };
  double lo = 0.5, hi = 1.19;  // minor positive at 0.5, negative past the crossing
  REQUIRE(min_minor(-lo) > 0.0);
  REQUIRE(min_minor(-hi) < 0.0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (min_minor(-mid) > 0.0 ? lo : hi) = mid;
  }
  CHECK(0.5 * (lo + hi) == doctest::Approx(1.0).epsilon(1e-9));

  // a misdeclared radius exposes the failure through metric_at
  Vec bad = axis_point(probe, 0.0);
  bad[1] = -1.02;
  CHECK_THROWS_AS(metric_at(probe, bad), NotPositiveDefinite);
  Vec good = axis_point(probe, 0.0);
  good[1] = -0.9;  // inside the crossing, still positive definite
  CHECK_NOTHROW(metric_at(probe, good));
}

TEST_CASE("metric_at: points beyond the chart ball are rejected") {
  const SystemChart flat = make_flat();
  Vec p = axis_point(flat, 0.0);
  p[2] = flat.radius() + 0.01;
  CHECK_THROWS_AS(metric_at(flat, p), OutOfChart);
}

TEST_CASE("christoffel: flat metric has none; WAVY matches the FD oracle") {
  const SystemChart flat = make_flat();
  const Tensor3 zero = christoffel(flat, axis_point(flat, 0.7));
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(zero(k, i, j) == 0.0);

  const SystemChart wavy = make_wavy();
  // the axis loop is a geodesic by construction: Gamma^k_11 = 0 on the axis
  for (double t : {0.0, 1.1, 2.8, 5.5}) {
    const Tensor3 g = christoffel(wavy, axis_point(wavy, t));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(g(k, 0, 0)) <= 1e-14);
  }

  // frozen value: Gamma^1_12(0, 0) = d_2 g_11 / 2 = cos(0)/2 = 0.5
  const Tensor3 g0 = christoffel(wavy, axis_point(wavy, 0.0));
  CHECK(g0(0, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));

  // FD oracle agreement and exact lower-index symmetry at random points
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::uniform_real_distribution<double> ut(0.0, kTwoPi);
  for (int trial = 0; trial < 20; ++trial) {
    Vec p(3);
    p << ut(rng), u(rng), u(rng);
    const Tensor3 ad = christoffel(wavy, p);
    const Tensor3 fd = oracle::fd_christoffel(wavy, p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          CHECK(ad(k, i, j) == ad(k, j, i));  // exact by construction
          CHECK(std::abs(ad(k, i, j) - fd(k, i, j)) <=
                1e-6 * (1.0 + std::abs(ad(k, i, j))));
        }
  }
}

TEST_CASE("two_form_at: closed forms for the catalog") {
  const SystemChart flat = make_flat();
  CHECK(two_form_at(flat, axis_point(flat, 0.3)).norm() == 0.0);

  const SystemChart helix = make_helix();
  Vec p(3);
  p << 0.9, 0.2, -0.1;
  const Mat sh = two_form_at(helix, p);
  CHECK(sh(1, 2) == 1.0);  // d2 V3 - d3 V2
  CHECK(sh(2, 1) == -1.0);
  CHECK(sh(0, 1) == 0.0);
  CHECK(sh(0, 2) == 0.0);

  const SystemChart twist = make_twist();
  const Mat st = two_form_at(twist, p);
  CHECK(st(1, 2) == 2.0);  // 1 - (-1)
  CHECK(st(2, 1) == -2.0);
  CHECK((st + st.transpose()).norm() == 0.0);
}

TEST_CASE("lorentz_at: defining relation fixes the sign") {
  const SystemChart flat = make_flat();
  CHECK(lorentz_at(flat, axis_point(flat, 0.2)).norm() == 0.0);

  const SystemChart twist = make_twist();
  Vec p(3);
  p << 1.7, 0.1, 0.2;
  const Mat Y = lorentz_at(twist, p);
  const Mat G = metric_at(twist, p);
  const Mat sigma = two_form_at(twist, p);
  // sign audit: g(Y e2, e3) must equal sigma(e2, e3) = 2
  const Vec Ye2 = Y.col(1);
  CHECK((G * Ye2)(2) == doctest::Approx(sigma(1, 2)).epsilon(1e-14));
  CHECK(Ye2(2) == doctest::Approx(2.0).epsilon(1e-14));  // Y e2 = +2 e3
  CHECK(Ye2(0) == doctest::Approx(0.0));
  CHECK(Ye2(1) == doctest::Approx(0.0));

  // on the axis the core velocity lies in ker sigma, so Y e1 = 0
  for (const SystemChart& sys : {make_flat(), make_helix(), make_twist(), make_wavy()})
    for (double t : {0.0, 2.1, 4.4})
      CHECK(lorentz_at(sys, axis_point(sys, t)).col(0).cwiseAbs().maxCoeff() <=
            1e-14);
}

TEST_CASE("g-skew-symmetry of the Lorentz force at random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::uniform_real_distribution<double> ut(0.0, kTwoPi);
  for (const SystemChart& sys : {make_helix(), make_twist(), make_wavy()}) {
    for (int trial = 0; trial < 100; ++trial) {
      Vec p(3);
      p << ut(rng), u(rng), u(rng);
      const Mat G = metric_at(sys, p);
      const Mat Y = lorentz_at(sys, p);
      const Mat GY = G * Y;
      CHECK((GY + GY.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("energy: frozen examples") {
  const SystemChart flat = make_flat();
  Vec e1 = Vec::Zero(3);
  e1[0] = 1.0;
  CHECK(energy(flat, axis_point(flat, 0.4), e1) == 0.5);
  CHECK(energy(flat, axis_point(flat, 0.4), Vec::Zero(3)) == 0.0);

  const SystemChart wavy = make_wavy();
  Vec p = axis_point(wavy, 0.0);
  p[1] = 0.1;
  CHECK(energy(wavy, p, e1) == doctest::Approx(0.55).epsilon(1e-15));
}

TEST_CASE("alpha_norm_sq: closed forms and axis constancy") {
  const SystemChart flat = make_flat();
  Vec p(3);
  p << 2.0, 0.3, -0.2;
  CHECK(alpha_norm_sq(flat, p) == doctest::Approx(1.0).epsilon(1e-15));

  const SystemChart helix = make_helix();
  CHECK(alpha_norm_sq(helix, p) == doctest::Approx(1.0 + 0.09).epsilon(1e-14));

  // rho restricted to the axis of a semi-strong system is constant
  for (const SystemChart& sys : {make_flat(), make_helix(), make_twist(), make_wavy()}) {
    double lo = 1e300, hi = -1e300;
    for (const double t : axis_samples(sys, 512)) {
      const double r = alpha_norm_sq(sys, axis_point(sys, t));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi - lo <= 1e-10);
  }
}

TEST_CASE("lagrangian: core family values and the critical lower bound") {
  const SystemChart flat = make_flat();
  CHECK(lagrangian(flat, axis_point(flat, 0.0), Vec::Zero(3), 0.0) == 0.0);

  // along gamma_r of a strong system with |alpha| = 1 and kappa = r^2/2 the
  // pointwise value is r (r - 1)
  for (double r : {0.25, 0.5, 1.0, 2.0}) {
    Vec v = Vec::Zero(3);
    v[0] = r;
    const double value = lagrangian(flat, axis_point(flat, 1.0), v, 0.5 * r * r);
    CHECK(value == doctest::Approx(r * (r - 1.0)).epsilon(1e-14));
  }

  // L + |alpha|^2/2 >= 0 over random states with |v|_g <= 3
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto points = ball_samples(flat, 512, 123);
  double worst = 1e300;
  for (int k = 0; k < 10000; ++k) {
    const Vec& p2 = points[static_cast<std::size_t>(k) % points.size()];
    const Vec v = random_g_velocity(flat, p2, 3.0 * u(rng), rng);
    worst = std::min(worst, lagrangian(flat, p2, v, 0.5));
  }
  CHECK(worst >= -1e-12);
}
