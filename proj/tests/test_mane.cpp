#include <doctest.h>

#include <cmath>
#include <numbers>

#include "maglab/catalog.hpp"
#include "maglab/construct.hpp"
#include "maglab/errors.hpp"
#include "maglab/mane.hpp"

using namespace maglab;

namespace {

const SystemChart& rescaled_helix() {
  static const SystemChart sys =
      rescale_metric(make_helix(), default_profile(0.9), {}).system;
  return sys;
}

IntegratorConfig sweep_cfg(const SystemChart& sys) {
  IntegratorConfig cfg;
  cfg.h = sys.period() / 2000.0;
  return cfg;
}

}  // namespace

TEST_CASE("alpha_sup: strong systems read the axis, others need the bound") {
  const AlphaSup flat = alpha_sup(make_flat());
  CHECK(flat.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.attained_on_axis);
  CHECK(!flat.warning);

  const AlphaSup rescaled = alpha_sup(rescaled_helix());
  CHECK(rescaled.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rescaled.attained_on_axis);

  // raw HELIX: rho = 1 + x2^2 peaks at the chart boundary
  const AlphaSup raw = alpha_sup(make_helix());
  CHECK(raw.warning.has_value());
  CHECK(!raw.attained_on_axis);
  CHECK(raw.value == doctest::Approx(std::sqrt(1.0 + 0.81)).epsilon(1e-3));

  const SystemChart unbounded("unbounded", 3, make_helix().period(), 0.9,
                              make_helix().metric_upper(), make_helix().alpha(),
                              ChartFlags{true, true});
  CHECK_THROWS_AS(alpha_sup(unbounded), MissingExteriorBound);
}

TEST_CASE("c0: one half alpha_sup squared, with the theta = 0 Hamiltonian audit") {
  const C0Report flat = c0(make_flat());
  CHECK(flat.c0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(flat.cu_equals_c0);  // the core loop is declared contractible

  const C0Report res = c0(rescaled_helix());
  CHECK(std::abs(res.c0 - 0.5) <= 1e-12);
  CHECK(std::abs(res.hamiltonian_sup_theta0 - res.c0) <= 1e-10);

  CHECK_THROWS_AS(c0(make_helix()), NotStrongType);  // raw: not strong

  // alpha scaled by 3: exact ninefold values at the formula level
  const C0Report scaled = c0(scale_alpha(rescaled_helix(), 3.0));
  CHECK(scaled.c0 == doctest::Approx(9.0 * res.c0).epsilon(1e-14));
  CHECK(scaled.alpha_sup == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("lower_bound_audit: L + c0 is nonnegative and tight at the dual") {
  CHECK(lower_bound_audit(make_flat(), 10000) >= -1e-10);
  CHECK(lower_bound_audit(rescaled_helix(), 10000) >= -1e-10);

  // the analytic minimum sits at v = alpha-dual: L + c0 = (|alpha|^2 - rho)/2
  const SystemChart flat = make_flat();
  const Vec p = axis_point(flat, 0.3);
  Vec dual = Vec::Zero(3);
  dual[0] = 1.0;
  CHECK(lagrangian(flat, p, dual, 0.5) == 0.0);
  CHECK(lagrangian(flat, p, Vec(Vec::Zero(3)), 0.5) == 0.5);      // v = 0
  CHECK(lagrangian(flat, p, Vec(2.0 * dual), 0.5) == 0.5);        // the square again
}

TEST_CASE("action_sweep: the gamma_r family against the closed form") {
  const SystemChart& sys = rescaled_helix();
  const std::vector<double> r_list = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  const SweepTable table = action_sweep(sys, r_list, sweep_cfg(sys));
  REQUIRE(table.rows.size() == r_list.size());
  CHECK(table.alpha_sup == doctest::Approx(1.0).epsilon(1e-12));

  for (const SweepRow& row : table.rows) {
    CHECK(row.kappa_r ==
          doctest::Approx(0.5 * row.r * row.r * table.alpha_sup * table.alpha_sup)
              .epsilon(1e-14));
    CHECK(row.closure_residual <= 1e-8);
    CHECK(std::abs(row.measured_energy - row.kappa_r) <= 1e-9 * row.kappa_r);
    CHECK(std::abs(row.quadrature_action - row.predicted_action) <=
          1e-7 * (1.0 + std::abs(row.predicted_action)));
    // sign law across the critical reparametrization
    if (row.r < 1.0) CHECK(row.quadrature_action < 0.0);
    if (row.r == 1.0) CHECK(std::abs(row.quadrature_action) <= 1e-9);
    if (row.r > 1.0) CHECK(row.quadrature_action > 0.0);
    if (row.r < 1.0) {
      CHECK(row.mixing_weight == doctest::Approx(row.r).epsilon(1e-9));
    } else {
      CHECK(std::isnan(row.mixing_weight));
    }
  }

  // frozen values for T = 2 pi, |alpha| = 1
  CHECK(table.rows[1].quadrature_action ==
        doctest::Approx(-std::numbers::pi).epsilon(1e-8));
  CHECK(table.rows[5].quadrature_action ==
        doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-8));

  // table invariants: kappa_r strictly increasing, predicted < 0 iff r < 1
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
    CHECK(table.rows[i].kappa_r < table.rows[i + 1].kappa_r);
  for (const SweepRow& row : table.rows)
    CHECK((row.predicted_action < 0.0) == (row.r < 1.0));

  CHECK_THROWS_AS(action_sweep(make_helix(), {0.5}, sweep_cfg(sys)), NotStrongType);
}

TEST_CASE("action_sweep: consistent on every strong catalog variant") {
  const SystemChart rescaled_twist =
      rescale_metric(make_twist(), default_profile(0.9), {}).system;
  for (const SystemChart* sys :
       {&rescaled_helix(), &rescaled_twist}) {
    const SystemChart flat = make_flat();
    for (const SystemChart* s2 : {sys, &flat}) {
      const SweepTable table =
          action_sweep(*s2, {0.25, 0.5, 0.75, 1.0, 1.5, 2.0}, sweep_cfg(*s2));
      for (const SweepRow& row : table.rows)
        CHECK(std::abs(row.quadrature_action - row.predicted_action) <=
              1e-7 * (1.0 + std::abs(row.predicted_action)));
    }
  }
}

TEST_CASE("action_sweep: alpha scaled by 3 multiplies every action by 9") {
  const SystemChart& base = rescaled_helix();
  const SystemChart scaled = scale_alpha(base, 3.0);
  CHECK(classify(scaled).classification == GeodesicClass::strong);
  const std::vector<double> r_list = {0.25, 0.5, 1.0, 2.0};
  const SweepTable t1 = action_sweep(base, r_list, sweep_cfg(base));
  const SweepTable t9 = action_sweep(scaled, r_list, sweep_cfg(scaled));
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    const double want = 9.0 * t1.rows[i].quadrature_action;
    CHECK(std::abs(t9.rows[i].quadrature_action - want) <=
          1e-8 * (1.0 + std::abs(want)));
    CHECK(t9.rows[i].closure_residual <= 1e-8);
  }
}

TEST_CASE("measure_mix: the convex combination annihilates the action") {
  const SystemChart& sys = rescaled_helix();
  for (double r : {0.25, 0.5}) {
    const MeasureReport m = measure_mix(sys, r, sweep_cfg(sys));
    CHECK(m.kappa == doctest::Approx(0.5 * r * r).epsilon(1e-12));
    CHECK(m.liouville_action == doctest::Approx(2.0 * m.kappa).epsilon(1e-15));
    CHECK(m.A > 0.0);
    CHECK(m.A < 1.0);
    CHECK(m.A == doctest::Approx(r).epsilon(1e-9));  // closed form for the family
    CHECK(std::abs(m.nu_action) <= 1e-12);
    CHECK(m.lambda_ze_residual <= 1e-12);
    CHECK(m.fiber_symmetry <= 1e-14);
  }
  // r = 0.5: rate = r(r-1) = -1/4 and A = 2k/(2k - s) = 1/2
  const MeasureReport half = measure_mix(sys, 0.5, sweep_cfg(sys));
  CHECK(half.orbit_action_rate == doctest::Approx(-0.25).epsilon(1e-9));

  // A -> 1 as r -> 1^-
  const MeasureReport near = measure_mix(sys, 0.999, sweep_cfg(sys));
  CHECK(near.A == doctest::Approx(0.999).epsilon(1e-6));

  CHECK_THROWS_AS(measure_mix(sys, 1.0, sweep_cfg(sys)), PositiveOrbitAction);
  CHECK_THROWS_AS(measure_mix(sys, 1.5, sweep_cfg(sys)), PositiveOrbitAction);
}

TEST_CASE("lambda(Z_E) identity: frozen endpoint values and the audit") {
  const SystemChart flat = make_flat();
  const double kappa = 0.5;
  const Vec p = axis_point(flat, 0.7);

  // v = alpha-dual on the axis at kappa = |alpha|^2/2: both routes vanish
  Vec dual = Vec::Zero(3);
  dual[0] = 1.0;
  const Mat G = metric_at(flat, p);
  CHECK(dual.dot(G * dual) - 1.0 == 0.0);                 // g(v,v) - alpha(v) = 0
  CHECK(lagrangian(flat, p, dual, kappa) == 0.0);         // L + kappa = 0

  // v orthogonal to the dual at the same energy: both routes give 2 kappa
  Vec ortho = Vec::Zero(3);
  ortho[1] = 1.0;
  CHECK(ortho.dot(G * ortho) - 0.0 == doctest::Approx(2.0 * kappa));
  CHECK(lagrangian(flat, p, ortho, kappa) == doctest::Approx(2.0 * kappa));

  CHECK(lambda_ze_audit(flat, kappa, 1000) <= 1e-12);
  CHECK(lambda_ze_audit(rescaled_helix(), 0.125, 1000) <= 1e-12);
}

TEST_CASE("liouville fiber symmetry: antipodal nodes cancel exactly") {
  const SystemChart helix = make_helix();
  Vec p(3);
  p << 0.0, 0.3, 0.0;
  CHECK(liouville_fiber_symmetry(helix, p, 0.5, 64) <= 1e-14);
  CHECK(liouville_fiber_symmetry(make_flat(), axis_point(make_flat(), 0.2), 0.5,
                                 64) <= 1e-14);
  // dropping the mirrored nodes leaves an O(|V|/sqrt(n)) error
  const double fault = liouville_fiber_symmetry(helix, p, 0.5, 64, 20260810, false);
  CHECK(fault > 1e-4);
}
