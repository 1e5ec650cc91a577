#include "maglab/mane.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "maglab/ast_build.hpp"
#include "maglab/errors.hpp"
#include "maglab/sampling.hpp"

namespace maglab {

namespace {

double grid_rho_sup(const SystemChart& sys, const VerifyOptions& opts) {
  double sup = 0.0;
  for (const Vec& p : ball_samples(sys, opts.grid_samples, opts.seed))
    sup = std::max(sup, alpha_norm_sq(sys, p));
  for (const double t : axis_samples(sys, opts.axis_samples))
    sup = std::max(sup, alpha_norm_sq(sys, axis_point(sys, t)));
  return sup;
}

}  // namespace

AlphaSup alpha_sup(const SystemChart& sys, const VerifyOptions& opts) {
  const VerificationReport rep = classify(sys, opts);
  AlphaSup out;
  double sup = grid_rho_sup(sys, opts);
  if (rep.classification == GeodesicClass::strong) {
    out.attained_on_axis = true;
  } else {
    if (!sys.exterior_alpha_bound())
      throw MissingExteriorBound(
          "alpha_sup on a non-strong system needs a declared exterior bound");
    const double b = *sys.exterior_alpha_bound();
    sup = std::max(sup, b * b);
    out.warning =
        "system classifies " + std::string(to_string(rep.classification)) +
        ": the sup is a grid estimate and strong-type reasoning does not apply";
  }
  out.value = std::sqrt(sup);
  return out;
}

C0Report c0(const SystemChart& sys, const VerifyOptions& opts) {
  const VerificationReport rep = classify(sys, opts);
  if (rep.classification != GeodesicClass::strong)
    throw NotStrongType("c0 formula requires strong classification; got " +
                        std::string(to_string(rep.classification)));
  C0Report out;
  out.alpha_sup = alpha_sup(sys, opts).value;
  out.c0 = 0.5 * out.alpha_sup * out.alpha_sup;
  out.cu_equals_c0 = sys.flags().gamma_contractible;
  // theta = 0 candidate of the Hamiltonian formulation: sup_q H(q,0) = sup rho/2
  out.hamiltonian_sup_theta0 = 0.5 * grid_rho_sup(sys, opts);
  out.conditional_on = rep.conditional_on;
  if (out.cu_equals_c0)
    out.conditional_on.push_back(
        "c_u = c0 because the core loop is declared contractible");
  return out;
}

double lower_bound_audit(const SystemChart& sys, int n_samples,
                         const VerifyOptions& opts) {
  const VerificationReport rep = classify(sys, opts);
  if (rep.classification != GeodesicClass::strong)
    throw NotStrongType("lower-bound audit requires strong classification");
  const double a = alpha_sup(sys, opts).value;
  const double kappa = 0.5 * a * a;

  std::mt19937_64 rng(opts.seed ^ 0x10c5u);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<Vec> points = ball_samples(sys, std::max(16, n_samples / 8),
                                               opts.seed ^ 0xb411u);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const Vec& p = points[static_cast<std::size_t>(k) % points.size()];
    const double speed = 3.0 * a * unif(rng);
    const Vec v = random_g_velocity(sys, p, speed, rng);
    worst = std::min(worst, lagrangian(sys, p, v, kappa));
  }
  return worst;
}

namespace {

// One row of the Thm-A family: start speed r * alpha_sup along the axis,
// integrate for T/r (core_speed full windings at speed r * alpha_sup).
SweepRow sweep_row(const SystemChart& sys, double r, double a,
                   const IntegratorConfig& cfg) {
  SweepRow row;
  row.r = r;
  row.kappa_r = 0.5 * r * r * a * a;
  row.predicted_action = (r - 1.0) * sys.period() * a * a;

  State s0{axis_point(sys, 0.0), Vec::Zero(sys.dim())};
  s0.v[0] = r * a;
  const Trajectory traj = integrate(sys, s0, sys.period() / r, cfg);
  row.closure_residual = phase_closure_gap(sys, traj);
  row.quadrature_action = action(sys, traj, row.kappa_r);
  row.measured_energy = energy(sys, traj.final().p, traj.final().v);
  if (r < 1.0) {
    const double rate = row.quadrature_action / (sys.period() / r);
    row.mixing_weight = 2.0 * row.kappa_r / (2.0 * row.kappa_r - rate);
  }
  return row;
}

}  // namespace

SweepTable action_sweep(const SystemChart& sys, const std::vector<double>& r_list,
                        const IntegratorConfig& cfg, const VerifyOptions& opts) {
  const VerificationReport rep = classify(sys, opts);
  if (rep.classification != GeodesicClass::strong)
    throw NotStrongType("action sweep requires strong classification");
  SweepTable table;
  table.alpha_sup = alpha_sup(sys, opts).value;
  table.period = sys.period();
  for (const double r : r_list) {
    if (r <= 0.0) throw ConfigError("r", "speed factors must be positive");
    table.rows.push_back(sweep_row(sys, r, table.alpha_sup, cfg));
  }
  return table;
}

MeasureReport measure_mix(const SystemChart& sys, double r,
                          const IntegratorConfig& cfg,
                          const VerifyOptions& opts) {
  if (r >= 1.0)
    throw PositiveOrbitAction(
        "measure mix needs the negative-action family, r < 1");
  const VerificationReport rep = classify(sys, opts);
  if (rep.classification != GeodesicClass::strong)
    throw NotStrongType("measure mix requires strong classification");

  const double a = alpha_sup(sys, opts).value;
  const SweepRow row = sweep_row(sys, r, a, cfg);

  MeasureReport out;
  out.kappa = row.kappa_r;
  out.orbit_action_rate = row.quadrature_action / (sys.period() / r);
  out.liouville_action = 2.0 * out.kappa;
  out.A = 2.0 * out.kappa / (2.0 * out.kappa - out.orbit_action_rate);
  out.nu_action = out.A * out.orbit_action_rate + (1.0 - out.A) * out.liouville_action;
  out.lambda_ze_residual = lambda_ze_audit(sys, out.kappa, 1000, opts.seed);
  std::mt19937_64 rng(opts.seed ^ 0xf1be7u);
  double fiber = 0.0;
  const std::vector<Vec> points = ball_samples(sys, 10, opts.seed ^ 0x5eedu);
  for (const Vec& p : points)
    fiber = std::max(fiber,
                     liouville_fiber_symmetry(sys, p, out.kappa, 64, rng()));
  out.fiber_symmetry = fiber;
  return out;
}

double lambda_ze_audit(const SystemChart& sys, double kappa, int n_samples,
                       std::uint64_t seed) {
  if (kappa <= 0.0) throw ConfigError("kappa", "energy level must be positive");
  std::mt19937_64 rng(seed ^ 0x1a3bdau);
  const std::vector<Vec> points =
      ball_samples(sys, std::max(16, n_samples / 4), seed ^ 0x77u);
  const double speed = std::sqrt(2.0 * kappa);
  double worst = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const Vec& p = points[static_cast<std::size_t>(k) % points.size()];
    const Vec v = random_g_velocity(sys, p, speed, rng);
    // route 1: canonical one-form minus the alpha pullback, paired with the
    // energy field's generator: g(v,v) - alpha(v)
    const Mat G = metric_at(sys, p);
    const int m = sys.dim();
    Vec V(m);
    std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) V[j] = eval_value(sys.alpha_entry(j), pt);
    const double route1 = v.dot(G * v) - V.dot(v);
    // route 2: the Lagrangian shifted to the energy level
    const double route2 = lagrangian(sys, p, v, kappa);
    worst = std::max(worst, std::abs(route1 - route2));
  }
  return worst;
}

double liouville_fiber_symmetry(const SystemChart& sys, const Vec& p,
                                double kappa, int order, std::uint64_t seed,
                                bool antipodal) {
  const int m = sys.dim();
  const Mat G = metric_at(sys, p);
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  const Mat g_inv_sqrt = es.operatorInverseSqrt();
  Vec V(m);
  std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) V[j] = eval_value(sys.alpha_entry(j), pt);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double speed = std::sqrt(2.0 * kappa);
  double sum = 0.0;
  long count = 0;
  for (int k = 0; k < order; ++k) {
    Vec u(m);
    for (int i = 0; i < m; ++i) u[i] = gauss(rng);
    if (u.norm() == 0.0) continue;
    u.normalize();
    const Vec w = speed * (g_inv_sqrt * u);  // E(p, w) = kappa
    sum += V.dot(w);
    ++count;
    if (antipodal) {
      sum += V.dot(Vec(-w));
      ++count;
    }
  }
  return std::abs(sum / static_cast<double>(count));
}

SystemChart scale_alpha(const SystemChart& sys, double c) {
  if (c <= 0.0) throw ConfigError("scale", "alpha scale must be positive");
  namespace ab = maglab::ast;
  std::vector<ExprAst> scaled;
  scaled.reserve(sys.alpha().size());
  for (const ExprAst& a : sys.alpha())
    scaled.emplace_back(ab::mul(ab::cst(c), a.root()), sys.dim());
  std::optional<double> bound = sys.exterior_alpha_bound();
  if (bound) bound = *bound * c;
  return SystemChart(sys.name() + ".scaled", sys.dim(), sys.period(),
                     sys.radius(), sys.metric_upper(), std::move(scaled),
                     sys.flags(), bound, sys.core_speed() * c);
}

}  // namespace maglab
