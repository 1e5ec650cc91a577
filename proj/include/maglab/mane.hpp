#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "maglab/chart.hpp"
#include "maglab/flow.hpp"
#include "maglab/verify.hpp"

namespace maglab {

struct AlphaSup {
  double value = 0.0;             // sup of |alpha|_g over grid, axis and the
                                  // declared exterior bound
  bool attained_on_axis = false;  // true for strong systems
  std::optional<std::string> warning;
};

/// sqrt of the sup of rho.  Needs a declared exterior bound unless the
/// system classifies strong.
AlphaSup alpha_sup(const SystemChart& sys, const VerifyOptions& opts = {});

struct C0Report {
  double c0 = 0.0;       // strict critical value, alpha_sup^2 / 2
  double alpha_sup = 0.0;
  bool cu_equals_c0 = false;  // set when the core loop is declared contractible
  double hamiltonian_sup_theta0 = 0.0;  // sup_q H(q, 0) = sup rho / 2
  std::vector<std::string> conditional_on;
};

/// Strict critical value for strong-type systems.
C0Report c0(const SystemChart& sys, const VerifyOptions& opts = {});

/// min over random (p, v) with |v|_g <= 3 alpha_sup of L(p,v) + c0; the paper
/// bound makes this nonnegative for strong systems.
double lower_bound_audit(const SystemChart& sys, int n_samples,
                         const VerifyOptions& opts = {});

struct SweepRow {
  double r = 0.0;
  double kappa_r = 0.0;            // r^2 |alpha|^2 / 2
  double predicted_action = 0.0;   // (r - 1) T |alpha|^2
  double quadrature_action = 0.0;
  double closure_residual = 0.0;
  double mixing_weight = std::numeric_limits<double>::quiet_NaN();  // r < 1 only
  double measured_energy = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double alpha_sup = 0.0;
  double period = 0.0;
};

/// Integrates the core reparametrization family and compares quadrature
/// action against the closed-form prediction row by row.
SweepTable action_sweep(const SystemChart& sys, const std::vector<double>& r_list,
                        const IntegratorConfig& cfg = {},
                        const VerifyOptions& opts = {});

struct MeasureReport {
  double kappa = 0.0;
  double orbit_action_rate = 0.0;  // s = S_{L+kappa}(gamma_r) / period
  double liouville_action = 0.0;   // 2 kappa
  double A = 0.0;                  // 2k / (2k - s)
  double nu_action = 0.0;          // A s + (1 - A) 2k, zero up to round-off
  double lambda_ze_residual = 0.0;
  double fiber_symmetry = 0.0;
};

/// The convex measure mix that defeats the contact criterion at kappa_r for
/// r < 1.
MeasureReport measure_mix(const SystemChart& sys, double r,
                          const IntegratorConfig& cfg = {},
                          const VerifyOptions& opts = {});

/// |(g(v,v) - alpha(v)) - (L + kappa)| over random samples of the energy
/// surface; an algebraic identity, so the residual is round-off only.
double lambda_ze_audit(const SystemChart& sys, double kappa, int n_samples,
                       std::uint64_t seed = 20260810);

/// Fiber average of alpha(v) over {v : E(p,v) = kappa} with an antipodally
/// symmetric node set; exact cancellation.  `antipodal = false` drops the
/// mirrored nodes (fault injection for tests).
double liouville_fiber_symmetry(const SystemChart& sys, const Vec& p,
                                double kappa, int order,
                                std::uint64_t seed = 20260810,
                                bool antipodal = true);

/// alpha <- c alpha as a chart-level transform: scales the covector entries
/// and the declared core pairing speed.
SystemChart scale_alpha(const SystemChart& sys, double c);

}  // namespace maglab
