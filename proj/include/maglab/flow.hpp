#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "maglab/chart.hpp"

namespace maglab {

struct State {
  Vec p;  // chart point, p[0] is the raw (unwrapped) t coordinate
  Vec v;  // chart velocity
};

struct IntegratorConfig {
  double h = 0.0;        // target step; 0 picks duration/2000
  bool adaptive = false;
  double rtol = 1e-9;    // step-doubling tolerance (adaptive only)
  bool negate_sigma = false;  // integrates the flow of -sigma
  int record_every = 1;  // keep every k-th accepted sample
};

struct TrajectorySample {
  double time;
  State state;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // strictly increasing time stamps
  std::string method;
  double step = 0.0;  // effective uniform step (fixed-step runs)
  int rejected_steps = 0;

  const State& initial() const { return samples.front().state; }
  const State& final() const { return samples.back().state; }
};

/// Integrates p' = v, v'^k = -Gamma^k_ij v^i v^j + (Yv)^k.  Classical
/// fixed-step RK4 by default, step-doubling control when cfg.adaptive.
/// Throws LeftChart when |x| exceeds the chart radius.
Trajectory integrate(const SystemChart& sys, const State& s0, double duration,
                     const IntegratorConfig& cfg = {});

/// max_k |E(s_k) - E(s_0)| / E(s_0).
double energy_drift(const SystemChart& sys, const Trajectory& traj);

/// Phase-space gap between the last and first samples, with the t slot
/// compared modulo T.
double phase_closure_gap(const SystemChart& sys, const Trajectory& traj);

/// Integrates the core reparametrization from ((0,0), r e1) for time T/r and
/// returns the phase-space closure gap.
double closure_residual(const SystemChart& sys, double r,
                        const IntegratorConfig& cfg = {});

/// Free-period action: composite Simpson quadrature of L + kappa over the
/// samples (uniform grids; falls back to trapezoid on non-uniform ones).
double action(const SystemChart& sys, const Trajectory& traj, double kappa);

/// Action over the sample index range [i0, i1].
double action_range(const SystemChart& sys, const Trajectory& traj,
                    std::size_t i0, std::size_t i1, double kappa);

/// CSV export with header time,t,x2..xm,v1..vm,energy.
void write_trajectory_csv(const SystemChart& sys, const Trajectory& traj,
                          std::ostream& os);

}  // namespace maglab
