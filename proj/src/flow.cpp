#include "maglab/flow.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "maglab/errors.hpp"

namespace maglab {

namespace {

struct Rhs {
  const SystemChart& sys;
  double sigma_sign;

  // dv = G^{-1}(-A + B/2 - sign * Sigma v), A_l = sum v^i (dG(i) v)_l,
  // B_l = v^T dG(l) v; one factorization per evaluation.
  void operator()(const State& s, Vec& dp, Vec& dv) const {
    const int m = sys.dim();
    const MetricJets mj = metric_jets(sys, s.p);
    const AlphaJets aj = alpha_jets(sys, s.p);
    Eigen::LLT<Mat> llt(mj.G);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite("metric not positive definite along the trajectory");

    Vec rhs = Vec::Zero(m);
    for (int l = 0; l < m; ++l) {
      double a = 0.0, b = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          a += s.v[i] * mj.dG(i, l, j) * s.v[j];
          b += s.v[i] * mj.dG(l, i, j) * s.v[j];
        }
      rhs[l] = -a + 0.5 * b;
    }
    // (Sigma v)_i = sum_j (dV(i,j) - dV(j,i)) v_j
    for (int i = 0; i < m; ++i) {
      double sv = 0.0;
      for (int j = 0; j < m; ++j) sv += (aj.dV(i, j) - aj.dV(j, i)) * s.v[j];
      rhs[i] -= sigma_sign * sv;
    }
    dp = s.v;
    dv = llt.solve(rhs);
  }
};

void require_inside(const SystemChart& sys, const State& s, double time) {
  if (transverse_radius(s.p) > sys.radius() * (1.0 + 1e-12))
    throw LeftChart(time, "trajectory left the chart ball at time " +
                              std::to_string(time));
}

State rk4_step(const Rhs& f, const State& s, double h) {
  Vec k1p, k1v, k2p, k2v, k3p, k3v, k4p, k4v;
  f(s, k1p, k1v);
  State mid{s.p + 0.5 * h * k1p, s.v + 0.5 * h * k1v};
  f(mid, k2p, k2v);
  mid.p = s.p + 0.5 * h * k2p;
  mid.v = s.v + 0.5 * h * k2v;
  f(mid, k3p, k3v);
  State end{s.p + h * k3p, s.v + h * k3v};
  f(end, k4p, k4v);
  return State{s.p + (h / 6.0) * (k1p + 2.0 * (k2p + k3p) + k4p),
               s.v + (h / 6.0) * (k1v + 2.0 * (k2v + k3v) + k4v)};
}

double state_gap(const State& a, const State& b) {
  return std::sqrt((a.p - b.p).squaredNorm() + (a.v - b.v).squaredNorm());
}

}  // namespace

Trajectory integrate(const SystemChart& sys, const State& s0, double duration,
                     const IntegratorConfig& cfg) {
  if (duration <= 0.0) throw ConfigError("duration", "must be positive");
  if (s0.p.size() != sys.dim() || s0.v.size() != sys.dim())
    throw ConfigError("state", "state dimension does not match the chart");
  require_inside(sys, s0, 0.0);

  const Rhs f{sys, cfg.negate_sigma ? -1.0 : 1.0};
  Trajectory traj;
  traj.samples.push_back({0.0, s0});

  if (!cfg.adaptive) {
    const double target = cfg.h > 0.0 ? cfg.h : duration / 2000.0;
    const long n = std::max<long>(1, std::lround(duration / target));
    const double h = duration / static_cast<double>(n);
    traj.method = "rk4";
    traj.step = h;
    State s = s0;
    for (long k = 1; k <= n; ++k) {
      s = rk4_step(f, s, h);
      const double time = h * static_cast<double>(k);
      require_inside(sys, s, time);
      if (k % cfg.record_every == 0 || k == n)
        traj.samples.push_back({time, s});
    }
    return traj;
  }

  // step-doubling control: compare one h-step against two h/2-steps
  traj.method = "rk4_step_doubling";
  const double h_min = duration * 1e-12;
  double h = cfg.h > 0.0 ? cfg.h : duration / 100.0;
  double time = 0.0;
  State s = s0;
  while (time < duration) {
    h = std::min(h, duration - time);
    if (h < h_min)
      throw StepUnderflow("adaptive step fell below " + std::to_string(h_min));
    const State full = rk4_step(f, s, h);
    const State half = rk4_step(f, rk4_step(f, s, 0.5 * h), 0.5 * h);
    const double scale = 1.0 + std::sqrt(s.p.squaredNorm() + s.v.squaredNorm());
    const double err = state_gap(full, half) / 15.0;
    if (err <= cfg.rtol * scale) {
      time += h;
      // Richardson-extrapolated accept
      s.p = half.p + (half.p - full.p) / 15.0;
      s.v = half.v + (half.v - full.v) / 15.0;
      require_inside(sys, s, time);
      traj.samples.push_back({time, s});
    } else {
      ++traj.rejected_steps;
    }
    const double grow = err > 0.0 ? 0.9 * std::pow(cfg.rtol * scale / err, 0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  return traj;
}

double energy_drift(const SystemChart& sys, const Trajectory& traj) {
  const double e0 = energy(sys, traj.initial().p, traj.initial().v);
  if (e0 == 0.0) throw ZeroInitialEnergy("initial energy is zero");
  double worst = 0.0;
  for (const auto& sample : traj.samples)
    worst = std::max(worst,
                     std::abs(energy(sys, sample.state.p, sample.state.v) - e0));
  return worst / e0;
}

double phase_closure_gap(const SystemChart& sys, const Trajectory& traj) {
  const State& a = traj.initial();
  const State& b = traj.final();
  const double dt = std::remainder(b.p[0] - a.p[0], sys.period());
  const double dx = (b.p.tail(sys.dim() - 1) - a.p.tail(sys.dim() - 1)).squaredNorm();
  const double dv = (b.v - a.v).squaredNorm();
  return std::sqrt(dt * dt + dx + dv);
}

double closure_residual(const SystemChart& sys, double r,
                        const IntegratorConfig& cfg) {
  if (r <= 0.0) throw ConfigError("r", "speed factor must be positive");
  State s0{axis_point(sys, 0.0), Vec::Zero(sys.dim())};
  s0.v[0] = r;
  const Trajectory traj = integrate(sys, s0, sys.period() / r, cfg);
  return phase_closure_gap(sys, traj);
}

namespace {

bool uniform_times(const Trajectory& traj, double* h_out) {
  if (traj.samples.size() < 2) return false;
  const double h = traj.samples[1].time - traj.samples[0].time;
  const double span = traj.samples.back().time - traj.samples.front().time;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const double dk = traj.samples[k].time - traj.samples[k - 1].time;
    if (std::abs(dk - h) > 1e-9 * std::max(1.0, span)) return false;
  }
  *h_out = h;
  return true;
}

}  // namespace

double action_range(const SystemChart& sys, const Trajectory& traj,
                    std::size_t i0, std::size_t i1, double kappa) {
  if (i1 <= i0 || i1 >= traj.samples.size())
    throw ConfigError("range", "invalid sample range for action");
  std::vector<double> f;
  f.reserve(i1 - i0 + 1);
  for (std::size_t k = i0; k <= i1; ++k)
    f.push_back(lagrangian(sys, traj.samples[k].state.p, traj.samples[k].state.v, kappa));

  double h = 0.0;
  const bool uniform = uniform_times(traj, &h);
  if (!uniform) {
    double sum = 0.0;
    for (std::size_t k = i0; k < i1; ++k) {
      const double dt = traj.samples[k + 1].time - traj.samples[k].time;
      sum += 0.5 * dt * (f[k - i0] + f[k + 1 - i0]);
    }
    return sum;
  }

  // composite Simpson; a 3/8 block absorbs an odd interval count
  std::size_t n = i1 - i0;
  double sum = 0.0;
  std::size_t k = 0;
  if (n % 2 == 1) {
    if (n < 3) return 0.5 * h * (f[0] + f[1]);  // single interval: trapezoid
    sum += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
    k = 3;
  }
  for (; k + 2 <= n; k += 2)
    sum += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
  return sum;
}

double action(const SystemChart& sys, const Trajectory& traj, double kappa) {
  return action_range(sys, traj, 0, traj.samples.size() - 1, kappa);
}

void write_trajectory_csv(const SystemChart& sys, const Trajectory& traj,
                          std::ostream& os) {
  const int m = sys.dim();
  os << "time,t";
  for (int i = 2; i <= m; ++i) os << ",x" << i;
  for (int i = 1; i <= m; ++i) os << ",v" << i;
  os << ",energy\n";
  char buf[40];
  auto put = [&](double v, bool comma) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (comma) os << ',';
    os << buf;
  };
  for (const auto& sample : traj.samples) {
    put(sample.time, false);
    for (int i = 0; i < m; ++i) put(sample.state.p[i], true);
    for (int i = 0; i < m; ++i) put(sample.state.v[i], true);
    put(energy(sys, sample.state.p, sample.state.v), true);
    os << '\n';
  }
}

}  // namespace maglab
