#include "maglab/construct.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "maglab/ast_build.hpp"
#include "maglab/errors.hpp"
#include "maglab/sampling.hpp"

namespace maglab {

double bump(const BumpProfile& profile, double s) {
  if (!(profile.r0 < profile.r1))
    throw ConfigError("bump", "requires r0 < r1");
  return bump_value(s, profile.r0, profile.r1);
}

BumpProfile default_profile(double R) { return {R / 4.0, 3.0 * R / 4.0}; }

namespace {

namespace ab = maglab::ast;

void validate_profile(const BumpProfile& profile, double R) {
  if (!(0.0 < profile.r0 && profile.r0 < profile.r1 && profile.r1 <= R))
    throw ConfigError("bump", "requires 0 < r0 < r1 <= R");
}

// chi(|x|) realized as a cutoff of the squared radius so jets stay smooth on
// the axis: plateau for |x| <= r0, zero for |x| >= r1.
ExprPtr chi_field(int m, const BumpProfile& profile) {
  return ab::bump(ab::radius_sq(m), profile.r0 * profile.r0,
                  profile.r1 * profile.r1);
}

ExprPtr blend(const ExprPtr& chi, const ExprPtr& inner, const ExprPtr& outer) {
  return ab::add(ab::mul(chi, inner),
                 ab::mul(ab::sub(ab::cst(1.0), chi), outer));
}

std::vector<ExprAst> wrap_fields(const std::vector<ExprPtr>& fields, int m) {
  std::vector<ExprAst> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.emplace_back(f, m);
  return out;
}

bool is_identity_metric(const SystemChart& sys) {
  const int m = sys.dim();
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double v;
      if (!ab::is_const(sys.metric_entry(i, j).root(), &v)) return false;
      if (v != (i == j ? 1.0 : 0.0)) return false;
    }
  return true;
}

// |alpha|_g^2 as a printable field: sum V_l^2 over an identity metric,
// <V, adj(G) V> / det(G) otherwise.
ExprPtr rho_field(const SystemChart& sys) {
  const int m = sys.dim();
  if (is_identity_metric(sys)) {
    ExprPtr sum = ab::cst(0.0);
    for (int l = 0; l < m; ++l)
      sum = ab::add(sum, ab::pow(sys.alpha_entry(l).root(), 2));
    return sum;
  }
  std::vector<ExprPtr> g(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g[static_cast<std::size_t>(i * m + j)] = sys.metric_entry(i, j).root();
  const std::vector<ExprPtr> adj = ab::matrix_adjugate(g, m);
  const ExprPtr det = ab::matrix_determinant(g, m);
  ExprPtr quad = ab::cst(0.0);
  for (int i = 0; i < m; ++i) {
    ExprPtr row = ab::cst(0.0);
    for (int j = 0; j < m; ++j)
      row = ab::add(row, ab::mul(adj[static_cast<std::size_t>(i * m + j)],
                                 sys.alpha_entry(j).root()));
    quad = ab::add(quad, ab::mul(sys.alpha_entry(i).root(), row));
  }
  return ab::div(quad, det);
}

double measured_axis_rho(const SystemChart& sys, int n_samples) {
  double value = 0.0;
  for (const double t : axis_samples(sys, n_samples))
    value = std::max(value, alpha_norm_sq(sys, axis_point(sys, t)));
  return value;
}

}  // namespace

double pd_radius_search(const SystemChart& sys, double R0,
                        const VerifyOptions& opts) {
  const double r_min = 1e-3 * R0;
  double r = R0;
  for (int iter = 0; iter < 80; ++iter) {
    SystemChart probe("pd_probe", sys.dim(), sys.period(), r,
                      sys.metric_upper(), sys.alpha(), sys.flags(),
                      sys.exterior_alpha_bound(), sys.core_speed());
    bool ok = true;
    double scale = 1.0;
    for (const Vec& p : ball_samples(probe, opts.grid_samples, opts.seed)) {
      const int m = sys.dim();
      Mat G(m, m);
      std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
      for (int i = 0; i < m && ok; ++i)
        for (int j = i; j < m; ++j) {
          const double v = eval_value(probe.metric_entry(i, j), pt);
          G(i, j) = v;
          G(j, i) = v;
        }
      Eigen::SelfAdjointEigenSolver<Mat> es(G, Eigen::EigenvaluesOnly);
      scale = std::max(scale, es.eigenvalues().cwiseAbs().maxCoeff());
      if (es.eigenvalues().minCoeff() <= 1e-10 * scale) {
        ok = false;
        break;
      }
    }
    if (ok) return r;
    r *= 0.9;
    if (r < r_min)
      throw NoPositiveRadius(
          "positive-definiteness search collapsed below " + std::to_string(r_min));
  }
  throw NoPositiveRadius("positive-definiteness search did not converge");
}

ConstructionReport build_alpha_from_metric(
    const SystemChart& sys,
    const std::optional<std::vector<ExprAst>>& exterior_alpha,
    const BumpProfile& profile, const VerifyOptions& opts) {
  const int m = sys.dim();
  validate_profile(profile, sys.radius());

  const double geo = check_geodesic(sys, opts.axis_samples);
  if (geo > opts.tol)
    throw NotAGeodesic("axis loop is not a geodesic of the input metric "
                       "(residual " + std::to_string(geo) + ")");
  if (exterior_alpha && exterior_alpha->size() != static_cast<std::size_t>(m))
    throw ConfigError("exterior.alpha", "expected m components");

  // V_1 = g_11(t,0) + sum_l d_t g_l1(t,0) x_l;  V_l = g_l1(t,0)
  std::vector<ExprPtr> inner(static_cast<std::size_t>(m));
  ExprPtr v1 = ab::restrict_to_axis(sys.metric_entry(0, 0).root());
  for (int l = 1; l < m; ++l) {
    const ExprPtr gl1 = ab::restrict_to_axis(sys.metric_entry(l, 0).root());
    v1 = ab::add(v1, ab::mul(ab::ddt(gl1), ab::var(l)));
    inner[static_cast<std::size_t>(l)] = gl1;
  }
  inner[0] = v1;

  const ExprPtr chi = chi_field(m, profile);
  std::vector<ExprPtr> blended(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) {
    const ExprPtr outer =
        exterior_alpha ? (*exterior_alpha)[static_cast<std::size_t>(l)].root()
                       : ab::cst(0.0);
    blended[static_cast<std::size_t>(l)] =
        blend(chi, inner[static_cast<std::size_t>(l)], outer);
  }

  std::optional<double> bound = sys.exterior_alpha_bound();
  if (!exterior_alpha) bound = 0.0;  // the default exterior covector vanishes

  SystemChart out(sys.name() + ".alpha_from_metric", m, sys.period(),
                  sys.radius(), sys.metric_upper(), wrap_fields(blended, m),
                  sys.flags(), bound, 1.0);

  ConstructionReport rep{out, pd_radius_search(out, sys.radius(), opts),
                         classify(out, opts),
                         "covector field from the metric's first column on "
                         "the axis (value and first t-derivatives), blended "
                         "to the declared exterior across the bump band"};
  return rep;
}

ConstructionReport build_metric_from_alpha(
    const SystemChart& sys,
    const std::optional<std::vector<ExprAst>>& exterior_metric,
    const BumpProfile& profile, const VerifyOptions& opts) {
  const int m = sys.dim();
  validate_profile(profile, sys.radius());

  const double ker = check_kernel(sys, opts.axis_samples);
  if (ker > opts.tol)
    throw KernelConditionFailed(
        "axis kernel condition d1 V_l = d_l V_1 fails (residual " +
        std::to_string(ker) + ")");

  // constant positive pairing V_1(t, 0) = c
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const double t : axis_samples(sys, opts.axis_samples)) {
    const Vec p = axis_point(sys, t);
    const double v1 = eval_value(
        sys.alpha_entry(0),
        std::span<const double>(p.data(), static_cast<std::size_t>(m)));
    if (first) {
      lo = hi = v1;
      first = false;
    } else {
      lo = std::min(lo, v1);
      hi = std::max(hi, v1);
    }
  }
  const double c = 0.5 * (lo + hi);
  if (hi - lo > 1e-9 * std::max(1.0, std::abs(c)))
    throw NonConstantPairing("V_1 on the axis varies by " + std::to_string(hi - lo));
  if (c <= 0.0)
    throw NonConstantPairing("axis pairing must be a positive constant");

  // non-unit pairing: reparametrize the chart, T <- c T
  double T_out = sys.period();
  std::vector<ExprPtr> V(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) V[static_cast<std::size_t>(l)] = sys.alpha_entry(l).root();
  if (std::abs(c - 1.0) > 1e-13) {
    T_out = sys.period() * c;
    for (int l = 0; l < m; ++l)
      V[static_cast<std::size_t>(l)] = ab::scale_t(V[static_cast<std::size_t>(l)], 1.0 / c);
    V[0] = ab::mul(ab::cst(1.0 / c), V[0]);
  }

  // axis loop G~(t) = B(t)^T B(t), first row of B is (1, V_2, ..., V_m)(t,0):
  //   G~_11 = 1, G~_1j = V_j, G~_ij = V_i V_j + delta_ij
  std::vector<ExprPtr> axis_v(static_cast<std::size_t>(m));
  for (int l = 1; l < m; ++l)
    axis_v[static_cast<std::size_t>(l)] =
        ab::restrict_to_axis(V[static_cast<std::size_t>(l)]);

  auto upper_index = [m](int i, int j) {
    return static_cast<std::size_t>(i * m - i * (i - 1) / 2 + (j - i));
  };
  std::vector<ExprPtr> inner(static_cast<std::size_t>(m * (m + 1) / 2));
  ExprPtr g11 = ab::cst(1.0);
  for (int l = 1; l < m; ++l)
    g11 = ab::add(g11, ab::mul(ab::mul(ab::cst(2.0),
                                       ab::ddt(axis_v[static_cast<std::size_t>(l)])),
                               ab::var(l)));
  inner[upper_index(0, 0)] = g11;
  for (int j = 1; j < m; ++j)
    inner[upper_index(0, j)] = axis_v[static_cast<std::size_t>(j)];
  for (int i = 1; i < m; ++i)
    for (int j = i; j < m; ++j) {
      ExprPtr e = ab::mul(axis_v[static_cast<std::size_t>(i)],
                          axis_v[static_cast<std::size_t>(j)]);
      if (i == j) e = ab::add(e, ab::cst(1.0));
      inner[upper_index(i, j)] = e;
    }

  if (exterior_metric &&
      exterior_metric->size() != static_cast<std::size_t>(m * (m + 1) / 2))
    throw ConfigError("exterior.metric", "expected the full upper triangle");

  const ExprPtr chi = chi_field(m, profile);
  std::vector<ExprPtr> blended(inner.size());
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const std::size_t k = upper_index(i, j);
      const ExprPtr outer = exterior_metric
                                ? (*exterior_metric)[k].root()
                                : ab::cst(i == j ? 1.0 : 0.0);
      blended[k] = blend(chi, inner[k], outer);
    }

  SystemChart out(sys.name() + ".metric_from_alpha", m, T_out, sys.radius(),
                  wrap_fields(blended, m), wrap_fields(V, m), sys.flags(),
                  sys.exterior_alpha_bound(), 1.0);
  const double r_valid = pd_radius_search(out, sys.radius(), opts);
  SystemChart trimmed(out.name(), m, T_out, r_valid, out.metric_upper(),
                      out.alpha(), out.flags(), out.exterior_alpha_bound(), 1.0);

  ConstructionReport rep{trimmed, r_valid, classify(trimmed, opts),
                         "metric from the covector's axis loop B(t)^T B(t), "
                         "extended to first order off the axis and blended "
                         "to the declared exterior across the bump band"};
  return rep;
}

namespace {

struct RescaleParts {
  ExprPtr rho;
  ExprPtr rho_tilde;
  double beta;
  double axis_rho;
};

RescaleParts rescale_parts(const SystemChart& sys, const BumpProfile& profile,
                           std::optional<double> beta_in,
                           const VerifyOptions& opts) {
  const VerificationReport rep = classify(sys, opts);
  if (rep.classification != GeodesicClass::semi_strong &&
      rep.classification != GeodesicClass::strong)
    throw NotSemiStrong("rescaling requires a semi-strong input; got " +
                        std::string(to_string(rep.classification)));

  double sup_rho = 0.0, min_rho = std::numeric_limits<double>::infinity();
  for (const Vec& p : ball_samples(sys, opts.grid_samples, opts.seed)) {
    const double r = alpha_norm_sq(sys, p);
    sup_rho = std::max(sup_rho, r);
    min_rho = std::min(min_rho, r);
  }
  if (min_rho <= 0.0)
    throw NonPositiveRho("|alpha|_g^2 reaches " + std::to_string(min_rho) +
                         " on the chart ball");

  RescaleParts parts;
  parts.rho = rho_field(sys);
  parts.beta = beta_in ? *beta_in : 1.0 + sup_rho;
  if (parts.beta <= 0.0) throw ConfigError("beta", "must be positive");
  const ExprPtr chi = chi_field(sys.dim(), profile);
  // rho~ = rho + beta (1 - chi): equals rho on K, dominates rho outside
  parts.rho_tilde =
      ab::add(parts.rho, ab::mul(ab::cst(parts.beta), ab::sub(ab::cst(1.0), chi)));
  parts.axis_rho = measured_axis_rho(sys, opts.axis_samples);
  return parts;
}

void rescale_diagnostics(const SystemChart& out, const VerifyOptions& opts,
                         ConstructionReport* rep, const BumpProfile& profile) {
  double ratio_max = 0.0;
  double core_gap = 0.0;
  for (const Vec& p : ball_samples(out, opts.grid_samples, opts.seed + 1)) {
    const double ratio = alpha_norm_sq(out, p);
    ratio_max = std::max(ratio_max, ratio);
    if (transverse_radius(p) <= profile.r0)
      core_gap = std::max(core_gap, std::abs(ratio - 1.0));
  }
  rep->rho_ratio_max = ratio_max;
  rep->rho_ratio_core_gap = core_gap;
}

}  // namespace

ConstructionReport rescale_metric(const SystemChart& sys,
                                  const BumpProfile& profile,
                                  std::optional<double> beta,
                                  const VerifyOptions& opts) {
  const int m = sys.dim();
  validate_profile(profile, sys.radius());
  const RescaleParts parts = rescale_parts(sys, profile, beta, opts);

  std::vector<ExprPtr> scaled;
  scaled.reserve(sys.metric_upper().size());
  for (const ExprAst& g : sys.metric_upper())
    scaled.push_back(ab::mul(parts.rho_tilde, g.root()));

  const double core_speed_out = sys.core_speed() / parts.axis_rho;
  SystemChart out(sys.name() + ".rescaled_metric", m, sys.period(),
                  sys.radius(), wrap_fields(scaled, m), sys.alpha(),
                  sys.flags(), 1.0, core_speed_out);

  ConstructionReport rep{out, pd_radius_search(out, sys.radius(), opts),
                         classify(out, opts),
                         "conformal metric rescale by rho~ = rho + beta (1 - "
                         "chi_K); |alpha|_{g~}^2 = rho/rho~ is 1 on K and <= 1 "
                         "elsewhere"};
  rep.beta = parts.beta;
  rescale_diagnostics(out, opts, &rep, profile);
  return rep;
}

ConstructionReport rescale_alpha(const SystemChart& sys,
                                 const BumpProfile& profile,
                                 std::optional<double> beta,
                                 const VerifyOptions& opts) {
  const int m = sys.dim();
  validate_profile(profile, sys.radius());
  const RescaleParts parts = rescale_parts(sys, profile, beta, opts);

  const ExprPtr scale = ab::div(ab::cst(1.0), ab::sqrt(parts.rho_tilde));
  std::vector<ExprPtr> scaled;
  scaled.reserve(sys.alpha().size());
  for (const ExprAst& a : sys.alpha()) scaled.push_back(ab::mul(scale, a.root()));

  const double core_speed_out = sys.core_speed() / std::sqrt(parts.axis_rho);
  SystemChart out(sys.name() + ".rescaled_alpha", m, sys.period(), sys.radius(),
                  sys.metric_upper(), wrap_fields(scaled, m), sys.flags(), 1.0,
                  core_speed_out);

  ConstructionReport rep{out, pd_radius_search(out, sys.radius(), opts),
                         classify(out, opts),
                         "covector rescale alpha~ = alpha / sqrt(rho~); the "
                         "axis two-form is unchanged after unit normalization"};
  rep.beta = parts.beta;
  rescale_diagnostics(out, opts, &rep, profile);

  // d(alpha~) = d(alpha)/sqrt(axis rho) along the axis
  const double unit = 1.0 / std::sqrt(parts.axis_rho);
  double drift = 0.0;
  for (const double t : axis_samples(sys, opts.axis_samples)) {
    const Vec p = axis_point(sys, t);
    const Mat gap = two_form_at(out, p) - unit * two_form_at(sys, p);
    drift = std::max(drift, gap.cwiseAbs().maxCoeff());
  }
  rep.two_form_axis_drift = drift;
  return rep;
}

}  // namespace maglab
