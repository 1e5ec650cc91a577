#include "maglab/verify.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "maglab/errors.hpp"
#include "maglab/sampling.hpp"

namespace maglab {

const char* to_string(GeodesicClass c) {
  switch (c) {
    case GeodesicClass::fails:
      return "fails";
    case GeodesicClass::geodesic_type:
      return "geodesic_type";
    case GeodesicClass::semi_strong:
      return "semi_strong";
    case GeodesicClass::strong:
      return "strong";
  }
  return "?";
}

double check_dual(const SystemChart& sys, int n_samples) {
  const double s = sys.core_speed();
  double worst = 0.0;
  for (const double t : axis_samples(sys, n_samples)) {
    const Vec p = axis_point(sys, t);
    const MetricJets mj = metric_jets(sys, p);
    const AlphaJets aj = alpha_jets(sys, p);
    worst = std::max(worst, (aj.V - s * mj.G.col(0)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_kernel(const SystemChart& sys, int n_samples) {
  double worst = 0.0;
  for (const double t : axis_samples(sys, n_samples)) {
    const AlphaJets aj = alpha_jets(sys, axis_point(sys, t));
    for (int l = 0; l < sys.dim(); ++l)
      worst = std::max(worst, std::abs(aj.dV(0, l) - aj.dV(l, 0)));
  }
  return worst;
}

double check_geodesic(const SystemChart& sys, int n_samples) {
  double worst = 0.0;
  for (const double t : axis_samples(sys, n_samples)) {
    const MetricJets mj = metric_jets(sys, axis_point(sys, t));
    for (int l = 0; l < sys.dim(); ++l)
      worst = std::max(worst,
                       std::abs(2.0 * mj.dG(0, l, 0) - mj.dG(l, 0, 0)));
  }
  return worst;
}

namespace {

// Gradient of rho = <V, G^{-1}V> from the field jets, using
// d(G^{-1}) = -G^{-1} (dG) G^{-1}.
Vec rho_gradient(const MetricJets& mj, const AlphaJets& aj) {
  const int m = static_cast<int>(aj.V.size());
  Eigen::LLT<Mat> llt(mj.G);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("metric not positive definite on the axis");
  const Vec w = llt.solve(aj.V);
  Vec grad(m);
  for (int d = 0; d < m; ++d) {
    double term = 2.0 * aj.dV.row(d).dot(w);
    double quad = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) quad += w[i] * mj.dG(d, i, j) * w[j];
    grad[d] = term - quad;
  }
  return grad;
}

struct KeyLemmaResiduals {
  double ad = 0.0;
  double identity = 0.0;
};

KeyLemmaResiduals key_lemma_residuals(const SystemChart& sys, int n_samples) {
  const double s = sys.core_speed();
  KeyLemmaResiduals out;
  for (const double t : axis_samples(sys, n_samples)) {
    const Vec p = axis_point(sys, t);
    const MetricJets mj = metric_jets(sys, p);
    const AlphaJets aj = alpha_jets(sys, p);
    const Vec grad = rho_gradient(mj, aj);
    for (int l = 0; l < sys.dim(); ++l) {
      out.ad = std::max(out.ad, std::abs(grad[l]));
      const double identity_route =
          2.0 * s * aj.dV(l, 0) - s * s * mj.dG(l, 0, 0);
      out.identity = std::max(out.identity, std::abs(identity_route - grad[l]));
    }
  }
  return out;
}

}  // namespace

std::pair<double, double> check_key_lemma(const SystemChart& sys, int n_samples) {
  const double tol = VerifyOptions{}.tol;
  if (check_dual(sys, n_samples) > tol || check_kernel(sys, n_samples) > tol ||
      check_geodesic(sys, n_samples) > tol)
    throw PreconditionFailed(
        "key lemma requires the dual, kernel and geodesic checks to pass");
  const KeyLemmaResiduals r = key_lemma_residuals(sys, n_samples);
  return {r.ad, r.identity};
}

double check_lorentz_kernel(const SystemChart& sys, int n_samples) {
  double worst = 0.0;
  for (const double t : axis_samples(sys, n_samples)) {
    const Mat Y = lorentz_at(sys, axis_point(sys, t));
    worst = std::max(worst, Y.col(0).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_strong_maximality(const SystemChart& sys, const VerifyOptions& opts) {
  if (!sys.exterior_alpha_bound())
    throw MissingExteriorBound(
        "strong-type maximality needs a declared exterior_alpha_bound");
  double grid_sup = 0.0;
  for (const Vec& p : ball_samples(sys, opts.grid_samples, opts.seed))
    grid_sup = std::max(grid_sup, alpha_norm_sq(sys, p));
  double axis_value = 0.0;
  for (const double t : axis_samples(sys, opts.axis_samples))
    axis_value = std::max(axis_value, alpha_norm_sq(sys, axis_point(sys, t)));
  return grid_sup - axis_value;
}

VerificationReport classify(const SystemChart& sys, const VerifyOptions& opts) {
  VerificationReport rep;
  rep.system = sys.name();
  rep.options = opts;

  rep.dual = check_dual(sys, opts.axis_samples);
  rep.kernel = check_kernel(sys, opts.axis_samples);
  rep.geodesic = check_geodesic(sys, opts.axis_samples);
  rep.lorentz_kernel = check_lorentz_kernel(sys, opts.axis_samples);

  // key-lemma routes are diagnostics; report them even when the gates fail
  const auto key = key_lemma_residuals(sys, opts.axis_samples);
  rep.key_lemma_ad = key.ad;
  rep.key_lemma_identity = key.identity;

  {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const double t : axis_samples(sys, opts.axis_samples)) {
      const double v1 = eval_value(
          sys.alpha_entry(0),
          std::span<const double>(axis_point(sys, t).data(),
                                  static_cast<std::size_t>(sys.dim())));
      if (first) {
        lo = hi = v1;
        first = false;
      } else {
        lo = std::min(lo, v1);
        hi = std::max(hi, v1);
      }
    }
    rep.pairing_constancy = hi - lo;
  }

  {
    double worst = 0.0;
    for (const ExprAst& f : sys.metric_upper())
      worst = std::max(worst, check_t_periodicity(f, sys.period(), 64));
    for (const ExprAst& f : sys.alpha())
      worst = std::max(worst, check_t_periodicity(f, sys.period(), 64));
    rep.field_periodicity = worst;
  }

  double axis_rho = 0.0;
  for (const double t : axis_samples(sys, opts.axis_samples))
    axis_rho = std::max(axis_rho, alpha_norm_sq(sys, axis_point(sys, t)));
  rep.axis_alpha_norm_sq = axis_rho;

  rep.exterior_bound_declared = sys.exterior_alpha_bound().has_value();
  if (rep.exterior_bound_declared) {
    const double b = *sys.exterior_alpha_bound();
    rep.exterior_bound_consistent = b * b <= axis_rho + opts.tol;
    rep.strong_maximality_margin = check_strong_maximality(sys, opts);
  } else {
    rep.strong_maximality_margin =
        std::numeric_limits<double>::quiet_NaN();
  }

  // hierarchy: {strong} <= {semi-strong} <= {geodesic type}
  if (rep.kernel > opts.tol) {
    rep.classification = GeodesicClass::fails;
    rep.failing_check = "kernel";
    return rep;
  }
  if (rep.geodesic > opts.tol) {
    rep.classification = GeodesicClass::fails;
    rep.failing_check = "geodesic";
    return rep;
  }
  rep.classification = GeodesicClass::geodesic_type;
  if (rep.dual > opts.tol) return rep;
  rep.classification = GeodesicClass::semi_strong;

  const bool strong = rep.exterior_bound_declared &&
                      rep.exterior_bound_consistent &&
                      sys.flags().gamma_nullhomologous &&
                      rep.strong_maximality_margin <= opts.margin_tol;
  if (strong) {
    rep.classification = GeodesicClass::strong;
    rep.conditional_on.push_back(
        "strong classification is conditional on the declared "
        "exterior_alpha_bound for the unmodeled exterior");
    rep.conditional_on.push_back(
        "coorientability holds by the chart trivialization");
    rep.conditional_on.push_back(
        "gamma_nullhomologous is a declared flag, not computed");
  }
  return rep;
}

}  // namespace maglab
