#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "maglab/chart.hpp"
#include "maglab/verify.hpp"

namespace maglab {

/// Smooth cutoff profile: identically 1 for s <= r0, identically 0 for
/// s >= r1, strictly monotone in between.
struct BumpProfile {
  double r0;
  double r1;
};

double bump(const BumpProfile& profile, double s);

/// Default profile for a chart of radius R: plateau on |x| <= R/4, support
/// inside |x| <= 3R/4.
BumpProfile default_profile(double R);

struct ConstructionReport {
  SystemChart system;
  double certified_radius = 0.0;  // <= the input chart radius
  VerificationReport verification;
  std::string provenance;

  // rescaling diagnostics (NaN when not applicable)
  double beta = std::numeric_limits<double>::quiet_NaN();
  double rho_ratio_max = std::numeric_limits<double>::quiet_NaN();
  double rho_ratio_core_gap = std::numeric_limits<double>::quiet_NaN();
  double two_form_axis_drift = std::numeric_limits<double>::quiet_NaN();
};

/// Largest radius r <= R0 (geometric shrink) at which the metric fields stay
/// positive definite with a margin on a dense sample grid.  Throws
/// NoPositiveRadius when the search collapses below 1e-3 * R0.
double pd_radius_search(const SystemChart& sys, double R0,
                        const VerifyOptions& opts);

/// Builds the covector field from the metric's first column on the axis
/// (value plus first t-derivatives), blended to `exterior_alpha` (default:
/// the zero covector) across the bump transition band.  The input loop must
/// already be a geodesic of the metric.
ConstructionReport build_alpha_from_metric(
    const SystemChart& sys,
    const std::optional<std::vector<ExprAst>>& exterior_alpha,
    const BumpProfile& profile, const VerifyOptions& opts = {});

/// Builds the metric from a covector field satisfying the axis kernel
/// condition with constant positive pairing.  A non-unit pairing c is
/// absorbed by reparametrizing the chart (T <- c T).  The axis loop of
/// symmetric matrices B(t)^T B(t) is extended to first order off the axis and
/// blended to `exterior_metric` (default: identity).
ConstructionReport build_metric_from_alpha(
    const SystemChart& sys,
    const std::optional<std::vector<ExprAst>>& exterior_metric,
    const BumpProfile& profile, const VerifyOptions& opts = {});

/// Conformal rescale g~ = rho~ g with rho~ = rho + beta (1 - chi_K),
/// K = {|x| <= r0}; makes |alpha|_{g~} maximal along the core loop.
ConstructionReport rescale_metric(const SystemChart& sys,
                                  const BumpProfile& profile,
                                  std::optional<double> beta = {},
                                  const VerifyOptions& opts = {});

/// Covector rescale alpha~ = alpha / sqrt(rho~); leaves the metric alone and
/// the axis two-form unchanged (after unit normalization).
ConstructionReport rescale_alpha(const SystemChart& sys,
                                 const BumpProfile& profile,
                                 std::optional<double> beta = {},
                                 const VerifyOptions& opts = {});

}  // namespace maglab
