#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maglab/chart.hpp"

namespace maglab {

enum class GeodesicClass { fails, geodesic_type, semi_strong, strong };

const char* to_string(GeodesicClass c);

struct VerifyOptions {
  int axis_samples = 512;
  int grid_samples = 4096;
  double tol = 1e-8;         // pass threshold for the residual checks
  double margin_tol = 1e-9;  // maximality margin allowed for "strong"
  std::uint64_t seed = 20260810;
};

/// Named residuals of the local conditions plus the derived diagnostics.
/// Residuals are sups over the sample set; they certify nothing beyond it.
struct VerificationReport {
  std::string system;
  GeodesicClass classification = GeodesicClass::fails;
  std::string failing_check;  // first failed gate when classification == fails

  double dual = 0.0;
  double kernel = 0.0;
  double geodesic = 0.0;
  double key_lemma_ad = 0.0;
  double key_lemma_identity = 0.0;
  double lorentz_kernel = 0.0;
  double pairing_constancy = 0.0;
  double strong_maximality_margin = 0.0;
  double field_periodicity = 0.0;

  bool exterior_bound_declared = false;
  bool exterior_bound_consistent = false;
  double axis_alpha_norm_sq = 0.0;

  VerifyOptions options;
  std::vector<std::string> conditional_on;

  bool passed(double value) const { return value <= options.tol; }
};

/// max_t |V(t,0) - s G(t,0) e1|_inf, s the declared core pairing speed.
double check_dual(const SystemChart& sys, int n_samples);

/// max_{t,l} |d_1 V_l - d_l V_1| on the axis.
double check_kernel(const SystemChart& sys, int n_samples);

/// max_{t,l} |2 d_1 g_{l1} - d_l g_11| on the axis.
double check_geodesic(const SystemChart& sys, int n_samples);

/// Axis gradient of rho = |alpha|_g^2 along two routes: forward AD through
/// <V, G^{-1} V>, and the identity 2 s dV_1 - s^2 dg_11.  Returns
/// (max |grad rho|, max route disagreement).  Requires the dual, kernel and
/// geodesic checks to pass first.
std::pair<double, double> check_key_lemma(const SystemChart& sys, int n_samples);

/// max_t |Y(t,0) e1|_inf.
double check_lorentz_kernel(const SystemChart& sys, int n_samples);

/// (sup of rho over the chart-ball grid) - (axis value of rho).
double check_strong_maximality(const SystemChart& sys, const VerifyOptions& opts);

/// Runs every check and assigns the strongest class whose gates pass.
/// Check failures are reported, never thrown.
VerificationReport classify(const SystemChart& sys, const VerifyOptions& opts = {});

}  // namespace maglab
