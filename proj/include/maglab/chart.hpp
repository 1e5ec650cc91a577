#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "maglab/expr.hpp"

namespace maglab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense rank-3 array; Christoffel storage is symmetric in the last two slots.
class Tensor3 {
 public:
  explicit Tensor3(int m) : m_(m), a_(static_cast<std::size_t>(m * m * m), 0.0) {}
  double& operator()(int k, int i, int j) { return a_[idx(k, i, j)]; }
  double operator()(int k, int i, int j) const { return a_[idx(k, i, j)]; }
  int dim() const { return m_; }

 private:
  std::size_t idx(int k, int i, int j) const {
    return static_cast<std::size_t>((k * m_ + i) * m_ + j);
  }
  int m_;
  std::vector<double> a_;
};

struct ChartFlags {
  bool gamma_nullhomologous = false;
  bool gamma_contractible = false;
};

/// Magnetic system on the tubular chart S^1 x R^{m-1}.  The core loop is
/// always t -> (t, 0, ..., 0); its chart velocity is e1.  `core_speed` is the
/// constant pairing of alpha with e1 on the axis (1 for a unit-speed core).
class SystemChart {
 public:
  SystemChart(std::string name, int m, double T, double R,
              std::vector<ExprAst> metric_upper, std::vector<ExprAst> alpha,
              ChartFlags flags, std::optional<double> exterior_alpha_bound = {},
              double core_speed = 1.0);

  const std::string& name() const { return name_; }
  int dim() const { return m_; }
  double period() const { return T_; }
  double radius() const { return R_; }
  const ChartFlags& flags() const { return flags_; }
  std::optional<double> exterior_alpha_bound() const { return exterior_alpha_bound_; }
  double core_speed() const { return core_speed_; }

  /// Symmetric access backed by upper-triangle storage.
  const ExprAst& metric_entry(int i, int j) const;
  const ExprAst& alpha_entry(int i) const { return alpha_[static_cast<std::size_t>(i)]; }
  const std::vector<ExprAst>& metric_upper() const { return metric_upper_; }
  const std::vector<ExprAst>& alpha() const { return alpha_; }

  SystemChart with_name(std::string name) const;

 private:
  std::string name_;
  int m_;
  double T_, R_;
  std::vector<ExprAst> metric_upper_;  // row-major upper triangle, i <= j
  std::vector<ExprAst> alpha_;
  ChartFlags flags_;
  std::optional<double> exterior_alpha_bound_;
  double core_speed_;
};

Vec axis_point(const SystemChart& sys, double t);
double transverse_radius(const Vec& p);

struct MetricJets {
  Mat G;
  Tensor3 dG;  // dG(k, i, j) = d_k g_ij
};

struct AlphaJets {
  Vec V;
  Mat dV;  // dV(i, j) = d_i V_j
};

MetricJets metric_jets(const SystemChart& sys, const Vec& p);
AlphaJets alpha_jets(const SystemChart& sys, const Vec& p);

/// G(p), checked symmetric positive definite by factorization.
Mat metric_at(const SystemChart& sys, const Vec& p);

/// Levi-Civita Christoffel symbols Gamma^k_ij at p.
Tensor3 christoffel(const SystemChart& sys, const Vec& p);

/// Coordinate matrix of d(alpha): entry (i,j) = d_i V_j - d_j V_i.
Mat two_form_at(const SystemChart& sys, const Vec& p);

/// Lorentz force matrix Y with g(Yu, v) = sigma(u, v), i.e. GY = Sigma^T.
Mat lorentz_at(const SystemChart& sys, const Vec& p);

double energy(const SystemChart& sys, const Vec& p, const Vec& v);

/// rho = |alpha|_g^2 = <V, G^{-1} V>.
double alpha_norm_sq(const SystemChart& sys, const Vec& p);

/// L(p, v) + kappa = 1/2 v^T G v - <V, v> + kappa.
double lagrangian(const SystemChart& sys, const Vec& p, const Vec& v, double kappa);

}  // namespace maglab
