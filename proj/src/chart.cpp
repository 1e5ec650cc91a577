#include "maglab/chart.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "maglab/errors.hpp"

namespace maglab {

namespace {

std::size_t upper_index(int m, int i, int j) {
  // row-major upper triangle, i <= j
  return static_cast<std::size_t>(i * m - i * (i - 1) / 2 + (j - i));
}

void require_in_chart(const SystemChart& sys, const Vec& p) {
  if (p.size() != sys.dim()) throw Error("point dimension does not match the chart");
  const double r = transverse_radius(p);
  if (r > sys.radius() * (1.0 + 1e-12))
    throw OutOfChart("point at |x| = " + std::to_string(r) +
                     " is outside the chart ball of radius " +
                     std::to_string(sys.radius()));
}

Eigen::LLT<Mat> factorize(const Mat& G) {
  Eigen::LLT<Mat> llt(G);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite(
        "metric is not positive definite at the requested point (the chart "
        "ball exceeds the construction's validity region)");
  return llt;
}

}  // namespace

SystemChart::SystemChart(std::string name, int m, double T, double R,
                         std::vector<ExprAst> metric_upper,
                         std::vector<ExprAst> alpha, ChartFlags flags,
                         std::optional<double> exterior_alpha_bound,
                         double core_speed)
    : name_(std::move(name)),
      m_(m),
      T_(T),
      R_(R),
      metric_upper_(std::move(metric_upper)),
      alpha_(std::move(alpha)),
      flags_(flags),
      exterior_alpha_bound_(exterior_alpha_bound),
      core_speed_(core_speed) {
  if (m_ < 3 || m_ > kMaxDim)
    throw ConfigError("m", "chart dimension must be in [3, " + std::to_string(kMaxDim) + "]");
  if (T_ <= 0.0) throw ConfigError("T", "period must be positive");
  if (R_ <= 0.0) throw ConfigError("R", "chart radius must be positive");
  if (metric_upper_.size() != static_cast<std::size_t>(m_ * (m_ + 1) / 2))
    throw ConfigError("metric", "expected the full upper triangle of G");
  if (alpha_.size() != static_cast<std::size_t>(m_))
    throw ConfigError("alpha", "expected m covector components");
  if (core_speed_ <= 0.0) throw ConfigError("core_speed", "must be positive");
}

const ExprAst& SystemChart::metric_entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  return metric_upper_[upper_index(m_, i, j)];
}

SystemChart SystemChart::with_name(std::string name) const {
  SystemChart out = *this;
  out.name_ = std::move(name);
  return out;
}

Vec axis_point(const SystemChart& sys, double t) {
  Vec p = Vec::Zero(sys.dim());
  p[0] = t;
  return p;
}

double transverse_radius(const Vec& p) {
  return p.tail(p.size() - 1).norm();
}

MetricJets metric_jets(const SystemChart& sys, const Vec& p) {
  const int m = sys.dim();
  MetricJets out{Mat(m, m), Tensor3(m)};
  std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const Jet jet = eval_jet(sys.metric_entry(i, j), pt);
      out.G(i, j) = jet.value;
      out.G(j, i) = jet.value;
      for (int k = 0; k < m; ++k) {
        out.dG(k, i, j) = jet.partial(k);
        out.dG(k, j, i) = jet.partial(k);
      }
    }
  }
  return out;
}

AlphaJets alpha_jets(const SystemChart& sys, const Vec& p) {
  const int m = sys.dim();
  AlphaJets out{Vec(m), Mat(m, m)};
  std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const Jet jet = eval_jet(sys.alpha_entry(j), pt);
    out.V[j] = jet.value;
    for (int i = 0; i < m; ++i) out.dV(i, j) = jet.partial(i);
  }
  return out;
}

Mat metric_at(const SystemChart& sys, const Vec& p) {
  require_in_chart(sys, p);
  const int m = sys.dim();
  Mat G(m, m);
  std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double v = eval_value(sys.metric_entry(i, j), pt);
      G(i, j) = v;
      G(j, i) = v;
    }
  factorize(G);
  return G;
}

Tensor3 christoffel(const SystemChart& sys, const Vec& p) {
  require_in_chart(sys, p);
  const int m = sys.dim();
  const MetricJets mj = metric_jets(sys, p);
  const auto llt = factorize(mj.G);
  Tensor3 gamma(m);
  Vec rhs(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      for (int l = 0; l < m; ++l)
        rhs[l] = 0.5 * (mj.dG(i, l, j) + mj.dG(j, l, i) - mj.dG(l, i, j));
      const Vec g = llt.solve(rhs);
      for (int k = 0; k < m; ++k) {
        gamma(k, i, j) = g[k];
        gamma(k, j, i) = g[k];
      }
    }
  }
  return gamma;
}

Mat two_form_at(const SystemChart& sys, const Vec& p) {
  require_in_chart(sys, p);
  const int m = sys.dim();
  const AlphaJets aj = alpha_jets(sys, p);
  Mat sigma = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double s = aj.dV(i, j) - aj.dV(j, i);
      sigma(i, j) = s;
      sigma(j, i) = -s;  // antisymmetric by construction
    }
  return sigma;
}

Mat lorentz_at(const SystemChart& sys, const Vec& p) {
  require_in_chart(sys, p);
  const Mat G = metric_at(sys, p);
  const Mat sigma = two_form_at(sys, p);
  // g(Yu, v) = sigma(u, v)  <=>  G Y = Sigma^T
  return factorize(G).solve(sigma.transpose());
}

double energy(const SystemChart& sys, const Vec& p, const Vec& v) {
  require_in_chart(sys, p);
  const int m = sys.dim();
  Mat G(m, m);
  std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double g = eval_value(sys.metric_entry(i, j), pt);
      G(i, j) = g;
      G(j, i) = g;
    }
  return 0.5 * v.dot(G * v);
}

double alpha_norm_sq(const SystemChart& sys, const Vec& p) {
  require_in_chart(sys, p);
  const Mat G = metric_at(sys, p);
  const int m = sys.dim();
  Vec V(m);
  std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) V[j] = eval_value(sys.alpha_entry(j), pt);
  return V.dot(factorize(G).solve(V));
}

double lagrangian(const SystemChart& sys, const Vec& p, const Vec& v, double kappa) {
  require_in_chart(sys, p);
  const int m = sys.dim();
  Mat G(m, m);
  Vec V(m);
  std::span<const double> pt(p.data(), static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double g = eval_value(sys.metric_entry(i, j), pt);
      G(i, j) = g;
      G(j, i) = g;
    }
  for (int j = 0; j < m; ++j) V[j] = eval_value(sys.alpha_entry(j), pt);
  return 0.5 * v.dot(G * v) - V.dot(v) + kappa;
}

}  // namespace maglab
