#pragma once

// Target-manifold metrics in a single chart, Christoffel symbols, geodesics and the
// distinguished-line test Σ_jk Γ^i_jk(a t) a_j a_k = a_i f(t).

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cyclicwave/scalar_function.hpp"

namespace cyclicwave {

enum class MetricFamily { conformal, diagonal_perturbed, custom };

/// φ(u) = (c0 + Σ_i c_i u_i^{p_i})^α with non-negative integer powers p_i.
/// Covers (1+u²+v²)^α, (1+u²+v⁴)^α, (1+|u|²)^α and (1+v)^{−ℓ}.
struct ConformalSpec {
  double c0 = 1.0;
  std::vector<double> coef;
  std::vector<int> power;
  double alpha = 1.0;

  int dim() const { return static_cast<int>(coef.size()); }
  double base(const Eigen::VectorXd& u) const;
  double value(const Eigen::VectorXd& u) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  /// Δ ln φ, analytic.
  double laplacian_log(const Eigen::VectorXd& u) const;
};

class MetricChart {
 public:
  using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  int dim() const noexcept { return m_; }
  MetricFamily family() const noexcept { return family_; }
  const std::string& describe() const noexcept { return name_; }

  Eigen::MatrixXd h(const Eigen::VectorXd& u) const;
  /// ∂h/∂u^k
  Eigen::MatrixXd dh(const Eigen::VectorXd& u, int k) const;
  /// Conformal factor for conformal and diagonal-perturbed families.
  const ConformalSpec* conformal_factor() const noexcept { return scalar_.get(); }

  friend MetricChart make_conformal(ConformalSpec spec);
  friend MetricChart make_diagonal_perturbed(ConformalSpec spec, double c);
  friend MetricChart make_custom(int m, MatrixFn h, std::string name);

 private:
  MetricChart() = default;
  int m_ = 0;
  MetricFamily family_ = MetricFamily::custom;
  std::string name_;
  std::shared_ptr<const ConformalSpec> scalar_;
  double perturb_ = 0.0;
  MatrixFn custom_;
};

MetricChart make_conformal(ConformalSpec spec);

/// h_ij = φ(δ_ij + H_ij), H_ij = c·tanh(D)(1 − δ_ij)/m, D = Σ_k (u_k − ū)².
/// H and its gradient vanish on the diagonal; requires |c| < 1.
MetricChart make_diagonal_perturbed(ConformalSpec spec, double c);

/// Arbitrary symmetric positive-definite h; derivatives by 4th-order central differences.
MetricChart make_custom(int m, MetricChart::MatrixFn h, std::string name = "custom");

namespace metrics {
ConformalSpec example1(double alpha);              // (1+u²+v²)^α
ConformalSpec example2(double ell);                // (1+v)^{−ℓ}, v > −1
ConformalSpec example3(double alpha);              // (1+u²+v⁴)^α
ConformalSpec example4(int m, double alpha);       // (1+|u|²)^α on ℝ^m
}  // namespace metrics

struct ChristoffelValue {
  Eigen::VectorXd u;
  int m = 0;
  std::vector<double> gamma;  // Γ^i_jk at (i·m + j)·m + k

  double operator()(int i, int j, int k) const { return gamma[(i * m + j) * m + k]; }
};

/// Γ^i_jk = ½ h^{il}(∂_j h_kl + ∂_k h_jl − ∂_l h_kj). Throws LinearSolveError with a condition
/// estimate when h(u) is not numerically positive definite.
ChristoffelValue christoffel(const MetricChart& chart, const Eigen::VectorXd& u);

/// c_i = Σ_jk Γ^i_jk(u) a_j a_k
Eigen::VectorXd contracted_christoffel(const MetricChart& chart, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& a);

struct LineSample {
  double t;
  double f;
  double residual;
};

struct DistinguishedLine {
  Eigen::VectorXd a;
  std::vector<LineSample> samples;
  double max_residual = 0.0;
};

DistinguishedLine check_self_coherence(const MetricChart& chart, const Eigen::VectorXd& a,
                                       double t_lo, double t_hi, int samples);

/// f(t) = Σ_i a_i c_i(a t) / Σ a_i² as a callable, with the chart's domain along the line.
ScalarFunction line_function(const MetricChart& chart, const Eigen::VectorXd& a);

struct GeodesicSample {
  double s;
  Eigen::VectorXd u;
  Eigen::VectorXd du;
};

struct GeodesicPath {
  std::vector<GeodesicSample> samples;
  double speed = 0.0;           // h(u0)(v0, v0)
  double max_speed_drift = 0.0; // max relative deviation of h(u)(u̇, u̇) from speed
  bool truncated = false;       // chart bound or chart domain reached before s_max
  double s_end = 0.0;
};

inline constexpr double kChartBound = 1e6;

/// Integrates ü^i + Γ^i_jk u̇^j u̇^k = 0 and samples it at `samples`+1 uniform s.
GeodesicPath geodesic_full(const MetricChart& chart, const Eigen::VectorXd& u0,
                           const Eigen::VectorXd& v0, double s_max, double tol = 1e-10,
                           int samples = 300);

/// ü + f(u) u̇² = 0, u(0) = u_init, u̇(0) = xi_hat. Path entries are 1-vectors.
GeodesicPath geodesic_reduced(const ScalarFunction& f, double xi_hat, double s_max,
                              double tol = 1e-10, int samples = 300, double u_init = 0.0);

/// ξ̂ = (Σ_jk h_jk(u) a_j a_k)^{-1/2}, the unit-speed rate along a.
double unit_rate(const MetricChart& chart, const Eigen::VectorXd& u, const Eigen::VectorXd& a);

/// K = −(1/φ) Δ ln φ for a 2-D conformal chart: the scalar curvature, twice the Gaussian
/// curvature.
double scalar_curvature(const MetricChart& chart, const Eigen::VectorXd& u);

/// −(1/(2φ)) Δ ln φ, the Gaussian curvature of φ δ_ij.
double gaussian_curvature(const MetricChart& chart, const Eigen::VectorXd& u);

/// CSV `s,u1,...,um,du1,...,dum`
std::string path_csv(const GeodesicPath& path);

}  // namespace cyclicwave
