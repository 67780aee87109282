#pragma once

// Monodromy matrices of the Hill equation, Floquet multipliers, instability-interval
// scanning and closed-form multi-period solution values.
//
// State convention: x = (w_t, w), so X(1,0) applied to (1, 0) propagates the solution
// with w(0) = 0, w_t(0) = 1 and b21 is its value w(1).

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclicwave/coeffs.hpp"

namespace cyclicwave {

struct Monodromy {
  double b11 = 1.0, b12 = 0.0, b21 = 0.0, b22 = 1.0;
  double lambda = 0.0;
  double det = 1.0;
  double trace = 2.0;
};

enum class StabilityClass { stable, unstable, boundary };

std::string to_string(StabilityClass c);

struct MultiplierPair {
  StabilityClass cls = StabilityClass::boundary;
  /// |multiplier| > 1 in the unstable case; 1 otherwise.
  double mu0 = 1.0;
  /// +1 if the growing multiplier is mu0, −1 if it is −mu0 (trace < −2).
  int sign = 1;
  /// Rotation angle θ ∈ [0, π] with multipliers e^{±iθ} in the stable case.
  double angle = 0.0;

  double signed_multiplier() const noexcept { return sign * mu0; }
};

struct InstabilityInterval {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double max_abs_trace = 0.0;
  double witness_lambda = 0.0;
};

struct ChartRow {
  double lambda;
  double trace;
  StabilityClass cls;
};

struct StabilityScan {
  std::vector<ChartRow> chart;                  // one row per grid point, sorted by λ
  std::vector<InstabilityInterval> intervals;   // sorted, disjoint
};

inline constexpr double kBoundaryBand = 1e-9;

/// X_λ(1, 0) by adaptive Dormand-Prince integration of the 2x2 first-order system.
Monodromy monodromy(const HillPotential& pot, double lambda, double tol = 1e-12);

MultiplierPair classify(const Monodromy& m, double boundary_tol = kBoundaryBand);

/// Uniform λ grid on [lo, hi] with grid_points nodes; super-threshold runs refined by bisection
/// on |trace| − 2. Grid evaluation runs in parallel; output is deterministic.
StabilityScan scan_stability(const HillPotential& pot, double lo, double hi, int grid_points,
                             double tol = 1e-12);

std::vector<InstabilityInterval> scan_instability(const HillPotential& pot, double lo, double hi,
                                                  int grid_points, double tol = 1e-12);

struct GoodLambda {
  double lambda;
  Monodromy m;
  MultiplierPair multipliers;
};

/// A λ strictly inside one of the intervals with |b21| > 1e-6 and |b22 − μ^{-1}| > 1e-6
/// (μ the signed growing multiplier). Intervals are tried in decreasing max |trace| order,
/// witness first, then a golden-ratio sequence of interior points.
GoodLambda find_good_lambda(const std::vector<InstabilityInterval>& intervals,
                            const HillPotential& pot, double tol = 1e-12);

/// Value that may exceed the double range: mantissa · exp(log_scale).
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;
  double value() const;  // may overflow to ±inf
};

struct LemmaValues {
  ScaledValue w;  // W(M): data W(0)=0, W_t(0)=1
  ScaledValue v;  // V(M): data V(0)=1, V_t(0)=0
};

/// Closed-form W(M), V(M) for an unstable monodromy with b21 ≠ 0 and b22 ≠ μ^{-1}.
/// Switches to scaled representation once M·ln|μ| > 700.
LemmaValues lemma_l3_values(const Monodromy& m, int M);

/// Alternative V(M) with the opposite sign on the μ^M term. It misses V(1) = b22 and is kept
/// for the diagnostic comparison only.
double lemma_l3_printed_v(const Monodromy& m, int M);

/// Solution at time t >= 0 for data (w0, w0_t), using X(t,0) = X(t−⌊t⌋,0)·X(1,0)^⌊t⌋.
/// Returns (w, w_t). Throws std::overflow_error when the power overflows.
std::pair<double, double> propagate(const Monodromy& m, const HillPotential& pot, double t,
                                    std::pair<double, double> data, double tol = 1e-12);

/// Direct integration of the Hill equation over [0, t] (reference path).
std::pair<double, double> integrate_hill(const HillPotential& pot, double lambda, double t,
                                         std::pair<double, double> data, double tol = 1e-12);

/// The fundamental pair W, V of the Hill equation at a fixed λ.
class FundamentalPair {
 public:
  FundamentalPair(HillPotential pot, double lambda, double tol = 1e-12);

  double W(double t) const { return propagate(m_, pot_, t, {0.0, 1.0}, tol_).first; }
  double W_t(double t) const { return propagate(m_, pot_, t, {0.0, 1.0}, tol_).second; }
  double V(double t) const { return propagate(m_, pot_, t, {1.0, 0.0}, tol_).first; }
  double V_t(double t) const { return propagate(m_, pot_, t, {1.0, 0.0}, tol_).second; }
  std::pair<double, double> W_state(double t) const { return propagate(m_, pot_, t, {0.0, 1.0}, tol_); }

  const Monodromy& monodromy() const noexcept { return m_; }
  const HillPotential& potential() const noexcept { return pot_; }
  double lambda() const noexcept { return m_.lambda; }

 private:
  HillPotential pot_;
  Monodromy m_;
  double tol_;
};

/// CSV `lambda,trace,abs_trace,class` with 17 significant digits.
std::string stability_chart_csv(const std::vector<ChartRow>& rows);

}  // namespace cyclicwave
