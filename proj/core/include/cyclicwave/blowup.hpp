#pragma once

// Small initial data whose transformed solution is driven across a finite endpoint of G by a
// Floquet-unstable plane wave, and the quantities certifying it.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclicwave/coeffs.hpp"
#include "cyclicwave/floquet.hpp"
#include "cyclicwave/grid.hpp"
#include "cyclicwave/transform.hpp"

namespace cyclicwave {

struct BlowupPlan {
  double S = 0.0;
  int M = 1;
  int A = 1;
  Eigen::VectorXd y;  // |y|² = lambda
  double lambda = 0.0;
  int n = 1;

  /// Throws DomainError unless S > 2n, M ≥ 1, A = ±1, dim y = n and |y|² = λ within 1e-12.
  void validate() const;
  double amplitude() const;       // M^{−S}
  double cutoff_radius() const;   // M²
  double validity_radius() const; // M^{3/2}
};

/// Smooth radial cutoff: 1 on |z| ≤ 1, 0 on |z| ≥ 2, ψ(2−r)/(ψ(2−r)+ψ(r−1)) between, ψ(x) = e^{−1/x}.
double cutoff(double r);

using PointField = std::function<double(const Eigen::VectorXd&)>;

struct InitialData {
  PointField u0;
  PointField u1;
};

/// u0 = M^{−S}χ(x/M²), u1 = A M^{−S} χ(x/M²) exp(−∫₀^{u0} f) cos(x·y).
InitialData make_data(const BlowupPlan& plan, const TransformPair& tp);

/// ‖u0‖_{s+1} + ‖u1‖_s on the periodic grid, norms from the Fourier multiplier (1+|ξ|²)^{s/2}
/// with ‖u‖² = L^n Σ (1+|ξ|²)^s |ĉ_k|². Throws ResolutionError if more than 1% of either weighted
/// energy sits in the top octave (max |k_i| ≥ points/4).
double sobolev_smallness(const PointField& u0, const PointField& u1, int s, const GridSpec& grid);

/// Same quantity on ℝⁿ for the plan's data via radial Hankel transforms, with an upper bound
/// for the interference term between the ±y shifted bumps. Used by certify_blowup.
double sobolev_smallness_radial(const BlowupPlan& plan, const TransformPair& tp, int s);

/// V(t, x) = G(M^{−S}) + W(t)(b(t)/b(0))^{n/2} A M^{−S} cos(x·y) on Π_M.
class LocalSolution {
 public:
  LocalSolution(BlowupPlan plan, const TransformPair& tp, PeriodicCoefficient b, FundamentalPair W);

  /// Throws DomainError outside Π_M = [0, M] × {|x| ≤ M^{3/2}}.
  double operator()(double t, const Eigen::VectorXd& x) const;
  /// v(t, 0) without the Π_M check on t beyond M (still requires t ≥ 0).
  double at_origin(double t) const;
  double base_value() const noexcept { return g0_; }

 private:
  BlowupPlan plan_;
  double g0_;
  PeriodicCoefficient b_;
  FundamentalPair W_;
};

struct CertifySearch {
  double S = 0.0;                   // 0 → 2n + 1
  std::vector<double> lambdas;      // candidates inside certified instability intervals
  int M_max = 400;
  int sobolev_index = 0;            // 0 → smallest integer > (n + 2)/2
  double tol = 1e-12;
};

struct BlowupCertificate {
  BlowupPlan plan;
  double mu0 = 0.0;        // |growing multiplier|
  int multiplier_sign = 1;
  double b21 = 0.0;
  double endpoint = 0.0;   // the finite endpoint approached (b_G if A = 1, a_G if A = −1)
  double v_M = 0.0;        // v(M, 0) from the closed form
  double smallness = 0.0;
  int sobolev_index = 0;
  std::optional<double> t_star;
  std::vector<std::pair<double, double>> trajectory;  // (t, v(t, 0)) at half-integers
};

/// Smallest M (then smallest λ) with smallness ≤ δ, |v(M,0)| ≥ |endpoint| and a crossing of
/// the endpoint in [0, M]. Throws NotApplicableError if both endpoints are infinite and
/// SearchExhaustedError reporting the growth deficit when M_max is reached.
BlowupCertificate certify_blowup(const CertifySearch& search, const TransformPair& tp,
                                 const PeriodicCoefficient& b, int n, double delta);

/// First t in [0, t_max] where v(t, 0) reaches the endpoint (v ≥ b_G − 1e-9|b_G| for A = 1,
/// v ≤ a_G + 1e-9|a_G| for A = −1): scan at step 1/32 then bisection.
std::optional<double> first_crossing(const LocalSolution& v, double endpoint, int A, double t_max);

/// {S, M, A, lambda, y, mu0, b21, b_G, t_star, smallness, trajectory}
std::string certificate_json(const BlowupCertificate& c);

}  // namespace cyclicwave
