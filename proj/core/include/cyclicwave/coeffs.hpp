#pragma once

// Periodic scale functions b(t) of the cyclic spacetime and the Hill-equation
// coefficients derived from them.

#include <array>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cyclicwave {

enum class CoefficientKind { builtin_closed_form, user_tabulated };

enum class Builtin { constant, sqrt_sin };

/// A smooth, positive, 1-periodic function with its first two derivatives.
/// Immutable after construction; copies share the underlying evaluator.
class PeriodicCoefficient {
 public:
  struct Impl;

  double period() const noexcept { return 1.0; }
  double operator()(double t) const { return eval(t); }
  double eval(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  /// (b, ḃ, b̈) at t in one evaluation.
  std::array<double, 3> jet(double t) const;
  CoefficientKind kind() const noexcept;
  std::string describe() const;

  /// max of b over a uniform sample of one period
  double max_value(int samples = 2048) const;
  double min_value(int samples = 2048) const;

  explicit PeriodicCoefficient(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<const Impl> impl_;
};

/// constant: b ≡ param (param > 0); sqrt_sin: b = sqrt(1 + param·sin 2πt), param ∈ (0, 1).
PeriodicCoefficient make_builtin(Builtin name, double param);

/// Periodic quintic B-spline through samples b(k/N), k = 0..N-1, N >= 256.
/// Derivatives are those of the interpolant.
PeriodicCoefficient make_tabulated(std::span<const double> samples);

/// Which closed form of q is used. `liouville` is the one that follows from substituting
/// v = b^{n/2} w; the other two are alternative expressions kept only for
/// diagnostics (they fail the substitution check, except α-form at n = 2 where it coincides).
enum class QFormula { liouville, intro_printed, alpha_form_printed };

/// Coefficients of y'' + (λ α(t) − q(t)) y = 0 with α = b².
class HillPotential {
 public:
  HillPotential(PeriodicCoefficient b, int n, QFormula formula = QFormula::liouville);

  double alpha(double t) const {
    const double v = b_.eval(t);
    return v * v;
  }
  double q(double t) const;
  /// (α(t), q(t)) from a single evaluation of b and its derivatives.
  std::pair<double, double> coefficients(double t) const;
  int dimension() const noexcept { return n_; }
  QFormula formula() const noexcept { return formula_; }
  const PeriodicCoefficient& scale() const noexcept { return b_; }

 private:
  PeriodicCoefficient b_;
  int n_;
  QFormula formula_;
};

HillPotential hill_potential(const PeriodicCoefficient& b, int n,
                             QFormula formula = QFormula::liouville);

struct SubstitutionCheck {
  int n = 0;
  double lambda = 0.0;
  double max_abs_error = 0.0;  // max |v(t) − (b(t)/b(0))^{n/2} w(t)| over the sample
  double max_abs_v = 0.0;
};

/// Integrates v'' − n(ḃ/b)v' + λb²v = 0 and the Hill equation with the chosen q from matched
/// data v(0)=1, v'(0)=0 and compares v against (b/b(0))^{n/2} w on [0, t_end].
SubstitutionCheck substitution_check(const PeriodicCoefficient& b, int n, double lambda,
                                     QFormula formula, double t_end = 3.0, double tol = 1e-12);

}  // namespace cyclicwave
