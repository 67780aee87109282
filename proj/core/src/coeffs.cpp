#include "cyclicwave/coeffs.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <variant>

#include "cyclicwave/dopri5.hpp"
#include "cyclicwave/errors.hpp"

namespace cyclicwave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_unit(double t) { return t - std::floor(t); }

struct ConstantB {
  double c;
  std::array<double, 3> eval(double) const { return {c, 0.0, 0.0}; }
};

struct SqrtSinB {
  double eps;
  std::array<double, 3> eval(double t) const {
    const double ph = kTwoPi * wrap_unit(t);
    const double s = 1.0 + eps * std::sin(ph);
    const double b = std::sqrt(s);
    const double b1 = std::numbers::pi * eps * std::cos(ph) / b;
    const double s2 = -kTwoPi * kTwoPi * eps * std::sin(ph);
    const double b2 = (0.5 * s2 - b1 * b1) / b;
    return {b, b1, b2};
  }
};

// Cardinal quintic B-spline on [0, 6] with its first two derivatives; evaluated on the
// left half and reflected, which keeps the truncated-power sums small.
std::array<double, 3> quintic_bspline(double x) {
  if (x <= 0.0 || x >= 6.0) return {0.0, 0.0, 0.0};
  double sign1 = 1.0;
  if (x > 3.0) {
    x = 6.0 - x;
    sign1 = -1.0;
  }
  static constexpr std::array<double, 3> binom = {1.0, -6.0, 15.0};
  double v = 0.0, d1 = 0.0, d2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double r = x - k;
    if (r <= 0.0) break;
    const double r2 = r * r, r3 = r2 * r;
    v += binom[k] * r3 * r2;
    d1 += binom[k] * r2 * r2;
    d2 += binom[k] * r3;
  }
  return {v / 120.0, sign1 * d1 / 24.0, d2 / 6.0};
}

struct TabulatedB {
  std::vector<double> coef;
  std::array<double, 3> eval(double t) const {
    const int n = static_cast<int>(coef.size());
    const double x = n * wrap_unit(t);
    const int base = static_cast<int>(std::floor(x));
    double v = 0.0, d1 = 0.0, d2 = 0.0;
    for (int j = base - 2; j <= base + 3; ++j) {
      const auto w = quintic_bspline(x - j + 3.0);
      const double c = coef[((j % n) + n) % n];
      v += c * w[0];
      d1 += c * w[1];
      d2 += c * w[2];
    }
    return {v, n * d1, static_cast<double>(n) * n * d2};
  }
};

}  // namespace

struct PeriodicCoefficient::Impl {
  std::variant<ConstantB, SqrtSinB, TabulatedB> rep;
  std::array<double, 3> eval(double t) const {
    return std::visit([t](const auto& r) { return r.eval(t); }, rep);
  }
};

double PeriodicCoefficient::eval(double t) const { return impl_->eval(t)[0]; }
double PeriodicCoefficient::d1(double t) const { return impl_->eval(t)[1]; }
double PeriodicCoefficient::d2(double t) const { return impl_->eval(t)[2]; }
std::array<double, 3> PeriodicCoefficient::jet(double t) const { return impl_->eval(t); }

CoefficientKind PeriodicCoefficient::kind() const noexcept {
  return std::holds_alternative<TabulatedB>(impl_->rep) ? CoefficientKind::user_tabulated
                                                         : CoefficientKind::builtin_closed_form;
}

std::string PeriodicCoefficient::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantB>) {
          os << "constant(c=" << r.c << ")";
        } else if constexpr (std::is_same_v<T, SqrtSinB>) {
          os << "sqrt-sin(epsilon=" << r.eps << ")";
        } else {
          os << "tabulated(samples=" << r.coef.size() << ")";
        }
      },
      impl_->rep);
  return os.str();
}

double PeriodicCoefficient::max_value(int samples) const {
  double m = eval(0.0);
  for (int i = 1; i < samples; ++i) m = std::max(m, eval(static_cast<double>(i) / samples));
  return m;
}

double PeriodicCoefficient::min_value(int samples) const {
  double m = eval(0.0);
  for (int i = 1; i < samples; ++i) m = std::min(m, eval(static_cast<double>(i) / samples));
  return m;
}

PeriodicCoefficient make_builtin(Builtin name, double param) {
  auto impl = std::make_shared<PeriodicCoefficient::Impl>();
  switch (name) {
    case Builtin::constant:
      if (!(param > 0.0) || !std::isfinite(param)) {
        throw DomainError("constant coefficient requires c > 0");
      }
      impl->rep = ConstantB{param};
      break;
    case Builtin::sqrt_sin:
      if (!(param > 0.0 && param < 1.0)) {
        throw DomainError("sqrt-sin coefficient requires epsilon in (0, 1)");
      }
      impl->rep = SqrtSinB{param};
      break;
  }
  return PeriodicCoefficient(std::move(impl));
}

PeriodicCoefficient make_tabulated(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 256) throw DomainError("tabulated coefficient needs at least 256 samples per period");
  for (double s : samples) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("tabulated coefficient must be positive");
  }
  // Solve the circulant interpolation system (1, 26, 66, 26, 1)/120 · c = samples in Fourier
  // space; its symbol is bounded below by 16/120.
  std::vector<std::complex<double>> spectrum(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += samples[j] * std::polar(1.0, -kTwoPi * static_cast<double>((k * j) % n) / n);
    }
    const double th = kTwoPi * static_cast<double>(k) / n;
    spectrum[k] = acc / ((66.0 + 52.0 * std::cos(th) + 2.0 * std::cos(2.0 * th)) / 120.0);
  }
  std::vector<double> coef(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += spectrum[k] * std::polar(1.0, kTwoPi * static_cast<double>((k * j) % n) / n);
    }
    coef[j] = acc.real() / static_cast<double>(n);
  }
  auto impl = std::make_shared<PeriodicCoefficient::Impl>();
  impl->rep = TabulatedB{std::move(coef)};
  PeriodicCoefficient out(std::move(impl));
  if (out.min_value(8 * static_cast<int>(n)) <= 0.0) {
    throw DomainError("tabulated coefficient interpolant is not positive");
  }
  return out;
}

HillPotential::HillPotential(PeriodicCoefficient b, int n, QFormula formula)
    : b_(std::move(b)), n_(n), formula_(formula) {
  if (n < 1) throw DomainError("spatial dimension n must be >= 1");
}

namespace {

double q_from_jet(const std::array<double, 3>& j, int dim, QFormula formula) {
  const double b = j[0];
  const double r = j[1] / b;
  const double curv = j[2] / b;
  const double n = dim;
  switch (formula) {
    case QFormula::liouville:
      return (n * n / 4.0 + n / 2.0) * r * r - (n / 2.0) * curv;
    case QFormula::intro_printed:
      return (n / 4.0) * (n / 4.0 - 1.0) * r * r - (n / 2.0) * curv;
    case QFormula::alpha_form_printed: {
      // α = b²: α'/α = 2r, α''/α = 2 b''/b + 2 r²
      const double a1 = 2.0 * r;
      const double a2 = 2.0 * curv + 2.0 * r * r;
      return (n / 4.0) * (1.5 * a1 * a1 - a2) - (n / 8.0) * (n / 2.0 - 1.0) * a1 * a1;
    }
  }
  return 0.0;
}

}  // namespace

double HillPotential::q(double t) const { return q_from_jet(b_.jet(t), n_, formula_); }

std::pair<double, double> HillPotential::coefficients(double t) const {
  const auto j = b_.jet(t);
  return {j[0] * j[0], q_from_jet(j, n_, formula_)};
}

HillPotential hill_potential(const PeriodicCoefficient& b, int n, QFormula formula) {
  return HillPotential(b, n, formula);
}

SubstitutionCheck substitution_check(const PeriodicCoefficient& b, int n, double lambda,
                                     QFormula formula, double t_end, double tol) {
  if (n < 1) throw DomainError("spatial dimension n must be >= 1");
  const double half_n = 0.5 * n;
  // y = (v, v', w, w')
  auto rhs = [&](double t, const std::array<double, 4>& y, std::array<double, 4>& dy) {
    const auto j = b.jet(t);
    const double bt = j[0];
    dy[0] = y[1];
    dy[1] = n * (j[1] / bt) * y[1] - lambda * bt * bt * y[0];
    dy[2] = y[3];
    dy[3] = -(lambda * bt * bt - q_from_jet(j, n, formula)) * y[2];
  };
  const double b0 = b.eval(0.0);
  const std::array<double, 4> y0 = {1.0, 0.0, 1.0, -half_n * b.d1(0.0) / b0};
  Dopri5 solver(rhs, 0.0, y0, OdeTolerance{tol, tol});

  SubstitutionCheck out{n, lambda, 0.0, 0.0};
  const int samples = 600;
  for (int i = 1; i <= samples; ++i) {
    const double t = t_end * i / samples;
    solver.advance_to(t);
    const auto& y = solver.state();
    const double scale = std::pow(b.eval(t) / b0, half_n);
    out.max_abs_error = std::max(out.max_abs_error, std::abs(y[0] - scale * y[2]));
    out.max_abs_v = std::max(out.max_abs_v, std::abs(y[0]));
  }
  return out;
}

}  // namespace cyclicwave
