#include "cyclicwave/floquet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cyclicwave/dopri5.hpp"
#include "cyclicwave/errors.hpp"
#include "cyclicwave/io.hpp"
#include "cyclicwave/parallel.hpp"

namespace cyclicwave {

namespace {

using Mat2 = std::array<double, 4>;  // row-major, basis (w_t, w)

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 power(Mat2 base, long long k) {
  Mat2 acc = {1.0, 0.0, 0.0, 1.0};
  while (k > 0) {
    if (k & 1) acc = mul(acc, base);
    k >>= 1;
    if (k > 0) base = mul(base, base);
  }
  return acc;
}

void check_tol(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-6)) throw DomainError("tolerance must lie in [1e-13, 1e-6]");
}

std::string lambda_note(double lambda) {
  std::ostringstream os;
  os.precision(17);
  os << " (lambda=" << lambda << ")";
  return os.str();
}

}  // namespace

std::string to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::stable: return "stable";
    case StabilityClass::unstable: return "unstable";
    case StabilityClass::boundary: return "boundary";
  }
  return "unknown";
}

Monodromy monodromy(const HillPotential& pot, double lambda, double tol) {
  check_tol(tol);
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  // Two columns at once: y = (x1_wt, x1_w, x2_wt, x2_w), x' = [[0, -(λα - q)], [1, 0]] x.
  auto rhs = [&pot, lambda](double t, const std::array<double, 4>& y, std::array<double, 4>& dy) {
    const auto [alpha, q] = pot.coefficients(t);
    const double k = lambda * alpha - q;
    dy[0] = -k * y[1];
    dy[1] = y[0];
    dy[2] = -k * y[3];
    dy[3] = y[2];
  };
  Dopri5 solver(rhs, 0.0, std::array<double, 4>{1.0, 0.0, 0.0, 1.0}, OdeTolerance{tol, tol});
  try {
    solver.advance_to(1.0);
  } catch (const IntegrationError& e) {
    throw IntegrationError(e.what() + lambda_note(lambda), e.time());
  }
  const auto& y = solver.state();
  Monodromy m;
  m.b11 = y[0];
  m.b21 = y[1];
  m.b12 = y[2];
  m.b22 = y[3];
  m.lambda = lambda;
  m.det = m.b11 * m.b22 - m.b12 * m.b21;
  m.trace = m.b11 + m.b22;
  return m;
}

MultiplierPair classify(const Monodromy& m, double boundary_tol) {
  if (!(std::abs(m.det - 1.0) < 1e-6)) {
    throw DomainError("monodromy determinant deviates from 1 by more than 1e-6");
  }
  MultiplierPair out;
  const double tr = m.trace;
  const double a = std::abs(tr);
  out.sign = tr < 0.0 ? -1 : 1;
  if (a > 2.0 + boundary_tol) {
    out.cls = StabilityClass::unstable;
    out.mu0 = 0.5 * (a + std::sqrt((a - 2.0) * (a + 2.0)));
  } else if (a < 2.0 - boundary_tol) {
    out.cls = StabilityClass::stable;
    out.angle = std::acos(0.5 * tr);
  } else {
    out.cls = StabilityClass::boundary;
    out.angle = tr < 0.0 ? std::acos(-1.0) : 0.0;
  }
  return out;
}

StabilityScan scan_stability(const HillPotential& pot, double lo, double hi, int grid_points,
                             double tol) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("scan range requires 0 < lo < hi");
  if (grid_points < 100) throw DomainError("scan needs at least 100 grid points");
  check_tol(tol);

  const auto count = static_cast<std::size_t>(grid_points);
  const double step = (hi - lo) / (grid_points - 1);
  auto grid_lambda = [&](std::size_t i) { return i + 1 == count ? hi : lo + step * i; };

  StabilityScan scan;
  scan.chart.resize(count);
  parallel_for(count, [&](std::size_t i) {
    const double lam = grid_lambda(i);
    const Monodromy m = monodromy(pot, lam, tol);
    scan.chart[i] = {lam, m.trace, classify(m).cls};
  });

  const double width = (hi - lo) / grid_points * 1e-3;
  // g(λ) = |trace| − 2 changes sign across [a, b]; returns the crossing point.
  auto refine = [&](double a, double b, bool inside_at_b) {
    while (b - a > width) {
      const double mid = 0.5 * (a + b);
      const bool inside = std::abs(monodromy(pot, mid, tol).trace) - 2.0 > 0.0;
      if (inside == inside_at_b) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return 0.5 * (a + b);
  };

  std::size_t i = 0;
  while (i < count) {
    if (scan.chart[i].cls != StabilityClass::unstable) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < count && scan.chart[j + 1].cls == StabilityClass::unstable) ++j;
    InstabilityInterval iv;
    iv.lambda_lo = i == 0 ? lo : refine(scan.chart[i - 1].lambda, scan.chart[i].lambda, true);
    iv.lambda_hi = j + 1 == count ? hi : refine(scan.chart[j].lambda, scan.chart[j + 1].lambda, false);
    for (std::size_t k = i; k <= j; ++k) {
      const double a = std::abs(scan.chart[k].trace);
      if (a > iv.max_abs_trace) {
        iv.max_abs_trace = a;
        iv.witness_lambda = scan.chart[k].lambda;
      }
    }
    scan.intervals.push_back(iv);
    i = j + 1;
  }
  return scan;
}

std::vector<InstabilityInterval> scan_instability(const HillPotential& pot, double lo, double hi,
                                                  int grid_points, double tol) {
  return scan_stability(pot, lo, hi, grid_points, tol).intervals;
}

GoodLambda find_good_lambda(const std::vector<InstabilityInterval>& intervals,
                            const HillPotential& pot, double tol) {
  if (intervals.empty()) throw DomainError("find_good_lambda needs at least one instability interval");
  std::vector<const InstabilityInterval*> order;
  for (const auto& iv : intervals) order.push_back(&iv);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->max_abs_trace > b->max_abs_trace;
  });

  constexpr double kInvGolden = 0.6180339887498949;
  constexpr int kSamples = 64;
  double best_b21 = 0.0;
  for (const auto* iv : order) {
    const double span = iv->lambda_hi - iv->lambda_lo;
    for (int k = 0; k <= kSamples; ++k) {
      double lam = iv->witness_lambda;
      if (k > 0) {
        const double frac = std::fmod(k * kInvGolden, 1.0);
        lam = iv->lambda_lo + span * frac;
      }
      if (!(lam > iv->lambda_lo && lam < iv->lambda_hi)) continue;
      const Monodromy m = monodromy(pot, lam, tol);
      const MultiplierPair mp = classify(m);
      if (mp.cls != StabilityClass::unstable) continue;
      best_b21 = std::max(best_b21, std::abs(m.b21));
      const double mu = mp.signed_multiplier();
      if (std::abs(m.b21) > 1e-6 && std::abs(m.b22 - 1.0 / mu) > 1e-6) return {lam, m, mp};
    }
  }
  std::ostringstream os;
  os << "no interior lambda satisfies |b21| > 1e-6 and |b22 - 1/mu0| > 1e-6; max |b21| found "
     << best_b21;
  throw SearchExhaustedError(os.str());
}

double ScaledValue::value() const {
  if (mantissa == 0.0) return 0.0;
  return mantissa * std::exp(log_scale);
}

namespace {

struct LemmaSetup {
  double mu;     // signed growing multiplier
  double d;      // μ − μ^{-1}
  double cross;  // b21·b12/(μ − b11)
};

LemmaSetup lemma_setup(const Monodromy& m) {
  const MultiplierPair mp = classify(m);
  if (mp.cls != StabilityClass::unstable) throw DomainError("lemma values need an unstable monodromy");
  if (m.b21 == 0.0) throw DomainError("lemma values need b21 != 0");
  const double mu = mp.signed_multiplier();
  if (m.b22 - 1.0 / mu == 0.0) throw DomainError("lemma values need b22 != 1/mu0");
  // (μ − b11)(μ − b22) = b12·b21, so the cross term equals μ − b22 when μ − b11 underflows
  const double cross = std::abs(mu - m.b11) > 1e-300 ? m.b21 * m.b12 / (mu - m.b11) : mu - m.b22;
  return {mu, mu - 1.0 / mu, cross};
}

}  // namespace

LemmaValues lemma_l3_values(const Monodromy& m, int M) {
  if (M < 1) throw DomainError("M must be a positive integer");
  const LemmaSetup s = lemma_setup(m);
  const double log_growth = M * std::log(std::abs(s.mu));
  LemmaValues out;
  if (log_growth <= 700.0) {
    const double pm = std::pow(s.mu, M);
    const double pinv = 1.0 / pm;
    out.w = {m.b21 * (pm - pinv) / s.d, 0.0};
    out.v = {pm * (m.b22 - 1.0 / s.mu) / s.d + pinv * s.cross / s.d, 0.0};
    return out;
  }
  // μ^{-M} terms are below e^{-1400} relative and drop out
  const double sgn = (s.mu < 0.0 && (M % 2 == 1)) ? -1.0 : 1.0;
  out.w = {sgn * m.b21 / s.d, log_growth};
  out.v = {sgn * (m.b22 - 1.0 / s.mu) / s.d, log_growth};
  return out;
}

double lemma_l3_printed_v(const Monodromy& m, int M) {
  if (M < 1) throw DomainError("M must be a positive integer");
  const LemmaSetup s = lemma_setup(m);
  const double pm = std::pow(s.mu, M);
  return -pm * (m.b22 - 1.0 / s.mu) / s.d + s.cross / (pm * s.d);
}

std::pair<double, double> integrate_hill(const HillPotential& pot, double lambda, double t,
                                         std::pair<double, double> data, double tol) {
  if (!(t >= 0.0)) throw DomainError("integration time must be >= 0");
  if (t == 0.0) return data;
  auto rhs = [&pot, lambda](double tt, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    const auto [alpha, q] = pot.coefficients(tt);
    dy[0] = y[1];
    dy[1] = -(lambda * alpha - q) * y[0];
  };
  Dopri5 solver(rhs, 0.0, std::array<double, 2>{data.first, data.second}, OdeTolerance{tol, tol});
  solver.advance_to(t);
  return {solver.state()[0], solver.state()[1]};
}

std::pair<double, double> propagate(const Monodromy& m, const HillPotential& pot, double t,
                                    std::pair<double, double> data, double tol) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("propagate needs finite t >= 0");
  if (t == 0.0) return data;
  const double whole = std::floor(t);
  const double frac = t - whole;
  const Mat2 p = power({m.b11, m.b12, m.b21, m.b22}, static_cast<long long>(whole));
  // state (w_t, w)
  const double wt = p[0] * data.second + p[1] * data.first;
  const double w = p[2] * data.second + p[3] * data.first;
  if (!std::isfinite(wt) || !std::isfinite(w)) {
    throw std::overflow_error("monodromy power overflows at t=" + fmt17(t));
  }
  if (frac == 0.0) return {w, wt};
  return integrate_hill(pot, m.lambda, frac, {w, wt}, tol);
}

FundamentalPair::FundamentalPair(HillPotential pot, double lambda, double tol)
    : pot_(std::move(pot)), m_(cyclicwave::monodromy(pot_, lambda, tol)), tol_(tol) {}

std::string stability_chart_csv(const std::vector<ChartRow>& rows) {
  std::string out = "lambda,trace,abs_trace,class\n";
  for (const auto& r : rows) {
    out += fmt17(r.lambda);
    out += ',';
    out += fmt17(r.trace);
    out += ',';
    out += fmt17(std::abs(r.trace));
    out += ',';
    out += to_string(r.cls);
    out += '\n';
  }
  return out;
}

}  // namespace cyclicwave
