#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <random>

#include "cyclicwave/errors.hpp"
#include "cyclicwave/floquet.hpp"
#include "doctest.h"

using namespace cyclicwave;
namespace odeint = boost::numeric::odeint;

namespace {

using State2 = std::array<double, 2>;

// Reference solution of w'' + (λb² − q)w = 0 from an independent integrator; q from the
// closed form in terms of b, ḃ, b̈ computed here, not by the library.
State2 reference_hill(double eps, int n, double lambda, double t_end, State2 wwt) {
  constexpr double pi = 3.14159265358979323846;
  auto rhs = [&](const State2& y, State2& dy, double t) {
    const double ph = 2 * pi * t;
    const double s = 1 + eps * std::sin(ph);
    const double b = std::sqrt(s);
    const double bd = pi * eps * std::cos(ph) / b;
    const double bdd = (-2 * pi * pi * eps * std::sin(ph) - bd * bd) / b;
    const double q = (n * n / 4.0 + n / 2.0) * (bd / b) * (bd / b) - (n / 2.0) * bdd / b;
    dy[0] = y[1];
    dy[1] = -(lambda * s - q) * y[0];
  };
  State2 y = wwt;
  odeint::integrate_adaptive(odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_fehlberg78<State2>()),
                             rhs, y, 0.0, t_end, 1e-3);
  return y;
}

const PeriodicCoefficient& sqrt_sin() {
  static const auto b = make_builtin(Builtin::sqrt_sin, 0.5);
  return b;
}

}  // namespace

TEST_CASE("constant coefficient monodromy is the rotation") {
  const auto pot = hill_potential(make_builtin(Builtin::constant, 1.0), 3);
  for (double l : {0.5, 3.0, 17.0, 64.0, 99.0}) {
    const auto m = monodromy(pot, l);
    const double k = std::sqrt(l);
    CHECK(m.trace == doctest::Approx(2 * std::cos(k)).epsilon(1e-10));
    CHECK(m.det == doctest::Approx(1.0).epsilon(1e-10));
    // w = sin(kt)/k for (w_t, w) = (1, 0)
    CHECK(m.b21 == doctest::Approx(std::sin(k) / k).epsilon(1e-9));
    CHECK(m.b11 == doctest::Approx(std::cos(k)).epsilon(1e-9));
  }
}

TEST_CASE("monodromy agrees with an independent integrator") {
  const auto pot = hill_potential(sqrt_sin(), 3);
  for (double l : {2.0, 10.4, 25.0}) {
    const auto m = monodromy(pot, l);
    const auto c1 = reference_hill(0.5, 3, l, 1.0, {0.0, 1.0});  // (w, w_t) = (0, 1)
    const auto c2 = reference_hill(0.5, 3, l, 1.0, {1.0, 0.0});
    CHECK(m.b11 == doctest::Approx(c1[1]).epsilon(1e-9));
    CHECK(m.b21 == doctest::Approx(c1[0]).epsilon(1e-9));
    CHECK(m.b12 == doctest::Approx(c2[1]).epsilon(1e-9));
    CHECK(m.b22 == doctest::Approx(c2[0]).epsilon(1e-9));
    CHECK(std::abs(m.det - 1.0) < 1e-9);
  }
}

TEST_CASE("monodromy tolerance is bounded") {
  const auto pot = hill_potential(sqrt_sin(), 3);
  CHECK_THROWS_AS(monodromy(pot, 1.0, 1e-15), DomainError);
  CHECK_THROWS_AS(monodromy(pot, 1.0, 1e-4), DomainError);
}

TEST_CASE("classification of multipliers") {
  Monodromy m;
  m.b11 = 2.0;
  m.b12 = 3.0;
  m.b21 = 1.0;
  m.b22 = 2.0;
  m.trace = 4.0;
  m.det = 1.0;
  auto mp = classify(m);
  CHECK(mp.cls == StabilityClass::unstable);
  CHECK(mp.sign == 1);
  CHECK(mp.mu0 == doctest::Approx(2 + std::sqrt(3.0)).epsilon(1e-14));

  m.b11 = -2.0;
  m.b22 = -2.0;
  m.trace = -4.0;
  mp = classify(m);
  CHECK(mp.sign == -1);
  CHECK(mp.signed_multiplier() == doctest::Approx(-(2 + std::sqrt(3.0))).epsilon(1e-14));

  Monodromy rot;
  rot.b11 = rot.b22 = std::cos(0.3);
  rot.b12 = -std::sin(0.3);
  rot.b21 = std::sin(0.3);
  rot.trace = 2 * std::cos(0.3);
  mp = classify(rot);
  CHECK(mp.cls == StabilityClass::stable);
  CHECK(mp.angle == doctest::Approx(0.3).epsilon(1e-12));

  Monodromy id;
  CHECK(classify(id).cls == StabilityClass::boundary);

  Monodromy bad = m;
  bad.det = 1.1;
  CHECK_THROWS_AS(classify(bad), DomainError);
}

TEST_CASE("instability scan finds the resonance tongues") {
  const auto pot = hill_potential(sqrt_sin(), 3);
  const auto scan = scan_stability(pot, 0.1, 60.0, 800);
  REQUIRE(scan.intervals.size() >= 1);
  const auto& first = scan.intervals.front();
  CHECK(first.lambda_lo == doctest::Approx(5.9175235581).epsilon(2e-5));
  CHECK(first.lambda_hi == doctest::Approx(16.1491471379).epsilon(2e-5));
  CHECK(first.max_abs_trace > 2.5);
  for (const auto& iv : scan.intervals) {
    CHECK(iv.lambda_lo < iv.witness_lambda);
    CHECK(iv.witness_lambda < iv.lambda_hi);
    const auto lo = monodromy(pot, iv.lambda_lo);
    const auto hi = monodromy(pot, iv.lambda_hi);
    CHECK(std::abs(std::abs(lo.trace) - 2.0) < 1e-4);
    CHECK(std::abs(std::abs(hi.trace) - 2.0) < 1e-4);
  }
  for (std::size_t i = 1; i < scan.chart.size(); ++i) CHECK(scan.chart[i].lambda > scan.chart[i - 1].lambda);

  const auto flat = scan_instability(hill_potential(make_builtin(Builtin::constant, 1.0), 3), 0.1, 60.0, 400);
  CHECK(flat.empty());
}

TEST_CASE("scan output does not depend on the thread count") {
  const auto pot = hill_potential(sqrt_sin(), 2);
  const auto a = scan_instability(pot, 1.0, 30.0, 300);
  setenv("CYCLICWAVE_THREADS", "1", 1);
  const auto b = scan_instability(pot, 1.0, 30.0, 300);
  unsetenv("CYCLICWAVE_THREADS");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lambda_lo == b[i].lambda_lo);
    CHECK(a[i].lambda_hi == b[i].lambda_hi);
  }
}

TEST_CASE("closed-form multi-period values match integration") {
  const auto pot = hill_potential(sqrt_sin(), 3);
  const auto intervals = scan_instability(pot, 0.1, 60.0, 800);
  const auto good = find_good_lambda(intervals, pot);
  const auto& m = good.m;
  CHECK(good.multipliers.cls == StabilityClass::unstable);
  for (int M : {1, 2, 5, 10}) {
    const auto lv = lemma_l3_values(m, M);
    const auto W = reference_hill(0.5, 3, good.lambda, M, {0.0, 1.0});
    const auto V = reference_hill(0.5, 3, good.lambda, M, {1.0, 0.0});
    CHECK(lv.w.value() == doctest::Approx(W[0]).epsilon(1e-8));
    CHECK(lv.v.value() == doctest::Approx(V[0]).epsilon(1e-8));
  }
  // V(1) = b22; the alternative form misses it
  CHECK(lemma_l3_values(m, 1).v.value() == doctest::Approx(m.b22).epsilon(1e-10));
  CHECK(std::abs(lemma_l3_printed_v(m, 1) - m.b22) > 1e-3);
}

TEST_CASE("closed-form values switch to a scaled representation") {
  const auto pot = hill_potential(sqrt_sin(), 3);
  const auto good = find_good_lambda(scan_instability(pot, 0.1, 60.0, 800), pot);
  const auto small = lemma_l3_values(good.m, 100);
  const auto big = lemma_l3_values(good.m, 2000);
  CHECK(small.w.log_scale == 0.0);
  CHECK(big.w.log_scale > 0.0);
  const double mu = std::abs(good.multipliers.signed_multiplier());
  const double log_ratio = std::log(std::abs(big.w.mantissa)) + big.w.log_scale - std::log(std::abs(small.w.value()));
  CHECK(log_ratio == doctest::Approx(1900 * std::log(mu)).epsilon(1e-9));
}

TEST_CASE("propagation through whole periods matches direct integration") {
  const auto pot = hill_potential(sqrt_sin(), 3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(1.0, 50.0), tt(0.0, 6.0), d(-1.0, 1.0);
  for (int k = 0; k < 8; ++k) {
    const double l = lam(rng), t = tt(rng);
    const std::pair<double, double> data{d(rng), d(rng)};
    const auto m = monodromy(pot, l);
    const auto p = propagate(m, pot, t, data);
    const auto r = reference_hill(0.5, 3, l, t, {data.first, data.second});
    const double scale = std::max(1.0, std::abs(r[0]) + std::abs(r[1]));
    CHECK(std::abs(p.first - r[0]) < 1e-8 * scale);
    CHECK(std::abs(p.second - r[1]) < 1e-8 * scale);
  }
  CHECK_THROWS_AS(propagate(monodromy(pot, 3.0), pot, -1.0, {0.0, 1.0}), DomainError);
}

TEST_CASE("fundamental pair") {
  const auto pot = hill_potential(sqrt_sin(), 3);
  const FundamentalPair fp(pot, 10.4053763441);
  CHECK(fp.W(0.0) == 0.0);
  CHECK(fp.V(0.0) == 1.0);
  CHECK(fp.W_t(0.0) == 1.0);
  CHECK(fp.W(1.0) == doctest::Approx(fp.monodromy().b21).epsilon(1e-12));
  CHECK(fp.V(1.0) == doctest::Approx(fp.monodromy().b22).epsilon(1e-12));
  // Wronskian W_t V − W V_t ≡ 1
  for (double t : {0.3, 2.7, 5.5}) {
    CHECK(fp.W_t(t) * fp.V(t) - fp.W(t) * fp.V_t(t) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("good lambda search reports failure modes") {
  const auto pot = hill_potential(sqrt_sin(), 3);
  CHECK_THROWS_AS(find_good_lambda({}, pot), DomainError);
}

TEST_CASE("chart csv") {
  const std::vector<ChartRow> rows = {{1.0, 2.5, StabilityClass::unstable}, {2.0, 0.1, StabilityClass::stable}};
  const auto csv = stability_chart_csv(rows);
  CHECK(csv.rfind("lambda,trace,abs_trace,class\n", 0) == 0);
  CHECK(csv.find("unstable") != std::string::npos);
}
