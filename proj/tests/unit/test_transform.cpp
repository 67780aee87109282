#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "cyclicwave/errors.hpp"
#include "cyclicwave/transform.hpp"
#include "doctest.h"

using namespace cyclicwave;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("G for the alpha=-1 family against the arctangent") {
  const auto tp = build_transform(families::example1(-1.0));
  const double r2 = std::sqrt(2.0);
  for (double u : {-50.0, -3.0, -0.4, 0.0, 0.1, 1.0, 7.5, 1e3}) {
    CHECK(tp.G(u) == doctest::Approx(std::atan(r2 * u) / r2).epsilon(1e-11));
    CHECK(tp.F(u) == doctest::Approx(1.0 / (1.0 + 2 * u * u)).epsilon(1e-11));
    CHECK(tp.Phi(u) == doctest::Approx(-std::log1p(2 * u * u)).epsilon(1e-11));
  }
  CHECK(tp.upper().finite);
  CHECK(tp.lower().finite);
  CHECK(tp.b_G() == doctest::Approx(kPi / (2 * r2)).epsilon(1e-10));
  CHECK(tp.a_G() == doctest::Approx(-kPi / (2 * r2)).epsilon(1e-10));
  CHECK(tp.upper().error < 1e-8);
}

TEST_CASE("endpoint against an independent improper quadrature") {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (int m : {2, 3, 5}) {
    for (double alpha : {-2.0, -1.5}) {
      const auto tp = build_transform(families::example4(m, alpha));
      // F(s) = (1 + m s²)^{α/2}
      const double ref = integrator.integrate([&](double s) { return std::pow(1 + m * s * s, alpha / 2); });
      CHECK(tp.upper().finite);
      CHECK(tp.b_G() == doctest::Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("G and H are inverse") {
  const auto tp = build_transform(families::example1(-1.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const double u = d(rng);
    CHECK(tp.H(tp.G(u)) == doctest::Approx(u).epsilon(1e-10));
  }
  const auto r = tp.H_checked(10.0);
  CHECK(r.clamped);
  CHECK(std::isfinite(r.u));
}

TEST_CASE("logarithmic transform on a half-line domain") {
  const auto tp = build_transform(families::example2(2.0));
  // F = 1/(1+s), G = ln(1+u)
  for (double u : {-0.9, -0.5, 0.0, 1.0, 30.0}) CHECK(tp.G(u) == doctest::Approx(std::log1p(u)).epsilon(1e-12));
  CHECK_FALSE(tp.upper().finite);
  CHECK_FALSE(tp.lower().finite);

  const auto tp4 = build_transform(families::example2(4.0));
  // F = (1+s)^{-2}, G = u/(1+u) → 1
  CHECK(tp4.upper().finite);
  CHECK(tp4.b_G() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("identity transform") {
  const auto tp = build_transform(families::zero());
  for (double u : {-5.0, 0.0, 3.0}) {
    CHECK(tp.G(u) == doctest::Approx(u).epsilon(1e-14));
    CHECK(tp.H(u) == doctest::Approx(u).epsilon(1e-12));
  }
  CHECK_FALSE(tp.upper().finite);
  CHECK(tp.upper().tail == TailVerdict::divergent);
}

TEST_CASE("table resolves G to the requested tolerance") {
  const auto f = families::example4(3, -0.5);
  const auto tp = build_transform(f, 1e-12);
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  for (double u : {0.3, 2.0, 40.0}) {
    auto F = [](double s) { return std::pow(1 + 3 * s * s, -0.25); };
    const double ref = gk.integrate(F, 0.0, u, 15, 1e-14);
    CHECK(tp.G(u) == doctest::Approx(ref).epsilon(1e-11));
  }
  CHECK_THROWS_AS(build_transform(f, 1e-16), DomainError);
  CHECK_THROWS_AS(build_transform(f, 1e-3), DomainError);
}

TEST_CASE("divergence verdicts around the thresholds") {
  struct Case {
    const char* name;
    std::function<ScalarFunction(double)> make;
    double threshold;
  };
  const std::vector<Case> cases = {
      {"example1", [](double a) { return families::example1(a); }, -0.5},
      {"example3 u", [](double a) { return families::example3_u_axis(a); }, -1.0},
      {"example3 v", [](double a) { return families::example3_v_axis(a); }, -0.5},
      {"example4 m=3", [](double a) { return families::example4(3, a); }, -1.0},
  };
  for (const auto& c : cases) {
    for (double offset : {-0.5, -0.25, 0.25, 0.5}) {
      const double a = c.threshold + offset;
      const auto v = noc_check(c.make(a));
      INFO(c.name << " alpha=" << a);
      CHECK(v.holds == (offset > 0 ? Holds::yes : Holds::no));
    }
  }
  // ell threshold 2 on the forward side
  for (double ell : {1.5, 1.75}) CHECK(noc_check(families::example2(ell)).forward == TailVerdict::divergent);
  for (double ell : {2.25, 2.5}) CHECK(noc_check(families::example2(ell)).forward == TailVerdict::convergent);
}

TEST_CASE("divergence verdict details") {
  const auto yes = noc_check(families::example1(-0.4));
  CHECK(yes.holds == Holds::yes);
  CHECK(yes.p_hat_fwd == doctest::Approx(-0.8).epsilon(1e-3));
  const auto no = noc_check(families::example1(-1.0));
  CHECK(no.holds == Holds::no);
  CHECK(no.extrapolated_fwd == doctest::Approx(kPi / (2 * std::sqrt(2.0))).epsilon(1e-8));
  CHECK(no.partial_fwd < no.extrapolated_fwd);
  const auto j = noc_json(no);
  CHECK(j.find("\"holds\": \"no\"") != std::string::npos);
  CHECK_THROWS_AS(noc_check(families::example1(-1.0), 100.0), DomainError);
}

TEST_CASE("power-law tails") {
  // f = p/(1+|s|) sign(s): F ~ |s|^p
  CHECK(noc_check(families::power_tail(-2.0)).holds == Holds::no);
  CHECK(noc_check(families::power_tail(-0.5)).holds == Holds::yes);
  const auto edge = noc_check(families::power_tail(-1.0));
  CHECK(edge.holds == Holds::inconclusive);
}
