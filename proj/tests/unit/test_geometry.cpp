#include <cmath>
#include <random>

#include "cyclicwave/errors.hpp"
#include "cyclicwave/geometry.hpp"
#include "doctest.h"

using namespace cyclicwave;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Γ^i_jk of φδ from ∇ ln φ
double conformal_gamma(const Eigen::VectorXd& g, int i, int j, int k) {
  return 0.5 * ((i == k) * g[j] + (i == j) * g[k] - (j == k) * g[i]);
}

}  // namespace

TEST_CASE("Christoffel symbols of conformal metrics") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  for (double alpha : {-1.0, -0.4, 0.7}) {
    const auto chart = make_conformal(metrics::example1(alpha));
    for (int rep = 0; rep < 5; ++rep) {
      const auto u = vec({d(rng), d(rng)});
      const double base = 1 + u.squaredNorm();
      const Eigen::VectorXd glog = alpha * 2.0 * u / base;
      const auto G = christoffel(chart, u);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) CHECK(G(i, j, k) == doctest::Approx(conformal_gamma(glog, i, j, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("finite-difference custom chart agrees with the analytic one") {
  const auto exact = make_conformal(metrics::example3(-0.8));
  const auto custom = make_custom(2, [](const Eigen::VectorXd& u) {
    return Eigen::MatrixXd(std::pow(1 + u[0] * u[0] + std::pow(u[1], 4), -0.8) * Eigen::MatrixXd::Identity(2, 2));
  });
  for (const auto& u : {vec({0.3, -0.2}), vec({1.1, 0.7})}) {
    const auto a = christoffel(exact, u), b = christoffel(custom, u);
    for (std::size_t i = 0; i < a.gamma.size(); ++i) CHECK(a.gamma[i] == doctest::Approx(b.gamma[i]).epsilon(1e-8));
  }
}

TEST_CASE("diagonal of the symmetric conformal metric is distinguished") {
  const double alpha = -1.0;
  const auto chart = make_conformal(metrics::example1(alpha));
  const auto line = check_self_coherence(chart, vec({1.0, 1.0}), -3.0, 3.0, 64);
  CHECK(line.max_residual < 1e-12);
  const auto f = line_function(chart, vec({1.0, 1.0}));
  for (double t : {-2.0, -0.3, 0.5, 1.7}) CHECK(f(t) == doctest::Approx(2 * alpha * t / (1 + 2 * t * t)).epsilon(1e-12));
  for (const auto& s : line.samples) CHECK(s.f == doctest::Approx(2 * alpha * s.t / (1 + 2 * s.t * s.t)).epsilon(1e-12));
}

TEST_CASE("line function agrees with the contracted Christoffel symbols") {
  const std::vector<MetricChart> charts = {make_conformal(metrics::example3(-0.7)),
                                           make_conformal(metrics::example4(3, 1.3)),
                                           make_conformal(metrics::example2(2.5))};
  for (const auto& chart : charts) {
    Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(chart.dim(), 0.4, 1.1);
    const auto f = line_function(chart, a);
    for (double t : {-0.3, 0.2, 0.9}) {
      const double direct = a.dot(contracted_christoffel(chart, t * a, a)) / a.squaredNorm();
      CHECK(f(t) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("distinguished-line residuals") {
  const auto ex3 = make_conformal(metrics::example3(-1.0));
  CHECK(check_self_coherence(ex3, vec({1.0, 0.0}), -2, 2, 32).max_residual < 1e-12);
  CHECK(check_self_coherence(ex3, vec({0.0, 1.0}), -2, 2, 32).max_residual < 1e-12);
  CHECK(check_self_coherence(ex3, vec({1.0, 1.0}), -2, 2, 32).max_residual > 1e-3);
  CHECK_THROWS_AS(check_self_coherence(ex3, vec({1.0, 0.0}), -2, 2, 8), DomainError);
  CHECK_THROWS_AS(check_self_coherence(ex3, vec({0.0, 0.0}), -2, 2, 32), DomainError);

  const auto pert = make_diagonal_perturbed(metrics::example1(-1.0), 0.4);
  CHECK(check_self_coherence(pert, vec({1.0, 1.0}), -2, 2, 32).max_residual < 1e-9);
  CHECK_THROWS_AS(make_diagonal_perturbed(metrics::example1(-1.0), 1.0), DomainError);
}

TEST_CASE("diagonal geodesic of the alpha=-1 metric") {
  const auto chart = make_conformal(metrics::example1(-1.0));
  const auto u0 = vec({0.0, 0.0});
  const Eigen::VectorXd v0 = vec({1.0, 1.0}) / std::sqrt(2.0);
  const auto path = geodesic_full(chart, u0, v0, 3.0);
  CHECK_FALSE(path.truncated);
  double err = 0.0;
  for (const auto& s : path.samples) {
    err = std::max(err, std::abs(s.u[0] - std::sinh(s.s) / std::sqrt(2.0)));
    err = std::max(err, std::abs(s.u[1] - std::sinh(s.s) / std::sqrt(2.0)));
  }
  CHECK(err < 1e-8);
  CHECK(path.max_speed_drift < 1e-9);

  const auto f = line_function(chart, vec({1.0, 1.0}));
  const auto red = geodesic_reduced(f, unit_rate(chart, u0, vec({1.0, 1.0})), 3.0);
  for (std::size_t i = 0; i < red.samples.size(); i += 30) {
    CHECK(red.samples[i].u[0] == doctest::Approx(path.samples[i].u[0]).epsilon(1e-8));
  }
}

TEST_CASE("vertical geodesic of the ell=2 metric") {
  const auto chart = make_conformal(metrics::example2(2.0));
  const auto path = geodesic_full(chart, vec({0.0, 0.0}), vec({0.0, 1.0}), 2.0);
  double err = 0.0;
  for (const auto& s : path.samples) {
    err = std::max(err, std::abs(s.u[1] - std::expm1(s.s)));
    err = std::max(err, std::abs(s.u[0]));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("geodesic leaving the chart is truncated") {
  const auto chart = make_conformal(metrics::example2(2.0));
  const auto path = geodesic_full(chart, vec({0.0, 0.0}), vec({0.0, -1.0}), 50.0);
  // v = e^{−s} − 1 never reaches −1 but the chart bound on |u| is not hit either
  CHECK(path.samples.back().u[1] > -1.0);
  const auto up = geodesic_full(chart, vec({0.0, 0.0}), vec({0.0, 1.0}), 50.0);
  CHECK(up.truncated);
  CHECK(up.s_end < 50.0);
}

TEST_CASE("curvature of the alpha=-2 conformal metric") {
  const auto chart = make_conformal(metrics::example1(-2.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const auto u = vec({d(rng), d(rng)});
    CHECK(scalar_curvature(chart, u) == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(gaussian_curvature(chart, u) == doctest::Approx(4.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(scalar_curvature(make_conformal(metrics::example4(3, -2.0)), vec({0, 0, 0})), DomainError);
}

TEST_CASE("degenerate metric raises a solve error") {
  const auto chart = make_custom(2, [](const Eigen::VectorXd&) {
    Eigen::MatrixXd h(2, 2);
    h << 1.0, 1.0, 1.0, 1.0;
    return h;
  });
  CHECK_THROWS_AS(christoffel(chart, vec({0.1, 0.2})), LinearSolveError);
}

TEST_CASE("path csv layout") {
  const auto chart = make_conformal(metrics::example1(-1.0));
  const auto path = geodesic_full(chart, vec({0.0, 0.0}), vec({1.0, 0.0}), 1.0, 1e-10, 10);
  const auto csv = path_csv(path);
  CHECK(csv.rfind("s,u1,u2,du1,du2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
}
