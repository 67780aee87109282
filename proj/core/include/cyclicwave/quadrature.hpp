#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "cyclicwave/errors.hpp"

namespace cyclicwave {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (Newton iteration on P_n, computed once per order).
const GaussRule& gauss_legendre(int order);

template <class F>
double integrate_fixed(F&& f, double a, double b, const GaussRule& rule) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 quadrature on a finite interval.
/// Throws QuadratureError when the tolerance is not met within max_segments.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                              int max_segments = 4000) {
  if (a == b) return {};
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  double total = first.value, total_err = first.error;
  heap.push(first);
  int evals = 15;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (static_cast<int>(heap.size()) >= max_segments) {
      throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]",
                            a, b);
    }
    const auto worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, m);
    auto right = detail::gk15(f, m, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    if (!std::isfinite(total)) {
      throw QuadratureError("non-finite integrand", worst.a, worst.b);
    }
    heap.push(left);
    heap.push(right);
  }
  // recompute sums to shed accumulated cancellation
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  return {total, total_err, evals};
}

}  // namespace cyclicwave
