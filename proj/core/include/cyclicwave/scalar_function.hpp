#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

namespace cyclicwave {

/// A real function on an open interval (lo, hi); either end may be infinite.
struct ScalarFunction {
  std::function<double(double)> fn;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::string name;

  double operator()(double x) const { return fn(x); }
  bool contains(double x) const { return x > lo && x < hi; }
};

inline ScalarFunction make_scalar(std::function<double(double)> fn, std::string name,
                                  double lo = -std::numeric_limits<double>::infinity(),
                                  double hi = std::numeric_limits<double>::infinity()) {
  return {std::move(fn), lo, hi, std::move(name)};
}

namespace families {

inline ScalarFunction zero() {
  return make_scalar([](double) { return 0.0; }, "zero");
}

/// 4αr/(1+2r²): the transform family whose F is (1+2s²)^α.
inline ScalarFunction example1(double alpha) {
  return make_scalar([alpha](double r) { return 4.0 * alpha * r / (1.0 + 2.0 * r * r); },
                     "example1(alpha=" + std::to_string(alpha) + ")");
}

/// −ℓ/(2(1+t)) on t > −1.
inline ScalarFunction example2(double ell) {
  return make_scalar([ell](double t) { return -ell / (2.0 * (1.0 + t)); },
                     "example2(ell=" + std::to_string(ell) + ")", -1.0);
}

/// v = 0 axis of (1+u²+v⁴)^α: αt/(1+t²).
inline ScalarFunction example3_u_axis(double alpha) {
  return make_scalar([alpha](double t) { return alpha * t / (1.0 + t * t); },
                     "example3u(alpha=" + std::to_string(alpha) + ")");
}

/// u = 0 axis of (1+u²+v⁴)^α: 2αt³/(1+t⁴).
inline ScalarFunction example3_v_axis(double alpha) {
  return make_scalar(
      [alpha](double t) {
        const double t2 = t * t;
        return 2.0 * alpha * t2 * t / (1.0 + t2 * t2);
      },
      "example3v(alpha=" + std::to_string(alpha) + ")");
}

/// mαu/(1+mu²).
inline ScalarFunction example4(int m, double alpha) {
  return make_scalar([m, alpha](double u) { return m * alpha * u / (1.0 + m * u * u); },
                     "example4(m=" + std::to_string(m) + ",alpha=" + std::to_string(alpha) + ")");
}

/// p/(1+|s|)·sign(s), so that F(s) = (1+|s|)^p on both sides.
inline ScalarFunction power_tail(double p) {
  return make_scalar([p](double s) { return s >= 0.0 ? p / (1.0 + s) : -p / (1.0 - s); },
                     "power(p=" + std::to_string(p) + ")");
}

}  // namespace families

}  // namespace cyclicwave
