#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta stepper with PI step-size control.
//
// State can be any fixed- or dynamic-size container with size() and operator[]
// (std::array<double, N>, std::vector<double>, Eigen::VectorXd). The right-hand side
// is called as rhs(t, y, dydt) and must write every component of dydt.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "cyclicwave/errors.hpp"

namespace cyclicwave {

struct OdeTolerance {
  double rtol = 1e-10;
  double atol = 1e-10;
  std::size_t max_steps = 50'000'000;
};

template <class State, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, double t0, State y0, OdeTolerance tol)
      : rhs_(std::move(rhs)), tol_(tol), t_(t0), y_(std::move(y0)), k1_(y_), k2_(y_), k3_(y_),
        k4_(y_), k5_(y_), k6_(y_), k7_(y_), ytmp_(y_), ynew_(y_) {
    rhs_(t_, y_, k1_);
  }

  double time() const noexcept { return t_; }
  const State& state() const noexcept { return y_; }
  const State& derivative() const noexcept { return k1_; }
  std::size_t accepted_steps() const noexcept { return accepted_; }
  std::size_t rejected_steps() const noexcept { return rejected_; }

  /// Advances to exactly t_target (forward or backward).
  void advance_to(double t_target) {
    advance_to(t_target, [](double, const State&) { return false; });
  }

  /// Advances toward t_target; after each accepted step stop(t, y) may return true to halt.
  /// Returns true when halted early by stop.
  template <class Stop>
  bool advance_to(double t_target, Stop&& stop) {
    if (t_target == t_) return false;
    const double dir = t_target > t_ ? 1.0 : -1.0;
    if (h_ == 0.0 || std::copysign(1.0, h_) != dir) h_ = dir * initial_step(std::abs(t_target - t_));

    while (dir * (t_target - t_) > 0.0) {
      if (accepted_ + rejected_ >= tol_.max_steps) {
        throw IntegrationError("step budget exhausted at t=" + std::to_string(t_), t_);
      }
      const double remaining = t_target - t_;
      bool last = false;
      double h = h_;
      if (dir * (h - remaining) >= 0.0) {
        h = remaining;
        last = true;
      }
      const double h_floor = 1e-14 * std::max(1.0, std::abs(t_));
      if (std::abs(h) < h_floor && !last) {
        throw IntegrationError("step size underflow at t=" + std::to_string(t_), t_);
      }

      const double err = attempt(h);
      if (!std::isfinite(err)) {
        h_ = 0.25 * h;
        ++rejected_;
        if (std::abs(h_) < h_floor) {
          throw IntegrationError("non-finite state at t=" + std::to_string(t_), t_);
        }
        continue;
      }
      if (err <= 1.0) {
        t_ = last ? t_target : t_ + h;
        std::swap(y_, ynew_);
        std::swap(k1_, k7_);  // FSAL
        ++accepted_;
        double fac = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) *
                     std::pow(err_prev_, kBeta);
        fac = std::clamp(fac, kMinFactor, reject_last_ ? 1.0 : kMaxFactor);
        err_prev_ = std::max(err, 1e-4);
        reject_last_ = false;
        // a step clipped to hit t_target says little about the natural step size
        if (!last) h_ = h * fac;
        if (stop(t_, y_)) return true;
      } else {
        ++rejected_;
        reject_last_ = true;
        h_ = h * std::max(kMinFactor, kSafety * std::pow(err, -0.2));
      }
    }
    return false;
  }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kBeta = 0.04;
  static constexpr double kAlpha = 0.2 - 0.75 * kBeta;
  static constexpr double kMinFactor = 0.2;
  static constexpr double kMaxFactor = 10.0;

  double initial_step(double span) {
    // Hairer-Norsett-Wanner starting step heuristic
    const std::size_t n = y_.size();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = tol_.atol + tol_.rtol * std::abs(y_[i]);
      d0 += (y_[i] / sc) * (y_[i] / sc);
      d1 += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y_[i] + h0 * k1_[i];
    rhs_(t_ + h0, ytmp_, k2_);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = tol_.atol + tol_.rtol * std::abs(y_[i]);
      const double v = (k2_[i] - k1_[i]) / sc;
      d2 += v * v;
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, span});
  }

  double attempt(double h) {
    const std::size_t n = y_.size();
    const double t = t_;
    for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y_[i] + h * (a21 * k1_[i]);
    rhs_(t + c2 * h, ytmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    rhs_(t + c3 * h, ytmp_, k3_);
    for (std::size_t i = 0; i < n; ++i)
      ytmp_[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    rhs_(t + c4 * h, ytmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
      ytmp_[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    rhs_(t + c5 * h, ytmp_, k5_);
    for (std::size_t i = 0; i < n; ++i)
      ytmp_[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                              a65 * k5_[i]);
    rhs_(t + h, ytmp_, k6_);
    for (std::size_t i = 0; i < n; ++i)
      ynew_[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                              a76 * k6_[i]);
    rhs_(t + h, ynew_, k7_);

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                            e6 * k6_[i] + e7 * k7_[i]);
      const double sc = tol_.atol + tol_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
      acc += (e / sc) * (e / sc);
    }
    return std::sqrt(acc / n);
  }

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Rhs rhs_;
  OdeTolerance tol_;
  double t_;
  double h_ = 0.0;
  double err_prev_ = 1e-4;
  bool reject_last_ = false;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  State y_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_;
};

template <class State, class Rhs>
Dopri5(Rhs, double, State, OdeTolerance) -> Dopri5<State, Rhs>;

}  // namespace cyclicwave
