#pragma once

#include <vector>

namespace cyclicwave {

/// Uniform periodic grid on [−L/2, L/2)^n, n ∈ {1, 2}.
struct GridSpec {
  int n = 1;
  double L = 1.0;
  int points = 256;  // per axis, power of two
  double dt = 1e-3;
  double t_end = 1.0;

  /// Throws DomainError when n, L, points, dt or t_end is inadmissible (CFL is checked by the solver).
  void validate() const;
  std::size_t size() const;
  double spacing() const { return L / points; }
  double coordinate(int i) const { return -0.5 * L + spacing() * i; }
};

/// Row-major samples of a field on a GridSpec (index = i0·points + i1 for n = 2).
using Field = std::vector<double>;

}  // namespace cyclicwave
