#pragma once

// Method-of-lines evolution on the periodic torus: Fourier Laplacian and gradient, classical RK4.
//   linear:    v_tt − n(ḃ/b)v_t − b²Δv = 0
//   nonlinear: u_tt − n(ḃ/b)u_t − b²Δu + f(u)(u_t² − b²|∇u|²) = 0

#include <optional>
#include <string>
#include <vector>

#include "cyclicwave/blowup.hpp"
#include "cyclicwave/coeffs.hpp"
#include "cyclicwave/dopri5.hpp"
#include "cyclicwave/grid.hpp"
#include "cyclicwave/scalar_function.hpp"
#include "cyclicwave/transform.hpp"

namespace cyclicwave {

enum class Termination { completed, blowup_detected, cfl_violation };

std::string to_string(Termination t);

struct Snapshot {
  double t = 0.0;
  Field u;
};

struct Diagnostic {
  double t = 0.0;
  double max_abs = 0.0;
  double v_at_origin = 0.0;  // v(t, 0); G(u(t, 0)) for nonlinear runs with a guard
  double energy = 0.0;       // ½∫(v_t² + b²|∇v|²), with v_t = F(u)u_t for guarded nonlinear runs
};

struct SimResult {
  std::vector<Snapshot> snapshots;
  std::vector<Diagnostic> diagnostics;
  Termination termination = Termination::completed;
  double t_final = 0.0;
  std::string note;
};

struct SimOptions {
  double snapshot_interval = 0.0;      // 0 → initial and final only
  double diagnostic_interval = 1.0 / 32.0;
};

/// dt ≤ 0.5·(L/points)/max_t b(t); throws DomainError otherwise, before any stepping.
void check_cfl(const PeriodicCoefficient& b, const GridSpec& grid);

/// Samples a point field on the grid (row-major for n = 2).
Field sample(const GridSpec& grid, const PointField& fn);

SimResult evolve_linear(const PeriodicCoefficient& b, int n_coeff, const GridSpec& grid, const Field& v0,
                        const Field& v1, const SimOptions& opt = {});

/// The nonlinear term is 2/3-dealiased. Stops with blowup_detected when max|G(u) − e| < 1e−3|e|
/// for a finite endpoint e of v_guard, when max|u| > 1e8, or on a non-finite value; the last
/// snapshot then holds the last valid state.
SimResult evolve_nonlinear(const PeriodicCoefficient& b, int n_coeff, const ScalarFunction& f,
                           const GridSpec& grid, const Field& u0, const Field& u1,
                           const std::optional<TransformPair>& v_guard, const SimOptions& opt = {});

struct UniformSample {
  double t = 0.0;
  double u = 0.0;
  double u_t = 0.0;
};

struct UniformTrajectory {
  std::vector<UniformSample> samples;
  bool truncated = false;  // u left f's domain, exceeded 1e8 or became non-finite
  double t_stop = 0.0;
};

/// Spatially uniform solution of u'' = n(ḃ/b)u' − f(u)u'², sampled every dt_out.
UniformTrajectory evolve_uniform(const PeriodicCoefficient& b, int n_coeff, const ScalarFunction& f,
                                 double u0, double u1, double t_end, double dt_out = 1.0 / 64.0,
                                 OdeTolerance tol = {1e-12, 1e-14, 10'000'000});

/// "x,u" (n = 1) or "x,y,u" (n = 2), 17 significant digits.
std::string snapshot_csv(const GridSpec& grid, const Snapshot& s);
/// {grid, termination, t_final, diagnostics}
std::string manifest_json(const GridSpec& grid, const SimResult& r);

}  // namespace cyclicwave
