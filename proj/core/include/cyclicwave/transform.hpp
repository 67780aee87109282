#pragma once

// G(u) = ∫₀ᵘ exp(∫₀ˢ f) ds, its inverse H, the endpoints a_G, b_G and the classifier for
// divergence of both improper integrals of exp(∫₀ˢ f).

#include <memory>
#include <string>
#include <vector>

#include "cyclicwave/scalar_function.hpp"

namespace cyclicwave {

enum class TailVerdict { divergent, convergent, inconclusive };
enum class Holds { yes, no, inconclusive };

std::string to_string(TailVerdict v);
std::string to_string(Holds h);

/// One side (u → +edge or u → −edge) of G.
struct Endpoint {
  double value = 0.0;        // limit of G (±inf when infinite); lower bound when inconclusive
  bool finite = false;
  double error = 0.0;        // bound on |value − limit| when finite
  TailVerdict tail = TailVerdict::inconclusive;
  double p_hat = 0.0;        // tail exponent of F (in |s| or in distance to a finite edge)
  bool overflow = false;     // ∫f exceeded 700 before the table ended
  std::string note;
};

struct Endpoints {
  Endpoint lower;
  Endpoint upper;
};

struct InverseResult {
  double u = 0.0;
  bool clamped = false;      // v was outside (a_G + 1e-12, b_G − 1e-12) and was clamped
  bool beyond_table = false; // answer comes from the tail model
};

class TransformPair {
 public:
  struct Table;

  const ScalarFunction& f() const noexcept;
  /// ∫₀ᵘ f
  double Phi(double u) const;
  double F(double u) const;
  double G(double u) const;
  double H(double v) const { return H_checked(v).u; }
  InverseResult H_checked(double v) const;

  const Endpoint& lower() const noexcept;
  const Endpoint& upper() const noexcept;
  double a_G() const noexcept { return lower().value; }
  double b_G() const noexcept { return upper().value; }

  /// Range of u covered by the cumulative table.
  double table_lo() const noexcept;
  double table_hi() const noexcept;
  std::size_t node_count() const noexcept;

  explicit TransformPair(std::shared_ptr<const Table> t) : t_(std::move(t)) {}

  friend Endpoints endpoints(const TransformPair& tp, double s_max, double margin);

 private:
  std::shared_ptr<const Table> t_;
};

/// Builds the cumulative table out to |u| = extent (or to within 1/extent of a finite edge of
/// f's domain) with relative tolerance tol, then classifies both endpoints with margin 0.1.
/// Throws QuadratureError naming the interval when a piece cannot be resolved.
TransformPair build_transform(const ScalarFunction& f, double tol = 1e-12, double extent = 1e8);

/// Endpoint classification using the table out to s_max (s_max ≤ table extent).
Endpoints endpoints(const TransformPair& tp, double s_max, double margin = 0.1);

struct NOCVerdict {
  TailVerdict forward = TailVerdict::inconclusive;
  TailVerdict backward = TailVerdict::inconclusive;
  Holds holds = Holds::inconclusive;
  double p_hat_fwd = 0.0;
  double p_hat_bwd = 0.0;
  double partial_fwd = 0.0;       // ∫₀^{s_max} F
  double partial_bwd = 0.0;       // ∫_{−s_max}^0 F
  double extrapolated_fwd = 0.0;  // limit estimate when convergent, +inf otherwise
  double extrapolated_bwd = 0.0;
  std::string note;
};

NOCVerdict noc_check(const ScalarFunction& f, double s_max = 1e6, double margin = 0.1);

/// {forward, backward, holds, p_hat_fwd, p_hat_bwd}
std::string noc_json(const NOCVerdict& v);

}  // namespace cyclicwave
