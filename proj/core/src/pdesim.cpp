#include "cyclicwave/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "cyclicwave/errors.hpp"
#include "cyclicwave/io.hpp"
#include "cyclicwave/spectral.hpp"
#include "json.hpp"

namespace cyclicwave {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blowup_detected: return "blowup_detected";
    case Termination::cfl_violation: return "cfl_violation";
  }
  return "unknown";
}

void check_cfl(const PeriodicCoefficient& b, const GridSpec& grid) {
  grid.validate();
  const double bmax = b.max_value(4096);
  const double limit = 0.5 * grid.spacing() / bmax;
  if (grid.dt > limit) {
    throw DomainError("CFL violation: dt=" + fmt17(grid.dt) + " exceeds 0.5*(L/points)/max b=" + fmt17(limit));
  }
}

Field sample(const GridSpec& grid, const PointField& fn) {
  grid.validate();
  Field out(grid.size());
  Eigen::VectorXd x(grid.n);
  const int N = grid.points;
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    if (grid.n == 1) {
      x[0] = grid.coordinate(static_cast<int>(idx));
    } else {
      x[0] = grid.coordinate(static_cast<int>(idx / N));
      x[1] = grid.coordinate(static_cast<int>(idx % N));
    }
    out[idx] = fn(x);
  }
  return out;
}

namespace {

using cplx = std::complex<double>;

class SpectralOps {
 public:
  explicit SpectralOps(const GridSpec& g)
      : n_(g.n), N_(g.points), half_(g.points / 2 + 1), k0_(2.0 * std::numbers::pi / g.L),
        fft_(g.n, g.points), hat_(fft_.complex_size()), work_(fft_.complex_size()) {}

  /// Δu and, when requested, the gradient components.
  void apply(const Field& u, Field& lap, Field* g0, Field* g1) {
    fft_.forward(u.data(), hat_.data());
    const double norm = 1.0 / static_cast<double>(fft_.real_size());
    each_mode([&](std::size_t i, int kr, int kc, bool, bool) {
      const double k2 = k0_ * k0_ * (static_cast<double>(kr) * kr + static_cast<double>(kc) * kc);
      work_[i] = -k2 * norm * hat_[i];
    });
    fft_.backward(work_.data(), lap.data());
    if (g0 != nullptr) derivative(0, *g0, norm);
    if (g1 != nullptr) derivative(1, *g1, norm);
  }

  /// Zeros every mode with some |k_i| > points/3.
  void dealias(Field& w) {
    fft_.forward(w.data(), hat_.data());
    const double norm = 1.0 / static_cast<double>(fft_.real_size());
    const int cut = N_ / 3;
    each_mode([&](std::size_t i, int kr, int kc, bool, bool) {
      hat_[i] = (std::abs(kr) > cut || kc > cut) ? cplx{} : hat_[i] * norm;
    });
    fft_.backward(hat_.data(), w.data());
  }

 private:
  template <class Fn>
  void each_mode(Fn&& fn) {
    const int rows = n_ == 1 ? 1 : N_;
    for (int r = 0; r < rows; ++r) {
      const int kr = n_ == 1 ? 0 : fft_.wavenumber(r);
      for (int c = 0; c < half_; ++c) {
        fn(static_cast<std::size_t>(r) * half_ + c, kr, c, n_ == 2 && 2 * r == N_, 2 * c == N_);
      }
    }
  }

  // axis 0 is the last (only) axis for n = 1 and the row axis for n = 2
  void derivative(int axis, Field& out, double norm) {
    const bool rows = n_ == 2 && axis == 0;
    each_mode([&](std::size_t i, int kr, int kc, bool nyq_r, bool nyq_c) {
      const int k = rows ? kr : kc;
      const bool nyq = rows ? nyq_r : nyq_c;
      work_[i] = nyq ? cplx{} : cplx{0.0, k0_ * k * norm} * hat_[i];
    });
    fft_.backward(work_.data(), out.data());
  }

  int n_, N_, half_;
  double k0_;
  RealFft fft_;
  std::vector<cplx> hat_, work_;
};

struct State {
  Field u, p;
};

struct Recorder {
  const GridSpec& grid;
  const SimOptions& opt;
  SimResult result;
  double next_snap = 0.0;
  double next_diag = 0.0;

  bool due(double t, double& next, double interval) {
    if (t + 1e-9 * std::max(1.0, t) < next) return false;
    next = interval > 0.0 ? (std::floor(t / interval + 1e-9) + 1.0) * interval
                          : std::numeric_limits<double>::infinity();
    return true;
  }
};

class Evolver {
 public:
  Evolver(const PeriodicCoefficient& b, int n_coeff, const ScalarFunction* f, const GridSpec& grid,
          const std::optional<TransformPair>* guard, const SimOptions& opt)
      : b_(b), n_coeff_(n_coeff), f_(f), grid_(grid), guard_(guard), opt_(opt), ops_(grid),
        size_(grid.size()), lap_(size_), g0_(size_), g1_(size_), nl_(size_) {}

  SimResult run(State s) {
    check_cfl(b_, grid_);
    if (s.u.size() != size_ || s.p.size() != size_) throw DomainError("field size does not match the grid");
    if (opt_.snapshot_interval < 0.0 || !(opt_.diagnostic_interval > 0.0)) {
      throw DomainError("snapshot interval must be >= 0 and diagnostic interval > 0");
    }
    Recorder rec{grid_, opt_, {}, 0.0, 0.0};
    const long steps = std::max(1L, static_cast<long>(std::ceil(grid_.t_end / grid_.dt - 1e-9)));
    const double h = grid_.t_end / static_cast<double>(steps);
    record(rec, 0.0, s, true);
    if (grid_.t_end == 0.0) {
      rec.result.t_final = 0.0;
      return std::move(rec.result);
    }
    State k1 = s, k2 = s, k3 = s, k4 = s, tmp = s;
    for (long step = 0; step < steps; ++step) {
      const double t = h * static_cast<double>(step);
      rhs(t, s, k1);
      axpy(s, 0.5 * h, k1, tmp);
      rhs(t + 0.5 * h, tmp, k2);
      axpy(s, 0.5 * h, k2, tmp);
      rhs(t + 0.5 * h, tmp, k3);
      axpy(s, h, k3, tmp);
      rhs(t + h, tmp, k4);
      for (std::size_t i = 0; i < size_; ++i) {
        tmp.u[i] = s.u[i] + h / 6.0 * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
        tmp.p[i] = s.p[i] + h / 6.0 * (k1.p[i] + 2.0 * k2.p[i] + 2.0 * k3.p[i] + k4.p[i]);
      }
      const double t_new = step + 1 == steps ? grid_.t_end : h * static_cast<double>(step + 1);
      const auto bad = blowup_reason(tmp);
      if (bad == Reason::non_finite) {
        rec.result.termination = Termination::blowup_detected;
        rec.result.note = "non-finite value after t=" + fmt17(t) + "; last valid state kept";
        record(rec, t, s, true);
        rec.result.t_final = t;
        return std::move(rec.result);
      }
      std::swap(s, tmp);
      if (bad != Reason::none) {
        rec.result.termination = Termination::blowup_detected;
        rec.result.note = bad == Reason::amplitude   ? "max|u| exceeded 1e8"
                          : bad == Reason::endpoint ? "G(u) reached the endpoint within 1e-3"
                                                    : "u left the domain of f";
        record(rec, t_new, s, true);
        rec.result.t_final = t_new;
        return std::move(rec.result);
      }
      record(rec, t_new, s, step + 1 == steps);
    }
    rec.result.t_final = grid_.t_end;
    return std::move(rec.result);
  }

 private:
  enum class Reason { none, non_finite, amplitude, endpoint, domain };

  void axpy(const State& s, double a, const State& k, State& out) const {
    for (std::size_t i = 0; i < size_; ++i) {
      out.u[i] = s.u[i] + a * k.u[i];
      out.p[i] = s.p[i] + a * k.p[i];
    }
  }

  void rhs(double t, const State& s, State& d) {
    const auto [bv, bd, bdd] = b_.jet(t);
    (void)bdd;
    const double damp = n_coeff_ * bd / bv;
    const double b2 = bv * bv;
    const bool nonlinear = f_ != nullptr;
    ops_.apply(s.u, lap_, nonlinear ? &g0_ : nullptr, nonlinear && grid_.n == 2 ? &g1_ : nullptr);
    if (nonlinear) {
      for (std::size_t i = 0; i < size_; ++i) {
        double grad2 = g0_[i] * g0_[i];
        if (grid_.n == 2) grad2 += g1_[i] * g1_[i];
        const double u = s.u[i];
        const double fu = f_->contains(u) ? (*f_)(u) : std::numeric_limits<double>::quiet_NaN();
        nl_[i] = fu * (s.p[i] * s.p[i] - b2 * grad2);
      }
      ops_.dealias(nl_);
    }
    for (std::size_t i = 0; i < size_; ++i) {
      d.u[i] = s.p[i];
      d.p[i] = damp * s.p[i] + b2 * lap_[i] - (nonlinear ? nl_[i] : 0.0);
    }
  }

  Reason blowup_reason(const State& s) const {
    double umax = 0.0;
    for (std::size_t i = 0; i < size_; ++i) {
      if (!std::isfinite(s.u[i]) || !std::isfinite(s.p[i])) return Reason::non_finite;
      umax = std::max(umax, std::abs(s.u[i]));
    }
    if (f_ == nullptr) return Reason::none;
    if (umax > 1e8) return Reason::amplitude;
    for (std::size_t i = 0; i < size_; ++i) {
      if (!f_->contains(s.u[i])) return Reason::domain;
    }
    if (guard_ != nullptr && guard_->has_value()) {
      const TransformPair& tp = **guard_;
      for (const Endpoint* e : {&tp.upper(), &tp.lower()}) {
        if (!e->finite) continue;
        for (std::size_t i = 0; i < size_; ++i) {
          if (std::abs(tp.G(s.u[i]) - e->value) < 1e-3 * std::abs(e->value)) return Reason::endpoint;
        }
      }
    }
    return Reason::none;
  }

  void record(Recorder& rec, double t, const State& s, bool force) {
    const bool snap = rec.due(t, rec.next_snap, opt_.snapshot_interval) || force;
    const bool diag = rec.due(t, rec.next_diag, opt_.diagnostic_interval) || force;
    auto& snaps = rec.result.snapshots;
    if (snap && (snaps.empty() || snaps.back().t < t)) snaps.push_back({t, s.u});
    auto& diags = rec.result.diagnostics;
    if (diag && (diags.empty() || diags.back().t < t)) diags.push_back(diagnostic(t, s));
  }

  Diagnostic diagnostic(double t, const State& s) {
    Diagnostic d;
    d.t = t;
    const bool guarded = f_ != nullptr && guard_ != nullptr && guard_->has_value();
    for (double v : s.u) d.max_abs = std::max(d.max_abs, std::abs(v));
    const int N = grid_.points;
    const std::size_t origin = grid_.n == 1 ? N / 2 : static_cast<std::size_t>(N / 2) * N + N / 2;
    d.v_at_origin = guarded ? (**guard_).G(s.u[origin]) : s.u[origin];
    ops_.apply(s.u, lap_, &g0_, grid_.n == 2 ? &g1_ : nullptr);
    const double b2 = b_.eval(t) * b_.eval(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < size_; ++i) {
      double grad2 = g0_[i] * g0_[i];
      if (grid_.n == 2) grad2 += g1_[i] * g1_[i];
      const double w = guarded ? std::pow((**guard_).F(s.u[i]), 2) : 1.0;
      acc += w * (s.p[i] * s.p[i] + b2 * grad2);
    }
    d.energy = 0.5 * acc * std::pow(grid_.spacing(), grid_.n);
    return d;
  }

  const PeriodicCoefficient& b_;
  int n_coeff_;
  const ScalarFunction* f_;
  const GridSpec& grid_;
  const std::optional<TransformPair>* guard_;
  const SimOptions& opt_;
  SpectralOps ops_;
  std::size_t size_;
  Field lap_, g0_, g1_, nl_;
};

}  // namespace

SimResult evolve_linear(const PeriodicCoefficient& b, int n_coeff, const GridSpec& grid, const Field& v0,
                        const Field& v1, const SimOptions& opt) {
  if (n_coeff < 1) throw DomainError("n must be >= 1");
  grid.validate();
  Evolver ev(b, n_coeff, nullptr, grid, nullptr, opt);
  return ev.run({v0, v1});
}

SimResult evolve_nonlinear(const PeriodicCoefficient& b, int n_coeff, const ScalarFunction& f,
                           const GridSpec& grid, const Field& u0, const Field& u1,
                           const std::optional<TransformPair>& v_guard, const SimOptions& opt) {
  if (n_coeff < 1) throw DomainError("n must be >= 1");
  grid.validate();
  for (double u : u0) {
    if (!f.contains(u)) throw DomainError("initial data leaves the domain of f");
  }
  Evolver ev(b, n_coeff, &f, grid, &v_guard, opt);
  return ev.run({u0, u1});
}

UniformTrajectory evolve_uniform(const PeriodicCoefficient& b, int n_coeff, const ScalarFunction& f,
                                 double u0, double u1, double t_end, double dt_out, OdeTolerance tol) {
  if (n_coeff < 1) throw DomainError("n must be >= 1");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be finite and >= 0");
  if (!(dt_out > 0.0)) throw DomainError("output spacing must be positive");
  if (!f.contains(u0)) throw DomainError("u0 outside the domain of f");
  auto rhs = [&](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    const auto [bv, bd, bdd] = b.jet(t);
    (void)bdd;
    const double fu = f.contains(y[0]) ? f(y[0]) : std::numeric_limits<double>::quiet_NaN();
    dy[0] = y[1];
    dy[1] = n_coeff * bd / bv * y[1] - fu * y[1] * y[1];
  };
  auto stop = [&](double, const std::array<double, 2>& y) {
    return !std::isfinite(y[0]) || !std::isfinite(y[1]) || std::abs(y[0]) > 1e8 || !f.contains(y[0]);
  };
  UniformTrajectory out;
  Dopri5 solver(rhs, 0.0, std::array<double, 2>{u0, u1}, tol);
  out.samples.push_back({0.0, u0, u1});
  const long count = static_cast<long>(std::ceil(t_end / dt_out - 1e-9));
  for (long k = 1; k <= count; ++k) {
    const double t = std::min(t_end, dt_out * static_cast<double>(k));
    bool halted = false;
    try {
      halted = solver.advance_to(t, stop);
    } catch (const IntegrationError&) {
      halted = true;
    }
    const auto& y = solver.state();
    out.samples.push_back({solver.time(), y[0], y[1]});
    if (halted) {
      out.truncated = true;
      break;
    }
  }
  out.t_stop = solver.time();
  return out;
}

std::string snapshot_csv(const GridSpec& grid, const Snapshot& s) {
  std::ostringstream os;
  const int N = grid.points;
  if (grid.n == 1) {
    os << "x,u\n";
    for (int i = 0; i < N; ++i) os << fmt17(grid.coordinate(i)) << ',' << fmt17(s.u[i]) << '\n';
  } else {
    os << "x,y,u\n";
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        os << fmt17(grid.coordinate(i)) << ',' << fmt17(grid.coordinate(j)) << ','
           << fmt17(s.u[static_cast<std::size_t>(i) * N + j]) << '\n';
      }
    }
  }
  return os.str();
}

namespace {

nlohmann::ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt17(x);
}

}  // namespace

std::string manifest_json(const GridSpec& grid, const SimResult& r) {
  nlohmann::ordered_json j;
  j["grid"] = {{"n", grid.n}, {"L", grid.L}, {"points", grid.points}, {"dt", grid.dt}, {"t_end", grid.t_end}};
  j["termination"] = to_string(r.termination);
  j["t_final"] = r.t_final;
  auto diags = nlohmann::ordered_json::array();
  for (const auto& d : r.diagnostics) {
    diags.push_back({{"t", d.t}, {"max_abs", num(d.max_abs)}, {"v_at_origin", num(d.v_at_origin)},
                     {"energy", num(d.energy)}});
  }
  j["diagnostics"] = std::move(diags);
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(2);
}

}  // namespace cyclicwave
