#include "cyclicwave/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "cyclicwave/errors.hpp"
#include "cyclicwave/io.hpp"
#include "cyclicwave/parallel.hpp"
#include "cyclicwave/quadrature.hpp"
#include "cyclicwave/spectral.hpp"
#include "json.hpp"

namespace cyclicwave {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void BlowupPlan::validate() const {
  if (n < 1) throw DomainError("dimension n must be >= 1");
  if (!(S > 2.0 * n)) throw DomainError("S must exceed 2n");
  if (M < 1) throw DomainError("M must be a positive integer");
  if (A != 1 && A != -1) throw DomainError("A must be +1 or -1");
  if (y.size() != n) throw DomainError("y must have n components");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (std::abs(y.squaredNorm() - lambda) > 1e-12 * std::max(1.0, lambda)) {
    throw DomainError("|y|^2 must equal lambda");
  }
}

double BlowupPlan::amplitude() const { return std::pow(static_cast<double>(M), -S); }
double BlowupPlan::cutoff_radius() const { return static_cast<double>(M) * M; }
double BlowupPlan::validity_radius() const { return std::pow(static_cast<double>(M), 1.5); }

double cutoff(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - r));
  const double b = std::exp(-1.0 / (r - 1.0));
  return a / (a + b);
}

InitialData make_data(const BlowupPlan& plan, const TransformPair& tp) {
  plan.validate();
  const double amp = plan.amplitude();
  const double R = plan.cutoff_radius();
  InitialData d;
  d.u0 = [amp, R](const Eigen::VectorXd& x) { return amp * cutoff(x.norm() / R); };
  d.u1 = [amp, R, plan, tp](const Eigen::VectorXd& x) {
    const double c = cutoff(x.norm() / R);
    if (c == 0.0) return 0.0;
    return plan.A * amp * c * std::exp(-tp.Phi(amp * c)) * std::cos(x.dot(plan.y));
  };
  return d;
}

namespace {

struct WeightedEnergy {
  double total = 0.0;
  double top = 0.0;
};

WeightedEnergy weighted_energy(const Field& samples, int s, const GridSpec& g, RealFft& fft) {
  std::vector<std::complex<double>> spec(fft.complex_size());
  fft.forward(samples.data(), spec.data());
  const int N = g.points;
  const int half = N / 2 + 1;
  const double norm = 1.0 / static_cast<double>(g.size());
  const double vol = std::pow(g.L, g.n);
  const double k0 = 2.0 * kPi / g.L;
  WeightedEnergy e;
  const int rows = g.n == 1 ? 1 : N;
  for (int r = 0; r < rows; ++r) {
    const int kr = g.n == 1 ? 0 : fft.wavenumber(r);
    for (int c = 0; c < half; ++c) {
      const int kc = c;  // last axis keeps non-negative wavenumbers
      const double mult = (c == 0 || (c == N / 2)) ? 1.0 : 2.0;
      const double xi2 = k0 * k0 * (static_cast<double>(kr) * kr + static_cast<double>(kc) * kc);
      const double amp2 = std::norm(spec[static_cast<std::size_t>(r) * half + c] * norm);
      const double w = mult * std::pow(1.0 + xi2, s) * amp2 * vol;
      e.total += w;
      if (std::max(std::abs(kr), kc) >= N / 4) e.top += w;
    }
  }
  return e;
}

}  // namespace

double sobolev_smallness(const PointField& u0, const PointField& u1, int s, const GridSpec& grid) {
  grid.validate();
  if (s < 0) throw DomainError("Sobolev index must be >= 0");
  const int N = grid.points;
  Field a(grid.size()), b(grid.size());
  Eigen::VectorXd x(grid.n);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.n == 1) {
      x[0] = grid.coordinate(static_cast<int>(idx));
    } else {
      x[0] = grid.coordinate(static_cast<int>(idx / N));
      x[1] = grid.coordinate(static_cast<int>(idx % N));
    }
    a[idx] = u0(x);
    b[idx] = u1(x);
  }
  RealFft fft(grid.n, N);
  const auto e0 = weighted_energy(a, s + 1, grid, fft);
  const auto e1 = weighted_energy(b, s, grid, fft);
  for (const auto* e : {&e0, &e1}) {
    if (e->total > 0.0 && e->top > 0.01 * e->total) {
      throw ResolutionError("grid under-resolves the data: " + fmt17(100.0 * e->top / e->total) +
                            "% of the weighted energy is in the top octave");
    }
  }
  return std::sqrt(e0.total) + std::sqrt(e1.total);
}

namespace {

// Radial Fourier transform ĥ(κ) = ∫_{ℝⁿ} h(|z|) e^{−iκ·z} dz for h supported in |z| < 2,
// as a weighted sum over a fixed radial quadrature grid.
class RadialTransform {
 public:
  RadialTransform(int n, const std::function<double(double)>& h) : n_(n) {
    const auto& rule = gauss_legendre(16);
    constexpr int pieces = 128;
    for (int p = 0; p < pieces; ++p) {
      const double a = 2.0 * p / pieces, b = 2.0 * (p + 1) / pieces;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = mid + half * rule.nodes[i];
        r_.push_back(r);
        wh_.push_back(rule.weights[i] * half * h(r));
      }
    }
  }

  double operator()(double kappa) const {
    double acc = 0.0;
    const std::size_t m = r_.size();
    if (n_ == 1) {
      for (std::size_t i = 0; i < m; ++i) acc += wh_[i] * std::cos(kappa * r_[i]);
      return 2.0 * acc;
    }
    if (n_ == 3) {
      for (std::size_t i = 0; i < m; ++i) acc += wh_[i] * r_[i] * std::sin(kappa * r_[i]);
      return 4.0 * kPi * acc / kappa;
    }
    const double nu = 0.5 * n_ - 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += wh_[i] * std::cyl_bessel_j(nu, kappa * r_[i]) * std::pow(r_[i], 0.5 * n_);
    }
    return std::pow(2.0 * kPi, 0.5 * n_) * std::pow(kappa, -nu) * acc;
  }

 private:
  int n_;
  std::vector<double> r_, wh_;
};

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Average over directions of (η·ŷ)^{2j}|η|^{−2j}: (2j−1)!!/(n(n+2)…(n+2j−2)).
double sphere_moment(int n, int j) {
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= (2.0 * i + 1.0) / (n + 2.0 * i);
  return r;
}

}  // namespace

double sobolev_smallness_radial(const BlowupPlan& plan, const TransformPair& tp, int s) {
  plan.validate();
  if (s < 0) throw DomainError("Sobolev index must be >= 0");
  const int n = plan.n;
  const double R = plan.cutoff_radius();
  const double amp = plan.amplitude();
  const double ylen = std::sqrt(plan.lambda);

  const RadialTransform chi_hat(n, cutoff);
  const RadialTransform g_hat(n, [&](double r) {
    const double c = cutoff(r);
    return c == 0.0 ? 0.0 : c * std::exp(-tp.Phi(amp * c));
  });

  // angular average of (1 + |η + y|²)^s at |η| = k
  auto shifted_weight = [&](double k) {
    double acc = 0.0;
    const double base = 1.0 + k * k + plan.lambda;
    for (int j = 0; 2 * j <= s; ++j) {
      acc += binomial(s, 2 * j) * std::pow(base, s - 2 * j) * std::pow(2.0 * k * ylen, 2 * j) *
             sphere_moment(n, j);
    }
    return acc;
  };

  const auto& rule = gauss_legendre(16);
  constexpr double kBlock = 2.0;
  constexpr double kCap = 800.0;
  double I0 = 0.0, I1 = 0.0, J1 = 0.0;
  double sup_far = 0.0;      // sup |ĝ| over κ ≥ R|y| within the computed range
  double sup_last = 0.0;     // sup |ĝ| over the last computed quarter, envelope bound beyond
  int quiet = 0;
  bool converged = false;
  for (double k0 = 0.0; k0 < kCap; k0 += kBlock) {
    double b0 = 0.0, b1 = 0.0, bj = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double kappa = k0 + 0.5 * kBlock * (1.0 + rule.nodes[i]);
      const double w = 0.5 * kBlock * rule.weights[i] * std::pow(kappa, n - 1);
      const double c = chi_hat(kappa);
      const double g = g_hat(kappa);
      const double k = kappa / R;
      b0 += w * std::pow(1.0 + k * k, s + 1) * c * c;
      b1 += w * shifted_weight(k) * g * g;
      bj += w * std::pow(1.0 + (k + ylen) * (k + ylen), s) * std::abs(g);
      if (kappa >= R * ylen) sup_far = std::max(sup_far, std::abs(g));
      if (kappa >= 0.75 * kCap) sup_last = std::max(sup_last, std::abs(g));
    }
    I0 += b0;
    I1 += b1;
    J1 += bj;
    // J1 only enters the interference bound; its tail reaches the rounding floor first
    const bool small = b0 <= 1e-12 * I0 && b1 <= 1e-12 * I1 && bj <= 1e-7 * J1;
    quiet = small ? quiet + 1 : 0;
    if (k0 > 20.0 && quiet >= 3) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ResolutionError("radial Sobolev integrals did not converge below kappa=800");
  if (R * ylen >= kCap) sup_far = sup_last;

  const double omega = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
  const double pre = amp * amp * std::pow(R, n) * std::pow(2.0 * kPi, -n) * omega;
  const double norm0_sq = pre * I0;
  const double main1_sq = 0.5 * pre * I1;
  // |ĝ(ξ−y)ĝ(ξ+y)| ≤ T(|ĝ(ξ−y)| + |ĝ(ξ+y)|) with T = sup_{|ζ|≥|y|} |ĝ(ζ)|
  const double cross_sq = pre * sup_far * J1;
  return std::sqrt(norm0_sq) + std::sqrt(main1_sq + cross_sq);
}

LocalSolution::LocalSolution(BlowupPlan plan, const TransformPair& tp, PeriodicCoefficient b,
                             FundamentalPair W)
    : plan_(std::move(plan)), g0_(0.0), b_(std::move(b)), W_(std::move(W)) {
  plan_.validate();
  if (std::abs(W_.lambda() - plan_.lambda) > 1e-12 * std::max(1.0, plan_.lambda)) {
    throw DomainError("fundamental pair was built for a different lambda");
  }
  g0_ = tp.G(plan_.amplitude());
}

double LocalSolution::at_origin(double t) const {
  if (!(t >= 0.0)) throw DomainError("t must be >= 0");
  const double ratio = std::pow(b_.eval(t) / b_.eval(0.0), 0.5 * plan_.n);
  return g0_ + W_.W(t) * ratio * plan_.A * plan_.amplitude();
}

double LocalSolution::operator()(double t, const Eigen::VectorXd& x) const {
  if (!(t >= 0.0 && t <= plan_.M)) throw DomainError("t outside [0, M]");
  if (x.size() != plan_.n) throw DomainError("x has the wrong dimension");
  if (x.norm() > plan_.validity_radius()) throw DomainError("|x| exceeds M^(3/2)");
  const double ratio = std::pow(b_.eval(t) / b_.eval(0.0), 0.5 * plan_.n);
  return g0_ + W_.W(t) * ratio * plan_.A * plan_.amplitude() * std::cos(x.dot(plan_.y));
}

std::optional<double> first_crossing(const LocalSolution& v, double endpoint, int A, double t_max) {
  const double thr = endpoint - A * 1e-9 * std::abs(endpoint);
  auto crossed = [&](double t) { return A * (v.at_origin(t) - thr) >= 0.0; };
  if (crossed(0.0)) return 0.0;
  constexpr double step = 1.0 / 32.0;
  const int steps = static_cast<int>(std::ceil(t_max / step));
  double prev = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double t = std::min(t_max, k * step);
    if (crossed(t)) {
      double lo = prev, hi = t;
      for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (crossed(mid) ? hi : lo) = mid;
      }
      return hi;
    }
    prev = t;
  }
  return std::nullopt;
}

BlowupCertificate certify_blowup(const CertifySearch& search, const TransformPair& tp,
                                 const PeriodicCoefficient& b, int n, double delta) {
  if (n < 1) throw DomainError("dimension n must be >= 1");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (search.lambdas.empty()) throw DomainError("certify_blowup needs at least one lambda candidate");
  if (search.M_max < 1) throw DomainError("M_max must be >= 1");
  int A;
  double endpoint;
  if (tp.upper().finite) {
    A = 1;
    endpoint = tp.b_G();
  } else if (tp.lower().finite) {
    A = -1;
    endpoint = tp.a_G();
  } else {
    throw NotApplicableError("Nakanishi-Ohta condition holds; no blow-up certified by this construction");
  }
  const double S = search.S > 0.0 ? search.S : 2.0 * n + 1.0;
  const int s = search.sobolev_index > 0 ? search.sobolev_index : (n + 2) / 2 + 1;
  const HillPotential pot(b, n);

  struct Outcome {
    std::optional<BlowupCertificate> cert;
    double best_ratio = 0.0;
  };
  std::vector<Outcome> outcomes(search.lambdas.size());
  parallel_for(search.lambdas.size(), [&](std::size_t idx) {
    const double lambda = search.lambdas[idx];
    FundamentalPair W(pot, lambda, search.tol);
    const Monodromy& m = W.monodromy();
    const MultiplierPair mp = classify(m);
    if (mp.cls != StabilityClass::unstable) {
      throw DomainError("lambda=" + fmt17(lambda) + " is not inside an instability interval");
    }
    BlowupPlan plan;
    plan.S = S;
    plan.A = A;
    plan.n = n;
    plan.lambda = lambda;
    plan.y = Eigen::VectorXd::Zero(n);
    plan.y[0] = std::sqrt(lambda);
    Outcome& out = outcomes[idx];
    for (int M = 1; M <= search.M_max; ++M) {
      plan.M = M;
      const double amp = plan.amplitude();
      const LemmaValues lv = lemma_l3_values(m, M);
      const double g0 = tp.G(amp);
      double vM;
      if (lv.w.log_scale == 0.0) {
        vM = g0 + A * amp * lv.w.mantissa;
      } else {
        const double logmag = std::log(std::abs(lv.w.mantissa) * amp) + lv.w.log_scale;
        vM = logmag > 700.0 ? A * std::copysign(std::numeric_limits<double>::infinity(), lv.w.mantissa)
                            : g0 + A * amp * lv.w.value();
      }
      out.best_ratio = std::max(out.best_ratio, std::abs(vM) / std::abs(endpoint));
      if (!(std::abs(vM) >= std::abs(endpoint))) continue;
      const LocalSolution v(plan, tp, b, W);
      const auto t_star = first_crossing(v, endpoint, A, M);
      if (!t_star) continue;
      const double small = sobolev_smallness_radial(plan, tp, s);
      if (!(small <= delta)) continue;
      BlowupCertificate c;
      c.plan = plan;
      c.mu0 = mp.mu0;
      c.multiplier_sign = mp.sign;
      c.b21 = m.b21;
      c.endpoint = endpoint;
      c.v_M = vM;
      c.smallness = small;
      c.sobolev_index = s;
      c.t_star = t_star;
      for (int k = 0; k <= 2 * M; ++k) {
        const double t = 0.5 * k;
        c.trajectory.emplace_back(t, v.at_origin(t));
      }
      out.cert = std::move(c);
      return;
    }
  });

  const BlowupCertificate* best = nullptr;
  double best_ratio = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    best_ratio = std::max(best_ratio, outcomes[i].best_ratio);
    const auto& c = outcomes[i].cert;
    if (!c) continue;
    if (best == nullptr || c->plan.M < best->plan.M ||
        (c->plan.M == best->plan.M && c->plan.lambda < best->plan.lambda)) {
      best = &*c;
    }
  }
  if (best == nullptr) {
    throw SearchExhaustedError("no M <= " + std::to_string(search.M_max) +
                               " certifies blow-up; best |v(M,0)|/|endpoint| = " + fmt17(best_ratio));
  }
  return *best;
}

std::string certificate_json(const BlowupCertificate& c) {
  nlohmann::ordered_json j;
  j["S"] = c.plan.S;
  j["M"] = c.plan.M;
  j["A"] = c.plan.A;
  j["lambda"] = c.plan.lambda;
  j["y"] = std::vector<double>(c.plan.y.data(), c.plan.y.data() + c.plan.y.size());
  j["mu0"] = c.mu0;
  j["b21"] = c.b21;
  j["b_G"] = c.endpoint;
  if (c.t_star) {
    j["t_star"] = *c.t_star;
  } else {
    j["t_star"] = nullptr;
  }
  j["smallness"] = c.smallness;
  auto traj = nlohmann::ordered_json::array();
  for (const auto& [t, v] : c.trajectory) traj.push_back({t, v});
  j["trajectory"] = std::move(traj);
  j["n"] = c.plan.n;
  j["multiplier_sign"] = c.multiplier_sign;
  j["v_M"] = c.v_M;
  j["sobolev_index"] = c.sobolev_index;
  return j.dump(2);
}

}  // namespace cyclicwave
