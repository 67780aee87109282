#include "cyclicwave/transform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cyclicwave/errors.hpp"
#include "cyclicwave/io.hpp"
#include "cyclicwave/quadrature.hpp"
#include "json.hpp"

namespace cyclicwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPhiOverflow = 700.0;

struct Node {
  double x, phi, f, F, G;
};

struct Side {
  int dir = 1;
  double edge = kInf;      // signed domain edge in this direction
  bool finite_edge = false;
  std::vector<Node> nodes;
  bool overflow = false;
  double g_err = 0.0;      // accumulated per-piece error estimates
};

// Quintic Hermite basis on [0, 1]: values, first and second derivatives at both ends.
struct Hermite {
  std::array<double, 6> c;  // G0, d0, s0, s1, d1, G1
  double value(double t) const {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    return c[0] * (1 - 10 * t3 + 15 * t4 - 6 * t5) + c[1] * (t - 6 * t3 + 8 * t4 - 3 * t5) +
           c[2] * (0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5) + c[3] * (0.5 * t3 - t4 + 0.5 * t5) +
           c[4] * (-4 * t3 + 7 * t4 - 3 * t5) + c[5] * (10 * t3 - 15 * t4 + 6 * t5);
  }
  double slope(double t) const {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    return c[0] * (-30 * t2 + 60 * t3 - 30 * t4) + c[1] * (1 - 18 * t2 + 32 * t3 - 15 * t4) +
           c[2] * (t - 4.5 * t2 + 6 * t3 - 2.5 * t4) + c[3] * (1.5 * t2 - 4 * t3 + 2.5 * t4) +
           c[4] * (-12 * t2 + 28 * t3 - 15 * t4) + c[5] * (30 * t2 - 60 * t3 + 30 * t4);
  }
};

Hermite hermite(const Node& a, const Node& b) {
  const double h = b.x - a.x;
  return {{a.G, h * a.F, h * h * a.f * a.F, h * h * b.f * b.F, h * b.F, b.G}};
}

double sq(double x) { return x * x; }

}  // namespace

struct TransformPair::Table {
  ScalarFunction f;
  double tol = 1e-12;
  double extent = 1e8;
  Side pos, neg;
  Endpoint lower, upper;

  const Side& side(double u) const { return u >= 0.0 ? pos : neg; }

  // ∫_a^b f by 16-point Gauss-Legendre.
  double gl_f(double a, double b) const { return integrate_fixed(f.fn, a, b, gauss_legendre(16)); }

  // ∫_a^b exp(phi_a + ∫_a^s f) ds with nested 16-point rules.
  double gl_F(double a, double b, double phi_a) const {
    const auto& rule = gauss_legendre(16);
    return integrate_fixed([&](double s) { return std::exp(phi_a + gl_f(a, s)); }, a, b, rule);
  }

  void build_side(Side& s);
  std::size_t locate(const Side& s, double u) const;
  double phi(double u) const;
  double g(double u) const;
  InverseResult inverse(double v) const;
  Endpoint classify(const Side& s, double s_max, double margin) const;
};

void TransformPair::Table::build_side(Side& s) {
  const double dmin = 1.0 / extent;
  double stop_x;
  if (s.finite_edge) {
    stop_x = s.edge - s.dir * dmin;
  } else {
    stop_x = s.dir * extent;
  }
  const double f0 = f(0.0);
  if (!std::isfinite(f0)) throw DomainError("f(0) is not finite");
  s.nodes.clear();
  s.nodes.push_back({0.0, 0.0, f0, 1.0, 0.0});

  double h = 1.0 / 16.0;
  if (s.finite_edge) h = std::min(h, 0.25 * std::abs(s.edge));
  while (true) {
    const Node cur = s.nodes.back();
    if (s.dir * (cur.x - stop_x) >= 0.0) break;
    double max_h = std::max(1.0 / 16.0, std::abs(cur.x));
    if (s.finite_edge) max_h = std::min(max_h, 0.5 * std::abs(s.edge - cur.x));
    h = std::min(h, max_h);
    double x1 = cur.x + s.dir * h;
    if (s.dir * (x1 - stop_x) >= 0.0) x1 = stop_x;
    const double hh = x1 - cur.x;
    if (std::abs(hh) < 1e-13 * std::max(1.0, std::abs(cur.x))) {
      throw QuadratureError("transform table cannot resolve exp(int f) near u=" + fmt17(cur.x),
                            std::min(cur.x, x1), std::max(cur.x, x1));
    }
    const double mid = 0.5 * (cur.x + x1);

    const double p_left = gl_f(cur.x, mid);
    const double p_fine = p_left + gl_f(mid, x1);
    const double p_coarse = gl_f(cur.x, x1);
    const double phi1 = cur.phi + p_fine;
    const double err_phi = std::abs(p_fine - p_coarse);

    Node next{x1, phi1, f(x1), std::exp(phi1), 0.0};
    // node positions carry a relative rounding of ε, which near a finite edge is amplified by
    // the steep f; no tolerance below that floor is attainable
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double phi_floor = 16.0 * eps * std::max(std::abs(cur.x), std::abs(x1)) *
                             (std::abs(next.f - cur.f) + std::abs(cur.f));
    bool ok = std::isfinite(next.f) &&
              err_phi <= tol * std::max(1.0, std::abs(phi1)) + phi_floor;
    double err_g = 0.0;
    if (ok) {
      const double g_left = gl_F(cur.x, mid, cur.phi);
      const double g_fine = g_left + gl_F(mid, x1, cur.phi + p_left);
      const double g_coarse = gl_F(cur.x, x1, cur.phi);
      next.G = cur.G + g_fine;
      const double scale = std::max({std::abs(next.G), std::abs(g_fine), 1e-300});
      const double herm = std::abs(hermite(cur, next).value(0.5) - (cur.G + g_left));
      err_g = std::max(std::abs(g_fine - g_coarse), herm);
      ok = std::isfinite(next.G) &&
           err_g <= tol * scale + std::abs(g_fine) * (phi_floor + err_phi + 16.0 * eps);
    }
    if (!ok) {
      h = 0.5 * std::abs(hh);
      continue;
    }
    s.nodes.push_back(next);
    s.g_err += err_g;
    if (next.phi > kPhiOverflow) {
      s.overflow = true;
      break;
    }
    h = 2.0 * std::abs(hh);
  }
}

std::size_t TransformPair::Table::locate(const Side& s, double u) const {
  // nodes are ordered outward; first index with dir·x ≥ dir·u, minus one
  auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), u,
                             [&](const Node& n, double v) { return s.dir * n.x < s.dir * v; });
  const auto idx = static_cast<std::size_t>(it - s.nodes.begin());
  return idx == 0 ? 0 : std::min(idx - 1, s.nodes.size() - 2);
}

double TransformPair::Table::phi(double u) const {
  if (u == 0.0) return 0.0;
  if (!f.contains(u)) throw DomainError("u=" + fmt17(u) + " is outside the domain of f");
  const Side& s = side(u);
  const Node& last = s.nodes.back();
  if (s.dir * (u - last.x) > 0.0) {
    return last.phi + s.dir * integrate_adaptive(f.fn, std::min(last.x, u), std::max(last.x, u),
                                                 1e-14, tol).value;
  }
  const Node& a = s.nodes[locate(s, u)];
  return a.phi + gl_f(a.x, u);
}

double TransformPair::Table::g(double u) const {
  if (u == 0.0) return 0.0;
  if (!f.contains(u)) throw DomainError("u=" + fmt17(u) + " is outside the domain of f");
  const Side& s = side(u);
  const Node& last = s.nodes.back();
  if (s.dir * (u - last.x) <= 0.0) {
    const std::size_t k = locate(s, u);
    const Node& a = s.nodes[k];
    const Node& b = s.nodes[k + 1];
    return hermite(a, b).value((u - a.x) / (b.x - a.x));
  }
  if (s.overflow) return s.dir * kInf;
  // power-law tail beyond the table
  if (s.finite_edge) {
    const double w_last = std::abs(s.edge - last.x);
    const double w = std::abs(s.edge - u);
    const double p = -s.dir * last.f * w_last;
    const double r = w / w_last;
    const double integral = std::abs(p + 1.0) < 1e-12 ? last.F * w_last * -std::log(r)
                                                      : last.F * w_last / (p + 1.0) * (1.0 - std::pow(r, p + 1.0));
    return last.G + s.dir * integral;
  }
  const double X = std::abs(last.x);
  const double p = last.x * last.f;
  const double r = std::abs(u) / X;
  const double integral = std::abs(p + 1.0) < 1e-12 ? last.F * X * std::log(r)
                                                    : last.F * X / (p + 1.0) * (std::pow(r, p + 1.0) - 1.0);
  return last.G + s.dir * integral;
}

InverseResult TransformPair::Table::inverse(double v) const {
  InverseResult out;
  if (std::isnan(v)) throw DomainError("H called with NaN");
  if (lower.finite && v <= lower.value + 1e-12) {
    v = lower.value + 1e-12;
    out.clamped = true;
  }
  if (upper.finite && v >= upper.value - 1e-12) {
    v = upper.value - 1e-12;
    out.clamped = true;
  }
  if (v == 0.0) return out;
  const Side& s = v > 0.0 ? pos : neg;
  const Node& last = s.nodes.back();
  if (s.dir * (v - last.G) <= 0.0) {
    auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), v,
                               [&](const Node& n, double val) { return s.dir * n.G < s.dir * val; });
    std::size_t k = static_cast<std::size_t>(it - s.nodes.begin());
    k = k == 0 ? 0 : std::min(k - 1, s.nodes.size() - 2);
    const Node& a = s.nodes[k];
    const Node& b = s.nodes[k + 1];
    const Hermite hp = hermite(a, b);
    // p(τ) is increasing along the side's direction; bracketed Newton in τ
    double lo = 0.0, hi = 1.0;
    double t = (b.G == a.G) ? 0.5 : std::clamp((v - a.G) / (b.G - a.G), 0.0, 1.0);
    const double span = std::abs(b.x - a.x);
    for (int it2 = 0; it2 < 100; ++it2) {
      const double r = s.dir * (hp.value(t) - v);
      if (r > 0.0) {
        hi = t;
      } else {
        lo = t;
      }
      const double d = s.dir * hp.slope(t);
      double tn = d > 0.0 ? t - r / d : 0.5 * (lo + hi);
      if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
      const double step = std::abs(tn - t) * span;
      t = tn;
      if (step <= 1e-16 * std::max(1.0, std::abs(a.x + (b.x - a.x) * t)) || hi - lo < 1e-17) break;
    }
    out.u = a.x + (b.x - a.x) * t;
    return out;
  }
  out.beyond_table = true;
  if (s.overflow) {
    out.u = last.x;
    out.clamped = true;
    return out;
  }
  const double dv = s.dir * (v - last.G);
  if (s.finite_edge) {
    const double w_last = std::abs(s.edge - last.x);
    const double p = -s.dir * last.f * w_last;
    double w;
    if (std::abs(p + 1.0) < 1e-12) {
      w = w_last * std::exp(-dv / (last.F * w_last));
    } else {
      const double rhs = 1.0 - (p + 1.0) * dv / (last.F * w_last);
      w = rhs > 0.0 ? w_last * std::pow(rhs, 1.0 / (p + 1.0)) : 0.0;
    }
    if (w <= 0.0 || w > w_last) out.clamped = true;
    out.u = s.edge - s.dir * std::clamp(w, 0.0, w_last);
    return out;
  }
  const double X = std::abs(last.x);
  const double p = last.x * last.f;
  double r;
  if (std::abs(p + 1.0) < 1e-12) {
    r = std::exp(dv / (last.F * X));
  } else {
    const double rhs = 1.0 + (p + 1.0) * dv / (last.F * X);
    r = rhs > 0.0 ? std::pow(rhs, 1.0 / (p + 1.0)) : kInf;
  }
  if (!std::isfinite(r)) {
    out.clamped = true;
    r = std::numeric_limits<double>::max() / X;
  }
  out.u = s.dir * X * r;
  return out;
}

Endpoint TransformPair::Table::classify(const Side& s, double s_max, double margin) const {
  Endpoint e;
  const Node& last = s.nodes.back();
  const bool edge_side = s.finite_edge;
  // sample points ordered toward the edge, and the corresponding log-variable
  constexpr int kPoints = 21;
  std::array<double, kPoints> xs{}, ls{};
  double reach;
  if (edge_side) {
    const double w_hi = std::min(100.0 / s_max, 0.5 * std::abs(s.edge));
    const double w_lo = w_hi / 100.0;
    for (int k = 0; k < kPoints; ++k) {
      const double w = w_hi * std::pow(w_lo / w_hi, static_cast<double>(k) / (kPoints - 1));
      xs[k] = s.edge - s.dir * w;
      ls[k] = std::log(w);
    }
    reach = xs.back();
  } else {
    for (int k = 0; k < kPoints; ++k) {
      const double r = (s_max / 100.0) * std::pow(100.0, static_cast<double>(k) / (kPoints - 1));
      xs[k] = s.dir * r;
      ls[k] = std::log(r);
    }
    reach = xs.back();
  }
  if (s.overflow && s.dir * (last.x - reach) < 0.0) {
    e.tail = TailVerdict::divergent;
    e.overflow = true;
    e.value = s.dir * kInf;
    e.note = "exp(int f) overflows near u=" + fmt17(last.x);
    e.p_hat = kInf;
    return e;
  }
  if (s.dir * (last.x - reach) < -1e-9 * std::abs(reach)) {
    throw DomainError("classification reach exceeds the transform table");
  }
  std::array<double, kPoints> ys{};
  double mx = 0.0, my = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    ys[k] = phi(xs[k]);
    mx += ls[k];
    my += ys[k];
  }
  mx /= kPoints;
  my /= kPoints;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    sxy += (ls[k] - mx) * (ys[k] - my);
    sxx += sq(ls[k] - mx);
  }
  const double p_hat = sxy / sxx;
  e.p_hat = p_hat;
  bool converges, diverges;
  if (edge_side) {
    converges = p_hat > -1.0 + margin;
    diverges = p_hat < -1.0 - margin;
  } else {
    converges = p_hat < -1.0 - margin;
    diverges = p_hat > -1.0 + margin;
  }
  const double g_reach = g(reach);
  if (diverges) {
    e.tail = TailVerdict::divergent;
    e.value = s.dir * kInf;
    return e;
  }
  if (!converges) {
    e.tail = TailVerdict::inconclusive;
    e.value = g_reach;
    e.note = "tail exponent within margin of -1; value is a lower bound";
    return e;
  }
  e.tail = TailVerdict::convergent;
  e.finite = true;
  const double F_reach = std::exp(ys.back());
  const double f_reach = f(reach);
  double tail;
  if (edge_side) {
    const double w = std::abs(s.edge - reach);
    const double p_loc = -s.dir * f_reach * w;
    tail = p_loc > -1.0 ? F_reach * w / (p_loc + 1.0) : kInf;
  } else {
    const double X = std::abs(reach);
    const double p_loc = reach * f_reach;
    tail = p_loc < -1.0 ? F_reach * X / (-p_loc - 1.0) : kInf;
  }
  if (!std::isfinite(tail)) {
    // the local exponent disagrees with the regression: fall back to the regression exponent
    const double w = edge_side ? std::abs(s.edge - reach) : std::abs(reach);
    tail = edge_side ? F_reach * w / (p_hat + 1.0) : F_reach * w / (-p_hat - 1.0);
  }
  e.value = g_reach + s.dir * tail;
  // Aitken Δ² on G at geometrically spaced reach points as the independent estimate
  const double g0 = g(xs[0]), g1 = g(xs[kPoints / 2]), g2 = g_reach;
  const double d1 = g1 - g0, d2 = g2 - g1;
  const double denom = d2 - d1;
  const double aitken = (denom != 0.0 && std::abs(d2) > 0.0) ? g2 - d2 * d2 / denom : g2;
  e.error = std::abs(e.value - aitken) + s.g_err + 1e-15 * std::abs(e.value);
  return e;
}

std::string to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::divergent: return "divergent";
    case TailVerdict::convergent: return "convergent";
    case TailVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string to_string(Holds h) {
  switch (h) {
    case Holds::yes: return "yes";
    case Holds::no: return "no";
    case Holds::inconclusive: return "inconclusive";
  }
  return "unknown";
}

const ScalarFunction& TransformPair::f() const noexcept { return t_->f; }
double TransformPair::Phi(double u) const { return t_->phi(u); }
double TransformPair::F(double u) const { return std::exp(t_->phi(u)); }
double TransformPair::G(double u) const { return t_->g(u); }
InverseResult TransformPair::H_checked(double v) const { return t_->inverse(v); }
const Endpoint& TransformPair::lower() const noexcept { return t_->lower; }
const Endpoint& TransformPair::upper() const noexcept { return t_->upper; }
double TransformPair::table_lo() const noexcept { return t_->neg.nodes.back().x; }
double TransformPair::table_hi() const noexcept { return t_->pos.nodes.back().x; }
std::size_t TransformPair::node_count() const noexcept {
  return t_->neg.nodes.size() + t_->pos.nodes.size();
}

TransformPair build_transform(const ScalarFunction& f, double tol, double extent) {
  if (!f.fn) throw DomainError("transform needs a callable f");
  if (!(tol >= 1e-14 && tol <= 1e-4)) throw DomainError("transform tolerance must lie in [1e-14, 1e-4]");
  if (!(extent >= 1e2)) throw DomainError("transform extent must be >= 100");
  if (!f.contains(0.0)) throw DomainError("f must be defined at 0");
  auto t = std::make_shared<TransformPair::Table>();
  t->f = f;
  t->tol = tol;
  t->extent = extent;
  t->pos.dir = 1;
  t->neg.dir = -1;
  t->pos.finite_edge = std::isfinite(f.hi) && f.hi < extent;
  t->neg.finite_edge = std::isfinite(f.lo) && f.lo > -extent;
  t->pos.edge = t->pos.finite_edge ? f.hi : kInf;
  t->neg.edge = t->neg.finite_edge ? f.lo : -kInf;
  t->build_side(t->pos);
  t->build_side(t->neg);
  t->upper = t->classify(t->pos, extent, 0.1);
  t->lower = t->classify(t->neg, extent, 0.1);
  return TransformPair(std::move(t));
}

Endpoints endpoints(const TransformPair& tp, double s_max, double margin) {
  const auto& t = tp.t_;
  if (!(s_max >= 1e2 && s_max <= t->extent * (1 + 1e-12))) {
    throw DomainError("s_max must lie in [100, table extent]");
  }
  return {t->classify(t->neg, s_max, margin), t->classify(t->pos, s_max, margin)};
}

NOCVerdict noc_check(const ScalarFunction& f, double s_max, double margin) {
  if (!(s_max >= 1e4)) throw DomainError("noc_check requires s_max >= 1e4");
  if (!(margin > 0.0 && margin < 1.0)) throw DomainError("margin must lie in (0, 1)");
  const TransformPair tp = build_transform(f, 1e-10, s_max);
  const Endpoints ep = endpoints(tp, s_max, margin);
  NOCVerdict v;
  v.forward = ep.upper.tail;
  v.backward = ep.lower.tail;
  v.p_hat_fwd = ep.upper.p_hat;
  v.p_hat_bwd = ep.lower.p_hat;
  v.partial_fwd = ep.upper.overflow ? kInf : tp.G(tp.table_hi());
  v.partial_bwd = ep.lower.overflow ? -kInf : tp.G(tp.table_lo());
  v.extrapolated_fwd = ep.upper.value;
  v.extrapolated_bwd = ep.lower.value;
  if (v.forward == TailVerdict::convergent || v.backward == TailVerdict::convergent) {
    v.holds = Holds::no;
  } else if (v.forward == TailVerdict::divergent && v.backward == TailVerdict::divergent) {
    v.holds = Holds::yes;
  } else {
    v.holds = Holds::inconclusive;
  }
  for (const auto* e : {&ep.upper, &ep.lower}) {
    if (!e->note.empty()) v.note += (v.note.empty() ? "" : "; ") + e->note;
  }
  return v;
}

std::string noc_json(const NOCVerdict& v) {
  nlohmann::ordered_json j;
  j["forward"] = to_string(v.forward);
  j["backward"] = to_string(v.backward);
  j["holds"] = to_string(v.holds);
  auto num = [](double x) -> nlohmann::ordered_json {
    if (std::isfinite(x)) return x;
    return fmt17(x);
  };
  j["p_hat_fwd"] = num(v.p_hat_fwd);
  j["p_hat_bwd"] = num(v.p_hat_bwd);
  if (!v.note.empty()) j["note"] = v.note;
  return j.dump(2);
}

}  // namespace cyclicwave
