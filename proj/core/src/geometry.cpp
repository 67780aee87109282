#include "cyclicwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cyclicwave/dopri5.hpp"
#include "cyclicwave/errors.hpp"
#include "cyclicwave/io.hpp"

namespace cyclicwave {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void require_dim(const Eigen::VectorXd& u, int m) {
  if (u.size() != m) throw DomainError("point has dimension " + std::to_string(u.size()) +
                                       ", chart has " + std::to_string(m));
}

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

double ConformalSpec::base(const Eigen::VectorXd& u) const {
  double b = c0;
  for (int i = 0; i < dim(); ++i) b += coef[i] * ipow(u[i], power[i]);
  if (!(b > 0.0)) throw DomainError("conformal factor base is not positive at this point");
  return b;
}

double ConformalSpec::value(const Eigen::VectorXd& u) const { return std::pow(base(u), alpha); }

Eigen::VectorXd ConformalSpec::gradient(const Eigen::VectorXd& u) const {
  const double b = base(u);
  const double pre = alpha * std::pow(b, alpha - 1.0);
  Eigen::VectorXd g(dim());
  for (int k = 0; k < dim(); ++k) {
    g[k] = power[k] == 0 ? 0.0 : pre * coef[k] * power[k] * ipow(u[k], power[k] - 1);
  }
  return g;
}

double ConformalSpec::laplacian_log(const Eigen::VectorXd& u) const {
  const double b = base(u);
  double lap = 0.0, grad2 = 0.0;
  for (int k = 0; k < dim(); ++k) {
    const int p = power[k];
    if (p >= 1) {
      const double d1 = coef[k] * p * ipow(u[k], p - 1);
      grad2 += d1 * d1;
    }
    if (p >= 2) lap += coef[k] * p * (p - 1) * ipow(u[k], p - 2);
  }
  return alpha * (lap / b - grad2 / (b * b));
}

namespace {

void validate(const ConformalSpec& s) {
  if (s.coef.empty()) throw DomainError("conformal factor needs at least one coordinate");
  if (s.coef.size() != s.power.size()) throw DomainError("conformal factor: coef/power size mismatch");
  for (int p : s.power) {
    if (p < 0) throw DomainError("conformal factor powers must be non-negative integers");
  }
  if (!std::isfinite(s.alpha) || !std::isfinite(s.c0)) throw DomainError("conformal factor must be finite");
}

std::string describe_spec(const ConformalSpec& s) {
  std::ostringstream os;
  os << "(" << s.c0;
  for (int i = 0; i < s.dim(); ++i) os << " + " << s.coef[i] << "*u" << (i + 1) << "^" << s.power[i];
  os << ")^" << s.alpha;
  return os.str();
}

}  // namespace

MetricChart make_conformal(ConformalSpec spec) {
  validate(spec);
  MetricChart c;
  c.m_ = spec.dim();
  c.family_ = MetricFamily::conformal;
  c.name_ = "conformal " + describe_spec(spec);
  c.scalar_ = std::make_shared<const ConformalSpec>(std::move(spec));
  return c;
}

MetricChart make_diagonal_perturbed(ConformalSpec spec, double pert) {
  validate(spec);
  if (!(std::abs(pert) < 1.0)) throw DomainError("diagonal perturbation requires |c| < 1");
  MetricChart c;
  c.m_ = spec.dim();
  c.family_ = MetricFamily::diagonal_perturbed;
  c.name_ = "diagonal-perturbed " + describe_spec(spec) + " c=" + num(pert);
  c.scalar_ = std::make_shared<const ConformalSpec>(std::move(spec));
  c.perturb_ = pert;
  return c;
}

MetricChart make_custom(int m, MetricChart::MatrixFn h, std::string name) {
  if (m < 1) throw DomainError("metric dimension must be >= 1");
  if (!h) throw DomainError("custom metric needs a callable");
  MetricChart c;
  c.m_ = m;
  c.family_ = MetricFamily::custom;
  c.name_ = std::move(name);
  c.custom_ = std::move(h);
  return c;
}

namespace metrics {

ConformalSpec example1(double alpha) { return {1.0, {1.0, 1.0}, {2, 2}, alpha}; }
ConformalSpec example2(double ell) { return {1.0, {0.0, 1.0}, {0, 1}, -ell}; }
ConformalSpec example3(double alpha) { return {1.0, {1.0, 1.0}, {2, 4}, alpha}; }
ConformalSpec example4(int m, double alpha) {
  if (m < 1) throw DomainError("dimension must be >= 1");
  return {1.0, std::vector<double>(m, 1.0), std::vector<int>(m, 2), alpha};
}

}  // namespace metrics

namespace {

// H_ij = c tanh(D)(1 − δ_ij)/m; returns tanh(D) and fills sech²(D)·∂D/∂u_k.
double perturbation(const Eigen::VectorXd& u, Eigen::VectorXd* dtanh) {
  const double mean = u.mean();
  const Eigen::VectorXd dev = u.array() - mean;
  const double D = dev.squaredNorm();
  const double th = std::tanh(D);
  if (dtanh) *dtanh = (1.0 - th * th) * 2.0 * dev;
  return th;
}

}  // namespace

Eigen::MatrixXd MetricChart::h(const Eigen::VectorXd& u) const {
  require_dim(u, m_);
  switch (family_) {
    case MetricFamily::conformal:
      return scalar_->value(u) * Eigen::MatrixXd::Identity(m_, m_);
    case MetricFamily::diagonal_perturbed: {
      const double th = perturbation(u, nullptr);
      Eigen::MatrixXd off = Eigen::MatrixXd::Constant(m_, m_, perturb_ * th / m_);
      off.diagonal().setOnes();
      return scalar_->value(u) * off;
    }
    case MetricFamily::custom: {
      Eigen::MatrixXd out = custom_(u);
      if (out.rows() != m_ || out.cols() != m_) throw DomainError("custom metric returned wrong shape");
      return out;
    }
  }
  return {};
}

Eigen::MatrixXd MetricChart::dh(const Eigen::VectorXd& u, int k) const {
  require_dim(u, m_);
  if (k < 0 || k >= m_) throw DomainError("derivative index out of range");
  switch (family_) {
    case MetricFamily::conformal:
      return scalar_->gradient(u)[k] * Eigen::MatrixXd::Identity(m_, m_);
    case MetricFamily::diagonal_perturbed: {
      Eigen::VectorXd dth;
      const double th = perturbation(u, &dth);
      Eigen::MatrixXd base = Eigen::MatrixXd::Constant(m_, m_, perturb_ * th / m_);
      base.diagonal().setOnes();
      Eigen::MatrixXd dH = Eigen::MatrixXd::Constant(m_, m_, perturb_ * dth[k] / m_);
      dH.diagonal().setZero();
      return scalar_->gradient(u)[k] * base + scalar_->value(u) * dH;
    }
    case MetricFamily::custom: {
      constexpr double step = 1e-4;
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
      e[k] = step;
      return (-custom_(u + 2.0 * e) + 8.0 * custom_(u + e) - 8.0 * custom_(u - e) +
              custom_(u - 2.0 * e)) /
             (12.0 * step);
    }
  }
  return {};
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& h) {
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  const bool ok = llt.info() == Eigen::Success && llt.rcond() > 1e-14;
  if (!ok) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double lo = ev.cwiseAbs().minCoeff(), hi = ev.cwiseAbs().maxCoeff();
    const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    throw LinearSolveError("metric is singular or not positive definite (condition estimate " +
                               num(cond) + ")",
                           cond);
  }
  return llt;
}

}  // namespace

ChristoffelValue christoffel(const MetricChart& chart, const Eigen::VectorXd& u) {
  const int m = chart.dim();
  const auto llt = factor(chart.h(u));
  std::vector<Eigen::MatrixXd> d(m);
  for (int k = 0; k < m; ++k) d[k] = chart.dh(u, k);

  ChristoffelValue out;
  out.u = u;
  out.m = m;
  out.gamma.assign(static_cast<std::size_t>(m) * m * m, 0.0);
  Eigen::VectorXd rhs(m);
  for (int j = 0; j < m; ++j) {
    for (int k = j; k < m; ++k) {
      for (int l = 0; l < m; ++l) rhs[l] = 0.5 * (d[j](k, l) + d[k](j, l) - d[l](k, j));
      const Eigen::VectorXd g = llt.solve(rhs);
      for (int i = 0; i < m; ++i) {
        out.gamma[(i * m + j) * m + k] = g[i];
        out.gamma[(i * m + k) * m + j] = g[i];
      }
    }
  }
  return out;
}

Eigen::VectorXd contracted_christoffel(const MetricChart& chart, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& a) {
  const int m = chart.dim();
  require_dim(a, m);
  const auto llt = factor(chart.h(u));
  Eigen::MatrixXd directional = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd quad(m);
  for (int l = 0; l < m; ++l) {
    const Eigen::MatrixXd dl = chart.dh(u, l);
    directional += a[l] * dl;
    quad[l] = a.dot(dl * a);
  }
  return llt.solve(directional * a - 0.5 * quad);
}

DistinguishedLine check_self_coherence(const MetricChart& chart, const Eigen::VectorXd& a,
                                       double t_lo, double t_hi, int samples) {
  require_dim(a, chart.dim());
  if (samples < 16) throw DomainError("self-coherence check needs at least 16 samples");
  const double a2 = a.squaredNorm();
  if (!(a2 > 0.0)) throw DomainError("direction must be non-zero");
  if (!(t_hi > t_lo)) throw DomainError("t range must satisfy lo < hi");

  DistinguishedLine out;
  out.a = a;
  out.samples.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    const double t = t_lo + (t_hi - t_lo) * s / (samples - 1);
    Eigen::VectorXd c;
    try {
      c = contracted_christoffel(chart, t * a, a);
    } catch (const LinearSolveError& e) {
      throw LinearSolveError(std::string(e.what()) + " at t=" + fmt17(t), e.condition_estimate());
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at t=" + fmt17(t));
    }
    const double f = a.dot(c) / a2;
    const double res = (c - f * a).cwiseAbs().maxCoeff();
    out.samples.push_back({t, f, res});
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

namespace {

// Extent of {t : t·a inside the chart domain} around 0, found by outward marching and bisection.
std::pair<double, double> line_domain(const MetricChart& chart, const Eigen::VectorXd& a) {
  const ConformalSpec* spec = chart.conformal_factor();
  auto inside = [&](double t) {
    if (spec == nullptr) return true;
    const Eigen::VectorXd u = t * a;
    double b = spec->c0;
    for (int i = 0; i < spec->dim(); ++i) b += spec->coef[i] * ipow(u[i], spec->power[i]);
    return b > 0.0;
  };
  if (!inside(0.0)) throw DomainError("line origin lies outside the chart domain");
  auto edge = [&](double dir) {
    double prev = 0.0;
    for (double t = 1e-3; t <= kChartBound; t *= 2.0) {
      if (!inside(dir * t)) {
        double lo = prev, hi = t;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          (inside(dir * mid) ? lo : hi) = mid;
        }
        return dir * hi;
      }
      prev = t;
    }
    return dir * std::numeric_limits<double>::infinity();
  };
  return {edge(-1.0), edge(1.0)};
}

}  // namespace

ScalarFunction line_function(const MetricChart& chart, const Eigen::VectorXd& a) {
  require_dim(a, chart.dim());
  const double a2 = a.squaredNorm();
  if (!(a2 > 0.0)) throw DomainError("direction must be non-zero");
  const auto [lo, hi] = line_domain(chart, a);
  Eigen::VectorXd dir = a;
  if (chart.family() == MetricFamily::conformal) {
    // Γ for φδ gives Σ a_i c_i = ½|a|² a·∇ln φ
    return make_scalar(
        [phi = *chart.conformal_factor(), dir](double t) {
          const Eigen::VectorXd u = t * dir;
          return 0.5 * dir.dot(phi.gradient(u)) / phi.value(u);
        },
        "line(" + chart.describe() + ")", lo, hi);
  }
  return make_scalar(
      [chart, dir, a2](double t) { return dir.dot(contracted_christoffel(chart, t * dir, dir)) / a2; },
      "line(" + chart.describe() + ")", lo, hi);
}

GeodesicPath geodesic_full(const MetricChart& chart, const Eigen::VectorXd& u0,
                           const Eigen::VectorXd& v0, double s_max, double tol, int samples) {
  const int m = chart.dim();
  require_dim(u0, m);
  require_dim(v0, m);
  if (!(v0.squaredNorm() > 0.0)) throw DomainError("initial velocity must be non-zero");
  if (!(s_max > 0.0)) throw DomainError("s_max must be positive");
  if (samples < 1) throw DomainError("samples must be >= 1");

  using State = std::vector<double>;
  auto rhs = [&chart, m](double, const State& y, State& dy) {
    const Eigen::Map<const Eigen::VectorXd> u(y.data(), m), v(y.data() + m, m);
    const Eigen::VectorXd acc = -contracted_christoffel(chart, u, v);
    for (int i = 0; i < m; ++i) {
      dy[i] = y[m + i];
      dy[m + i] = acc[i];
    }
  };
  State y0(2 * m);
  for (int i = 0; i < m; ++i) {
    y0[i] = u0[i];
    y0[m + i] = v0[i];
  }

  GeodesicPath path;
  path.speed = v0.dot(chart.h(u0) * v0);
  auto record = [&](double s, const State& y) {
    GeodesicSample smp{s, Eigen::VectorXd(m), Eigen::VectorXd(m)};
    for (int i = 0; i < m; ++i) {
      smp.u[i] = y[i];
      smp.du[i] = y[m + i];
    }
    const double sp = smp.du.dot(chart.h(smp.u) * smp.du);
    path.max_speed_drift = std::max(path.max_speed_drift, std::abs(sp - path.speed) / path.speed);
    path.samples.push_back(std::move(smp));
    path.s_end = s;
  };
  record(0.0, y0);

  Dopri5 solver(rhs, 0.0, y0, OdeTolerance{tol, tol});
  auto out_of_chart = [m](double, const State& y) {
    for (int i = 0; i < m; ++i) {
      if (!(std::abs(y[i]) <= kChartBound)) return true;
    }
    return false;
  };
  for (int k = 1; k <= samples; ++k) {
    const double s = s_max * k / samples;
    try {
      if (solver.advance_to(s, out_of_chart)) {
        path.truncated = true;
        break;
      }
    } catch (const Error&) {
      // left the chart domain or stepped into a singularity
      path.truncated = true;
      break;
    }
    record(s, solver.state());
  }
  return path;
}

GeodesicPath geodesic_reduced(const ScalarFunction& f, double xi_hat, double s_max, double tol,
                              int samples, double u_init) {
  if (xi_hat == 0.0 || !std::isfinite(xi_hat)) throw DomainError("xi_hat must be non-zero");
  if (!(s_max > 0.0)) throw DomainError("s_max must be positive");
  if (!f.contains(u_init)) throw DomainError("initial value outside the domain of f");
  auto rhs = [&f](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    if (!f.contains(y[0])) throw DomainError("reduced geodesic left the domain of f");
    dy[0] = y[1];
    dy[1] = -f(y[0]) * y[1] * y[1];
  };
  GeodesicPath path;
  path.speed = xi_hat * xi_hat;
  auto record = [&](double s, const std::array<double, 2>& y) {
    path.samples.push_back({s, Eigen::VectorXd::Constant(1, y[0]), Eigen::VectorXd::Constant(1, y[1])});
    path.s_end = s;
  };
  const std::array<double, 2> y0 = {u_init, xi_hat};
  record(0.0, y0);
  Dopri5 solver(rhs, 0.0, y0, OdeTolerance{tol, tol});
  auto bound = [](double, const std::array<double, 2>& y) { return !(std::abs(y[0]) <= kChartBound); };
  for (int k = 1; k <= samples; ++k) {
    const double s = s_max * k / samples;
    try {
      if (solver.advance_to(s, bound)) {
        path.truncated = true;
        break;
      }
    } catch (const Error&) {
      path.truncated = true;
      break;
    }
    record(s, solver.state());
  }
  return path;
}

double unit_rate(const MetricChart& chart, const Eigen::VectorXd& u, const Eigen::VectorXd& a) {
  const double q = a.dot(chart.h(u) * a);
  if (!(q > 0.0)) throw DomainError("direction has non-positive length");
  return 1.0 / std::sqrt(q);
}

double scalar_curvature(const MetricChart& chart, const Eigen::VectorXd& u) {
  if (chart.family() != MetricFamily::conformal || chart.dim() != 2) {
    throw DomainError("curvature is implemented for 2-D conformal charts only");
  }
  const ConformalSpec& s = *chart.conformal_factor();
  return -s.laplacian_log(u) / s.value(u);
}

double gaussian_curvature(const MetricChart& chart, const Eigen::VectorXd& u) {
  return 0.5 * scalar_curvature(chart, u);
}

std::string path_csv(const GeodesicPath& path) {
  std::string out = "s";
  const int m = path.samples.empty() ? 0 : static_cast<int>(path.samples.front().u.size());
  for (int i = 1; i <= m; ++i) out += ",u" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",du" + std::to_string(i);
  out += '\n';
  for (const auto& smp : path.samples) {
    out += fmt17(smp.s);
    for (int i = 0; i < m; ++i) out += ',' + fmt17(smp.u[i]);
    for (int i = 0; i < m; ++i) out += ',' + fmt17(smp.du[i]);
    out += '\n';
  }
  return out;
}

}  // namespace cyclicwave
