// cyclicwave: batch driver for stability charts, geodesics, the divergence test, blow-up
// certificates and torus simulations.
//
// Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 no blow-up certified,
// 5 direction is not a distinguished geodesic. Every non-zero exit writes one JSON line
// {"error": kind, "message": ...} to stderr.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cyclicwave/blowup.hpp"
#include "cyclicwave/errors.hpp"
#include "cyclicwave/floquet.hpp"
#include "cyclicwave/geometry.hpp"
#include "cyclicwave/io.hpp"
#include "cyclicwave/pdesim.hpp"
#include "cyclicwave/transform.hpp"
#include "json.hpp"

namespace cw = cyclicwave;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kNumerical = 3, kNoBlowup = 4, kNotDistinguished = 5 };

struct CliFailure : std::runtime_error {
  CliFailure(int code, std::string kind, const std::string& what)
      : std::runtime_error(what), code(code), kind(std::move(kind)) {}
  int code;
  std::string kind;
};

int report(int code, const std::string& kind, const std::string& message) {
  std::cerr << ojson{{"error", kind}, {"code", code}, {"message", message}}.dump() << '\n';
  return code;
}

// Outputs are collected and written together once the command has succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string path, std::string content) { files.emplace_back(std::move(path), std::move(content)); }
  void commit() const {
    for (const auto& [path, content] : files) cw::write_file_atomic(path, content);
  }
};

std::map<std::string, double> parse_params(const std::string& text, const std::string& what) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw cw::DomainError(what + ": expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    try {
      std::size_t used = 0;
      const double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(key);
      out[key] = v;
    } catch (const std::logic_error&) {
      throw cw::DomainError(what + ": '" + item + "' is not a number");
    }
  }
  return out;
}

double take(std::map<std::string, double>& p, const std::string& key, std::optional<double> fallback,
            const std::string& what) {
  const auto it = p.find(key);
  if (it == p.end()) {
    if (!fallback) throw cw::DomainError(what + ": missing parameter '" + key + "'");
    return *fallback;
  }
  const double v = it->second;
  p.erase(it);
  return v;
}

void no_leftovers(const std::map<std::string, double>& p, const std::string& what) {
  if (!p.empty()) throw cw::DomainError(what + ": unknown parameter '" + p.begin()->first + "'");
}

int as_int(double v, const std::string& what) {
  if (v != std::floor(v)) throw cw::DomainError(what + " must be an integer");
  return static_cast<int>(v);
}

// family[:key=value,...]
//   conformal:alpha=A[,m=M]   (1+|u|²)^A on ℝ^M, M = 2 by default
//   example2:ell=L            (1+v)^(−L) on v > −1
//   example3:alpha=A          (1+u²+v⁴)^A
//   perturbed:alpha=A,c=C     (1+u²+v²)^A (δ + off-diagonal bump vanishing on the diagonal)
//   asymmetric:alpha=A,beta=B (1+u²+Bv)^A
cw::MetricChart parse_metric(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  auto p = parse_params(colon == std::string::npos ? "" : text.substr(colon + 1), "--metric " + family);
  const std::string what = "--metric " + family;
  std::optional<cw::MetricChart> chart;
  if (family == "conformal") {
    const double alpha = take(p, "alpha", std::nullopt, what);
    const int m = as_int(take(p, "m", 2.0, what), what + " m");
    if (m < 1) throw cw::DomainError(what + ": m must be >= 1");
    chart = cw::make_conformal(m == 2 ? cw::metrics::example1(alpha) : cw::metrics::example4(m, alpha));
  } else if (family == "example2") {
    chart = cw::make_conformal(cw::metrics::example2(take(p, "ell", std::nullopt, what)));
  } else if (family == "example3") {
    chart = cw::make_conformal(cw::metrics::example3(take(p, "alpha", std::nullopt, what)));
  } else if (family == "perturbed") {
    const double alpha = take(p, "alpha", std::nullopt, what);
    chart = cw::make_diagonal_perturbed(cw::metrics::example1(alpha), take(p, "c", std::nullopt, what));
  } else if (family == "asymmetric") {
    cw::ConformalSpec s;
    s.c0 = 1.0;
    s.coef = {1.0, take(p, "beta", 0.5, what)};
    s.power = {2, 1};
    s.alpha = take(p, "alpha", std::nullopt, what);
    chart = cw::make_conformal(s);
  } else {
    throw cw::DomainError("unknown metric family '" + family + "'");
  }
  no_leftovers(p, what);
  return *chart;
}

Eigen::VectorXd parse_direction(const std::string& text, int dim) {
  if (text.empty()) return Eigen::VectorXd::Ones(dim);
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw cw::DomainError("--direction: '" + item + "' is not a number");
    }
  }
  if (static_cast<int>(v.size()) != dim) {
    throw cw::DomainError("--direction needs " + std::to_string(dim) + " components");
  }
  Eigen::VectorXd a = Eigen::Map<Eigen::VectorXd>(v.data(), dim);
  if (!(a.norm() > 0.0)) throw cw::DomainError("--direction must be non-zero");
  return a;
}

struct FParams {
  std::string family = "example1";
  double alpha = -1.0;
  double ell = 4.0;
  int m = 3;
  double p = 2.0;
};

cw::ScalarFunction make_f(const FParams& fp) {
  namespace fam = cw::families;
  if (fp.family == "zero") return fam::zero();
  if (fp.family == "example1") return fam::example1(fp.alpha);
  if (fp.family == "example2") {
    if (!(fp.ell > 0.0)) throw cw::DomainError("--ell must be positive");
    return fam::example2(fp.ell);
  }
  if (fp.family == "example3u") return fam::example3_u_axis(fp.alpha);
  if (fp.family == "example3v") return fam::example3_v_axis(fp.alpha);
  if (fp.family == "example4") {
    if (fp.m < 1) throw cw::DomainError("--m must be >= 1");
    return fam::example4(fp.m, fp.alpha);
  }
  if (fp.family == "power-tail") return fam::power_tail(fp.p);
  throw cw::DomainError("unknown --f family '" + fp.family + "'");
}

void add_f_options(CLI::App* sub, FParams& fp) {
  sub->add_option("--f", fp.family, "zero|example1|example2|example3u|example3v|example4|power-tail")
      ->capture_default_str();
  sub->add_option("--alpha", fp.alpha, "alpha for example1/3/4")->capture_default_str();
  sub->add_option("--ell", fp.ell, "ell for example2")->capture_default_str();
  sub->add_option("--m", fp.m, "target dimension for example4")->capture_default_str();
  sub->add_option("--p", fp.p, "exponent for power-tail")->capture_default_str();
}

struct Coefficient {
  double epsilon = 0.5;
  bool constant = false;
  int n = 3;

  void validate() const {
    if (n < 1) throw cw::DomainError("--n must be >= 1");
    if (!constant && !(epsilon > 0.0 && epsilon < 1.0)) {
      throw cw::DomainError("--epsilon must lie in (0, 1), got " + cw::fmt17(epsilon));
    }
  }
  cw::PeriodicCoefficient make() const {
    validate();
    return constant ? cw::make_builtin(cw::Builtin::constant, 1.0)
                    : cw::make_builtin(cw::Builtin::sqrt_sin, epsilon);
  }
  ojson json() const {
    return constant ? ojson{{"b", "constant"}, {"n", n}} : ojson{{"b", "sqrt_sin"}, {"epsilon", epsilon}, {"n", n}};
  }
};

void add_coefficient_options(CLI::App* sub, Coefficient& c) {
  sub->add_option("--epsilon", c.epsilon, "b(t) = sqrt(1 + epsilon sin 2 pi t), epsilon in (0,1)")
      ->capture_default_str();
  sub->add_flag("--constant-b", c.constant, "use b = 1 instead");
  sub->add_option("--n", c.n, "spatial dimension in the damping and Hill potential")->capture_default_str();
}

std::string sibling_json(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

// ---------------------------------------------------------------- stability-chart

struct ChartArgs {
  Coefficient coeff;
  double lambda_min = 0.1;
  double lambda_max = 60.0;
  int grid = 4000;
  double tol = 1e-12;
  std::string out = "stability_chart.csv";
};

int run_chart(const ChartArgs& a, std::uint64_t seed) {
  const auto b = a.coeff.make();
  if (!(a.lambda_min >= 0.0 && a.lambda_max > a.lambda_min)) {
    throw cw::DomainError("need 0 <= --lambda-min < --lambda-max");
  }
  if (a.grid < 2) throw cw::DomainError("--grid must be >= 2");
  const auto pot = cw::hill_potential(b, a.coeff.n);
  const auto scan = cw::scan_stability(pot, a.lambda_min, a.lambda_max, a.grid, a.tol);
  ojson side;
  side["coefficient"] = a.coeff.json();
  side["lambda_min"] = a.lambda_min;
  side["lambda_max"] = a.lambda_max;
  side["grid"] = a.grid;
  side["tol"] = a.tol;
  side["seed"] = seed;
  auto ivs = ojson::array();
  for (const auto& iv : scan.intervals) {
    ivs.push_back({{"lambda_lo", iv.lambda_lo}, {"lambda_hi", iv.lambda_hi},
                   {"max_abs_trace", iv.max_abs_trace}, {"witness_lambda", iv.witness_lambda}});
  }
  side["intervals"] = std::move(ivs);
  Outputs out;
  out.add(a.out, cw::stability_chart_csv(scan.chart));
  out.add(sibling_json(a.out), side.dump(2) + "\n");
  out.commit();
  std::cout << "intervals: " << scan.intervals.size() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- geodesic

struct GeodesicArgs {
  std::string metric = "conformal:alpha=-1";
  std::string direction;
  std::string start;
  double s_max = 3.0;
  int samples = 300;
  double tol = 1e-10;
  std::string out = "geodesic.csv";
};

int run_geodesic(const GeodesicArgs& a) {
  const auto chart = parse_metric(a.metric);
  const Eigen::VectorXd dir = parse_direction(a.direction, chart.dim());
  const Eigen::VectorXd u0 = a.start.empty() ? Eigen::VectorXd::Zero(chart.dim()) : parse_direction(a.start, chart.dim());
  if (!(a.s_max > 0.0)) throw cw::DomainError("--s-max must be positive");
  if (a.samples < 1) throw cw::DomainError("--samples must be >= 1");
  const Eigen::VectorXd v0 = dir * cw::unit_rate(chart, u0, dir);
  const auto path = cw::geodesic_full(chart, u0, v0, a.s_max, a.tol, a.samples);
  Outputs out;
  out.add(a.out, cw::path_csv(path));
  out.commit();
  std::cout << "samples: " << path.samples.size() << " s_end: " << cw::fmt17(path.s_end)
            << (path.truncated ? " (truncated)" : "") << "\n";
  return kOk;
}

// ---------------------------------------------------------------- noc

struct NocArgs {
  FParams f;
  std::string metric;
  std::string direction;
  double s_max = 1e6;
  double margin = 0.1;
  std::string out;
};

int run_noc(const NocArgs& a) {
  if (!(a.s_max >= 1e4)) throw cw::DomainError("--s-max must be >= 1e4");
  if (!(a.margin > 0.0 && a.margin < 1.0)) throw cw::DomainError("--margin must lie in (0, 1)");
  cw::ScalarFunction f;
  if (!a.metric.empty()) {
    const auto chart = parse_metric(a.metric);
    f = cw::line_function(chart, parse_direction(a.direction, chart.dim()));
  } else {
    f = make_f(a.f);
  }
  const auto v = cw::noc_check(f, a.s_max, a.margin);
  const std::string text = cw::noc_json(v) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    Outputs out;
    out.add(a.out, text);
    out.commit();
    std::cout << "holds: " << cw::to_string(v.holds) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  std::string mode = "uniform";
  Coefficient coeff;
  FParams f{"zero"};
  double t_end = 20.0;
  double u0 = 0.0;
  double u1 = 1.0;
  double dt_out = 1.0 / 64.0;
  int points = 256;
  double length = 1.0;
  double dt = 0.0;
  double u0_amp = 0.0;
  double u1_amp = 0.0;
  int k = 1;
  double snapshot_interval = 0.0;
  std::string out = "sim";
};

int run_simulate(const SimArgs& a, std::uint64_t seed) {
  const auto b = a.coeff.make();
  const auto f = make_f(a.f);
  if (!(a.t_end >= 0.0)) throw cw::DomainError("--t-end must be >= 0");
  Outputs out;
  if (a.mode == "uniform") {
    const auto tp = cw::build_transform(f);
    const auto traj = cw::evolve_uniform(b, a.coeff.n, f, a.u0, a.u1, a.t_end, a.dt_out);
    std::ostringstream csv;
    csv << "t,u,u_t,v\n";
    for (const auto& s : traj.samples) {
      csv << cw::fmt17(s.t) << ',' << cw::fmt17(s.u) << ',' << cw::fmt17(s.u_t) << ',' << cw::fmt17(tp.G(s.u)) << '\n';
    }
    std::filesystem::path dir(a.out);
    out.add((dir / "uniform.csv").string(), csv.str());
    ojson m{{"mode", "uniform"}, {"coefficient", a.coeff.json()}, {"f", f.name},
            {"truncated", traj.truncated}, {"t_stop", traj.t_stop}, {"seed", seed}};
    out.add((dir / "manifest.json").string(), m.dump(2) + "\n");
    out.commit();
    std::cout << "t_stop: " << cw::fmt17(traj.t_stop) << (traj.truncated ? " (truncated)" : "") << "\n";
    return kOk;
  }
  if (a.mode != "linear" && a.mode != "nonlinear") throw cw::DomainError("--mode must be uniform, linear or nonlinear");
  cw::GridSpec g;
  g.n = 1;
  g.L = a.length;
  g.points = a.points;
  g.t_end = a.t_end;
  g.dt = a.dt > 0.0 ? a.dt : 0.45 * (a.length / a.points) / b.max_value(4096);
  g.validate();
  const double kx = 2.0 * std::numbers::pi * a.k / a.length;
  const auto u0 = cw::sample(g, [&](const Eigen::VectorXd& x) { return a.u0 + a.u0_amp * std::cos(kx * x[0]); });
  const auto u1 = cw::sample(g, [&](const Eigen::VectorXd& x) { return a.u1 + a.u1_amp * std::cos(kx * x[0]); });
  cw::SimOptions opt;
  opt.snapshot_interval = a.snapshot_interval;
  cw::SimResult r;
  std::filesystem::path dir(a.out);
  try {
    if (a.mode == "linear") {
      r = cw::evolve_linear(b, a.coeff.n, g, u0, u1, opt);
    } else {
      r = cw::evolve_nonlinear(b, a.coeff.n, f, g, u0, u1, cw::build_transform(f), opt);
    }
  } catch (const cw::DomainError& e) {
    if (std::string(e.what()).rfind("CFL violation", 0) != 0) throw;
    cw::SimResult bad;
    bad.termination = cw::Termination::cfl_violation;
    bad.note = e.what();
    out.add((dir / "manifest.json").string(), cw::manifest_json(g, bad) + "\n");
    out.commit();
    throw;
  }
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", i);
    out.add((dir / name).string(), cw::snapshot_csv(g, r.snapshots[i]));
  }
  out.add((dir / "manifest.json").string(), cw::manifest_json(g, r) + "\n");
  out.commit();
  std::cout << "termination: " << cw::to_string(r.termination) << " t_final: " << cw::fmt17(r.t_final) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- blowup-demo

struct DemoArgs {
  std::string metric = "conformal:alpha=-2";
  std::string direction;
  Coefficient coeff;
  double delta = 1e-3;
  std::string simulate = "no";
  double lambda_min = 0.1;
  double lambda_max = 60.0;
  int grid = 4000;
  int m_max = 400;
  int points = 1024;
  std::string out = "blowup";
};

int run_demo(const DemoArgs& a, std::uint64_t seed) {
  if (a.simulate != "yes" && a.simulate != "no") throw cw::DomainError("--simulate must be yes or no");
  if (!(a.delta > 0.0)) throw cw::DomainError("--delta must be positive");
  if (a.m_max < 1) throw cw::DomainError("--m-max must be >= 1");
  const auto b = a.coeff.make();
  const auto chart = parse_metric(a.metric);
  const Eigen::VectorXd dir = parse_direction(a.direction, chart.dim());

  const auto f = cw::line_function(chart, dir);
  const double t_lo = std::max(-2.0, std::isfinite(f.lo) ? 0.5 * f.lo : -2.0);
  const double t_hi = std::min(2.0, std::isfinite(f.hi) ? 0.5 * f.hi : 2.0);
  const auto line = cw::check_self_coherence(chart, dir, t_lo, t_hi, 64);
  if (line.max_residual > 1e-6) {
    throw CliFailure(kNotDistinguished, "not_distinguished",
                     "direction is not a distinguished geodesic (residual " + cw::fmt17(line.max_residual) + ")");
  }
  const auto verdict = cw::noc_check(f);
  if (verdict.holds != cw::Holds::no) {
    throw CliFailure(kNoBlowup, "no_blowup",
                     "no blow-up certified: divergence condition " + cw::to_string(verdict.holds) +
                         " (p_hat_fwd " + cw::fmt17(verdict.p_hat_fwd) + ", p_hat_bwd " +
                         cw::fmt17(verdict.p_hat_bwd) + ")");
  }
  const auto tp = cw::build_transform(f);
  const auto pot = cw::hill_potential(b, a.coeff.n);
  const auto intervals = cw::scan_instability(pot, a.lambda_min, a.lambda_max, a.grid);
  if (intervals.empty()) throw CliFailure(kNoBlowup, "no_blowup", "no instability interval in the lambda range");
  const auto good = cw::find_good_lambda(intervals, pot);

  cw::CertifySearch search;
  search.lambdas = {good.lambda};
  search.M_max = a.m_max;
  const auto cert = cw::certify_blowup(search, tp, b, a.coeff.n, a.delta);

  Outputs out;
  std::filesystem::path dir_out(a.out);
  auto cj = ojson::parse(cw::certificate_json(cert));
  cj["metric"] = a.metric;
  cj["coefficient"] = a.coeff.json();
  cj["delta"] = a.delta;
  cj["seed"] = seed;
  out.add((dir_out / "certificate.json").string(), cj.dump(2) + "\n");

  if (a.simulate == "yes") {
    // plane wave on the 1-D torus whose period fits one wavelength of y
    const double y = std::sqrt(cert.plan.lambda);
    const double amp = cert.plan.amplitude();
    cw::GridSpec g;
    g.n = 1;
    g.L = 2.0 * std::numbers::pi / y;
    g.points = a.points;
    g.dt = 0.45 * g.spacing() / b.max_value(4096);
    g.t_end = 1.5 * cert.t_star.value_or(cert.plan.M);
    const auto u0 = cw::sample(g, [&](const Eigen::VectorXd&) { return amp; });
    const double lift = cert.plan.A * amp * std::exp(-tp.Phi(amp));
    const auto u1 = cw::sample(g, [&](const Eigen::VectorXd& x) { return lift * std::cos(y * x[0]); });
    const auto r = cw::evolve_nonlinear(b, a.coeff.n, f, g, u0, u1, tp);
    out.add((dir_out / "manifest.json").string(), cw::manifest_json(g, r) + "\n");
    out.add((dir_out / "final_snapshot.csv").string(), cw::snapshot_csv(g, r.snapshots.back()));
    std::cout << "simulation: " << cw::to_string(r.termination) << " at t=" << cw::fmt17(r.t_final) << "\n";
  }
  out.commit();
  std::cout << "certificate: M=" << cert.plan.M << " lambda=" << cw::fmt17(cert.plan.lambda)
            << " t_star=" << (cert.t_star ? cw::fmt17(*cert.t_star) : "none")
            << " smallness=" << cw::fmt17(cert.smallness) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave maps on cyclic spacetimes: Floquet charts, geodesics, blow-up certificates"};
  app.set_config("--config", "", "TOML/INI configuration file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed recorded in every output")->capture_default_str();

  ChartArgs chart;
  auto* c = app.add_subcommand("stability-chart", "trace of the monodromy over a lambda grid");
  add_coefficient_options(c, chart.coeff);
  c->add_option("--lambda-min", chart.lambda_min)->capture_default_str();
  c->add_option("--lambda-max", chart.lambda_max)->capture_default_str();
  c->add_option("--grid", chart.grid)->capture_default_str();
  c->add_option("--tol", chart.tol)->capture_default_str();
  c->add_option("--out", chart.out, "CSV path; the interval list goes next to it as .json")->capture_default_str();

  GeodesicArgs geo;
  auto* g = app.add_subcommand("geodesic", "unit-speed geodesic from the origin along a direction");
  g->add_option("--metric", geo.metric)->capture_default_str();
  g->add_option("--direction", geo.direction, "comma separated, default all ones");
  g->add_option("--start", geo.start, "comma separated start point, default origin");
  g->add_option("--s-max", geo.s_max)->capture_default_str();
  g->add_option("--samples", geo.samples)->capture_default_str();
  g->add_option("--tol", geo.tol)->capture_default_str();
  g->add_option("--out", geo.out)->capture_default_str();

  NocArgs noc;
  auto* n = app.add_subcommand("noc", "divergence of both improper integrals of exp(int f)");
  add_f_options(n, noc.f);
  n->add_option("--metric", noc.metric, "take f from a distinguished line of this metric");
  n->add_option("--direction", noc.direction);
  n->add_option("--s-max", noc.s_max)->capture_default_str();
  n->add_option("--margin", noc.margin)->capture_default_str();
  n->add_option("--out", noc.out, "JSON path (stdout when omitted)");

  DemoArgs demo;
  auto* d = app.add_subcommand("blowup-demo", "metric to certificate, optionally simulated");
  d->add_option("--metric", demo.metric)->capture_default_str();
  d->add_option("--direction", demo.direction);
  add_coefficient_options(d, demo.coeff);
  d->add_option("--delta", demo.delta)->capture_default_str();
  d->add_option("--simulate", demo.simulate, "yes|no")->capture_default_str();
  d->add_option("--lambda-min", demo.lambda_min)->capture_default_str();
  d->add_option("--lambda-max", demo.lambda_max)->capture_default_str();
  d->add_option("--grid", demo.grid)->capture_default_str();
  d->add_option("--m-max", demo.m_max)->capture_default_str();
  d->add_option("--points", demo.points)->capture_default_str();
  d->add_option("--out", demo.out, "output directory")->capture_default_str();

  SimArgs sim;
  auto* s = app.add_subcommand("simulate", "uniform ODE or torus PDE evolution");
  s->add_option("--mode", sim.mode, "uniform|linear|nonlinear")->capture_default_str();
  add_coefficient_options(s, sim.coeff);
  add_f_options(s, sim.f);
  s->add_option("--t-end", sim.t_end)->capture_default_str();
  s->add_option("--u0", sim.u0, "uniform value, or the constant part of u0 on the torus")->capture_default_str();
  s->add_option("--u1", sim.u1, "uniform velocity, or the constant part of u1 on the torus")->capture_default_str();
  s->add_option("--dt-out", sim.dt_out)->capture_default_str();
  s->add_option("--points", sim.points)->capture_default_str();
  s->add_option("--length", sim.length)->capture_default_str();
  s->add_option("--dt", sim.dt, "0 picks 0.9 of the CFL limit")->capture_default_str();
  s->add_option("--u0-amp", sim.u0_amp, "u0 = u0 + u0_amp cos(2 pi k x / L)")->capture_default_str();
  s->add_option("--u1-amp", sim.u1_amp, "u1 = u1 + u1_amp cos(2 pi k x / L)")->capture_default_str();
  s->add_option("--k", sim.k)->capture_default_str();
  s->add_option("--snapshot-interval", sim.snapshot_interval)->capture_default_str();
  s->add_option("--out", sim.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(kInvalid, "validation", e.what());
  }

  try {
    if (c->parsed()) return run_chart(chart, seed);
    if (g->parsed()) return run_geodesic(geo);
    if (n->parsed()) return run_noc(noc);
    if (d->parsed()) return run_demo(demo, seed);
    if (s->parsed()) return run_simulate(sim, seed);
  } catch (const CliFailure& e) {
    return report(e.code, e.kind, e.what());
  } catch (const cw::NotApplicableError& e) {
    return report(kNoBlowup, "no_blowup", e.what());
  } catch (const cw::DomainError& e) {
    return report(kInvalid, "validation", e.what());
  } catch (const std::exception& e) {
    return report(kNumerical, "numerical", e.what());
  }
  return report(kInvalid, "validation", "no command given");
}
