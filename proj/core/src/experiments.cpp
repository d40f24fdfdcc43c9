#include "routhe/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "routhe/errors.hpp"
#include "routhe/fdms.hpp"
#include "routhe/forms.hpp"
#include "routhe/reduction.hpp"
#include "routhe/reference.hpp"
#include "routhe/symmetry.hpp"
#include "routhe/systems.hpp"

namespace routhe {

// -- configuration -----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x))
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + v + "'");
  return x;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (x < 0 || x != std::floor(x) || x > 1e9)
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

Vec parse_list(const std::string& key, const std::string& v) {
  Vec out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("config: '" + key + "' expects a comma-separated list");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const char* key, double ScenarioConfig::*field) {
      t[key] = [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_double(k, v);
      };
    };
    auto list = [&t](const char* key, Vec ScenarioConfig::*field) {
      t[key] = [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_list(k, v);
      };
    };
    t["scenario"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.scenario = trim(v); };
    num("m", &ScenarioConfig::m);
    num("J", &ScenarioConfig::inertia);
    num("alpha", &ScenarioConfig::alpha);
    num("beta", &ScenarioConfig::beta);
    num("nu", &ScenarioConfig::nu);
    num("mu2", &ScenarioConfig::mu2);
    num("c", &ScenarioConfig::c);
    num("kappa", &ScenarioConfig::kappa);
    num("h", &ScenarioConfig::h);
    num("t_end", &ScenarioConfig::t_end);
    num("r0", &ScenarioConfig::r0);
    num("eta0", &ScenarioConfig::eta0);
    num("rdot0", &ScenarioConfig::rdot0);
    num("etadot0", &ScenarioConfig::etadot0);
    num("seed_r0", &ScenarioConfig::seed_r0);
    num("seed_r1", &ScenarioConfig::seed_r1);
    num("solver_tol", &ScenarioConfig::solver_tol);
    num("oracle_tol", &ScenarioConfig::oracle_tol);
    num("convergence_t_end", &ScenarioConfig::convergence_t_end);
    list("tau0", &ScenarioConfig::tau0);
    list("tau1", &ScenarioConfig::tau1);
    list("seed_q0", &ScenarioConfig::seed_q0);
    list("seed_q1", &ScenarioConfig::seed_q1);
    list("h_list", &ScenarioConfig::h_list);
    t["N"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.steps = parse_count(k, v); };
    t["max_iter"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.max_iter = static_cast<int>(parse_count(k, v));
    };
    t["mu"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (trim(v) == "auto")
        c.mu.reset();
      else
        c.mu = parse_double(k, v);
    };
    t["parallel"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.parallel = parse_bool(k, v);
    };
    return t;
  }();
  return table;
}

}  // namespace

std::size_t ScenarioConfig::step_count() const {
  if (steps) return *steps;
  return static_cast<std::size_t>(std::llround(t_end / h));
}

double ScenarioConfig::momentum() const { return mu ? *mu : m * r0 * r0 * etadot0; }

void apply_setting(ScenarioConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("config: unknown key '" + key + "'");
  it->second(cfg, key, assignment.substr(eq + 1));
}

ScenarioConfig parse_config(std::istream& in, const std::string& origin) {
  ScenarioConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      apply_setting(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in, path);
}

void validate(const ScenarioConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(cfg.scenario == "central-potential" || cfg.scenario == "bar" || cfg.scenario == "synthetic-routh" ||
              cfg.scenario == "dissipative",
          "unknown scenario '" + cfg.scenario + "'");
  require(cfg.h > 0, "h must be positive");
  require(cfg.t_end >= 0, "t_end must be non-negative");
  if (!cfg.steps) {
    const double n = cfg.t_end / cfg.h;
    require(std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n), "t_end must be a multiple of h");
  }
  require(cfg.step_count() != 1, "a trajectory needs N >= 2 steps (or N = 0 for an empty run)");
  require(cfg.solver_tol > 0 && cfg.oracle_tol > 0, "tolerances must be positive");
  require(cfg.max_iter > 0, "max_iter must be positive");
  require(cfg.m > 0, "m must be positive");

  if (cfg.scenario == "central-potential") {
    require(cfg.r0 > 0 && cfg.seed_r0 > 0 && cfg.seed_r1 > 0, "radii must be positive");
    require(cfg.convergence_t_end > 0, "convergence_t_end must be positive");
    require(cfg.h_list.size() >= 4, "h_list needs at least three halvings");
    for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
      const double h = cfg.h_list[i];
      require(h > 0, "h_list entries must be positive");
      if (i > 0)
        require(std::abs(cfg.h_list[i - 1] - 2 * h) <= 1e-12 * cfg.h_list[i - 1], "h_list must halve at each entry");
      const double n = cfg.convergence_t_end / h;
      require(std::abs(n - std::round(n)) <= 1e-9 * n, "convergence_t_end must be a multiple of every h");
    }
  } else if (cfg.scenario == "bar") {
    require(cfg.inertia > 0, "J must be positive");
    require(cfg.tau0.size() == 2 && cfg.tau1.size() == 2, "tau0 and tau1 are (phi, y) pairs");
  } else {
    require(cfg.seed_q0.size() == 2 && cfg.seed_q1.size() == 2, "seed_q0 and seed_q1 are planar points");
  }
}

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

// -- central-potential pipelines -------------------------------------------------------

namespace {

systems::CentralParams central_params(const ScenarioConfig& cfg, double h) {
  systems::CentralParams p;
  p.alpha = cfg.alpha;
  p.beta = cfg.beta;
  p.m = cfg.m;
  p.h = h;
  p.mu = cfg.momentum();
  return p;
}

ReducedSystem central_reduction(const systems::CentralParams& p) {
  return reduce(systems::central_midpoint(p), translation_symmetry(2, 1), Vec{p.mu}, flat_connection(2, 1));
}

SolverConfig solver_config(const ScenarioConfig& cfg) {
  SolverConfig s;
  s.tol = cfg.solver_tol;
  s.max_iter = cfg.max_iter;
  return s;
}

struct Series {
  std::vector<Vec> states;
  std::optional<MethodFailure> failure;
};

std::string describe(const std::exception& e) {
  std::string msg = e.what();
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    msg += ": " + describe(inner);
  } catch (...) {
  }
  return msg;
}

/// r_0 = a, r_1 = b, then forced DEL steps until r_N.
Series mp_series(const DiscreteSystem& red, double a, double b, std::size_t n, const SolverConfig& s) {
  Series out;
  if (n == 0) return out;
  out.states = {{a}, {b}};
  for (std::size_t k = 2; k <= n; ++k) {
    try {
      out.states.push_back(step(red, out.states[k - 2], out.states[k - 1], s).q2);
    } catch (const Error& e) {
      out.failure = MethodFailure{"mp", k, describe(e)};
      break;
    }
  }
  return out;
}

Series rk4_series(const ContinuousReducedSystem& cont, const Vec& y0, double h, std::size_t n) {
  Series out;
  if (n == 0) return out;
  const OdeRhs f = [&cont](double, const Vec& y) { return cont.rhs(y); };
  out.states.push_back(y0);
  for (std::size_t k = 1; k <= n; ++k) {
    try {
      Vec y = rk4_step(f, static_cast<double>(k - 1) * h, out.states.back(), h);
      if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || !(y[0] > 0))
        throw DomainError("rk4: state left r > 0");
      out.states.push_back(std::move(y));
    } catch (const Error& e) {
      out.failure = MethodFailure{"rk4", k, describe(e)};
      break;
    }
  }
  return out;
}

Series oracle_series(const ContinuousReducedSystem& cont, const Vec& y0, double h, std::size_t n, double tol) {
  Series out;
  if (n == 0) return out;
  const OdeRhs f = [&cont](double, const Vec& y) { return cont.rhs(y); };
  AdaptiveOptions opt;
  opt.rtol = opt.atol = tol;
  try {
    const DenseTrajectory dense = adaptive_solve(f, y0, 0.0, static_cast<double>(n) * h, opt);
    for (std::size_t k = 0; k <= n; ++k) out.states.push_back(dense(static_cast<double>(k) * h));
  } catch (const Error& e) {
    out.failure = MethodFailure{"oracle", 0, describe(e)};
  }
  return out;
}

template <class F>
auto launch(bool parallel, F&& f) {
  return std::async(parallel ? std::launch::async : std::launch::deferred, std::forward<F>(f));
}

}  // namespace

CentralRun run_central(const ScenarioConfig& cfg) {
  validate(cfg);
  CentralRun out;
  out.mu = cfg.momentum();
  out.mu_consistency_defect = std::abs(cfg.m * cfg.r0 * cfg.r0 * cfg.etadot0 - out.mu);
  const std::size_t n = cfg.step_count();
  const double h = cfg.h;
  const auto p = central_params(cfg, h);
  const ContinuousReducedSystem cont = ContinuousReducedSystem::sextic(cfg.alpha, cfg.beta, cfg.m, out.mu);
  out.energy_exact = cont.energy(cfg.r0, cfg.rdot0);
  const ReducedSystem red = central_reduction(p);
  const SolverConfig s = solver_config(cfg);
  const Vec y0{cfg.r0, cfg.rdot0};

  auto mp = launch(cfg.parallel, [&] { return mp_series(red.reduced, cfg.seed_r0, cfg.seed_r1, n, s); });
  auto rk = launch(cfg.parallel, [&] { return rk4_series(cont, y0, h, n); });
  auto orc = launch(cfg.parallel, [&] { return oracle_series(cont, y0, h, n, cfg.oracle_tol); });
  const Series smp = mp.get(), srk = rk.get(), sor = orc.get();

  for (const Series* s_ : {&sor, &smp, &srk})
    if (s_->failure && (!out.failure || s_->failure->step < out.failure->step)) out.failure = s_->failure;
  const std::size_t rows = std::min({smp.states.size(), srk.states.size(), sor.states.size()});

  for (std::size_t k = 0; k < rows; ++k) {
    out.t.push_back(static_cast<double>(k) * h);
    out.r_mp.push_back(smp.states[k][0]);
    out.r_rk4.push_back(srk.states[k][0]);
    out.r_oracle.push_back(sor.states[k][0]);
    out.energy_rk4.push_back(cont.energy(srk.states[k][0], srk.states[k][1]));
    out.energy_oracle.push_back(cont.energy(sor.states[k][0], sor.states[k][1]));
  }
  // MP velocity: central difference, one-sided at the ends
  const auto& r = smp.states;
  for (std::size_t k = 0; k < rows; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 < r.size() ? k + 1 : k;
    const double v = hi > lo ? (r[hi][0] - r[lo][0]) / (static_cast<double>(hi - lo) * h) : 0.0;
    out.energy_mp.push_back(cont.energy(r[k][0], v));
  }
  return out;
}

EnergyStats energy_stats(const std::vector<double>& t, const std::vector<double>& e) {
  EnergyStats s;
  if (e.empty()) return s;
  const double n = static_cast<double>(e.size());
  s.mean = std::accumulate(e.begin(), e.end(), 0.0) / n;
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  s.amplitude = 0.5 * (*hi - *lo);
  s.end_minus_start = e.back() - e.front();
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    sxy += (t[k] - tm) * (e[k] - s.mean);
    sxx += (t[k] - tm) * (t[k] - tm);
  }
  if (sxx > 0) s.drift = sxy / sxx * (t.back() - t.front());
  return s;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
  const double n = static_cast<double>(h.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    mx += std::log(h[i]) / n;
    my += std::log(err[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sxy += (std::log(h[i]) - mx) * (std::log(err[i]) - my);
    sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

ConvergenceResult run_convergence(const ScenarioConfig& cfg) {
  validate(cfg);
  if (cfg.scenario != "central-potential") throw ConfigError("convergence: only the central-potential scenario");
  const double mu = cfg.momentum();
  const ContinuousReducedSystem cont = ContinuousReducedSystem::sextic(cfg.alpha, cfg.beta, cfg.m, mu);
  const OdeRhs f = [&cont](double, const Vec& y) { return cont.rhs(y); };
  const Vec y0{cfg.r0, cfg.rdot0};
  const double T = cfg.convergence_t_end;
  AdaptiveOptions opt;
  opt.rtol = opt.atol = cfg.oracle_tol;
  const DenseTrajectory oracle = adaptive_solve(f, y0, 0.0, T, opt);
  const double r_end = oracle(T)[0];
  const SolverConfig s = solver_config(cfg);

  auto one = [&](double h) -> std::pair<std::optional<ConvergenceRow>, std::string> {
    const std::size_t n = static_cast<std::size_t>(std::llround(T / h));
    try {
      const ReducedSystem red = central_reduction(central_params(cfg, h));
      // seed consistent with the continuous initial conditions
      const Series smp = mp_series(red.reduced, cfg.r0, oracle(h)[0], n, s);
      if (smp.failure) return {std::nullopt, "mp step " + std::to_string(smp.failure->step) + ": " + smp.failure->message};
      const Series srk = rk4_series(cont, y0, h, n);
      if (srk.failure) return {std::nullopt, "rk4 step " + std::to_string(srk.failure->step) + ": " + srk.failure->message};
      return {ConvergenceRow{h, std::abs(smp.states.back()[0] - r_end), std::abs(srk.states.back()[0] - r_end)}, {}};
    } catch (const Error& e) {
      return {std::nullopt, describe(e)};
    }
  };

  std::vector<std::future<std::pair<std::optional<ConvergenceRow>, std::string>>> jobs;
  for (double h : cfg.h_list) jobs.push_back(launch(cfg.parallel, [&one, h] { return one(h); }));

  ConvergenceResult out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto [row, msg] = jobs[i].get();
    if (row)
      out.rows.push_back(*row);
    else
      out.skipped.push_back("h=" + format_number(cfg.h_list[i]) + ": " + msg);
  }
  std::vector<double> hs, e_mp, e_rk;
  for (const auto& r : out.rows) {
    hs.push_back(r.h);
    e_mp.push_back(r.err_mp);
    e_rk.push_back(r.err_rk4);
  }
  if (hs.size() >= 2) {
    out.order_mp = fit_order(hs, e_mp);
    out.order_rk4 = fit_order(hs, e_rk);
  }
  return out;
}

// -- checks --------------------------------------------------------------------------

std::string CheckResult::verdict() const {
  if (expect_pass) return within ? "PASS" : "FAIL";
  return within ? "UNEXPECTED-PASS" : "EXPECTED-FAIL";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CheckResult make_check(std::string name, double tol, const std::function<double()>& measure,
                       bool expect_pass = true) {
  CheckResult c;
  c.name = std::move(name);
  c.tolerance = tol;
  c.expect_pass = expect_pass;
  try {
    c.max_defect = measure();
  } catch (const Error&) {
    c.max_defect = kInf;
  }
  c.within = c.max_defect <= tol;
  return c;
}

double max_gap_on_probes(const std::vector<ProbePair>& probes,
                         const std::function<double(const Vec&, const Vec&)>& gap) {
  double worst = 0.0;
  for (const auto& p : probes) worst = std::max(worst, gap(p.q0, p.q1));
  return worst;
}

double closed_form_gap(const DiscreteSystem& a, const DiscreteSystem& b, const std::vector<ProbePair>& probes) {
  return max_gap_on_probes(probes, [&](const Vec& t0, const Vec& t1) {
    double g = std::abs(a.lagrangian(t0, t1) - b.lagrangian(t0, t1));
    g = std::max(g, max_abs_diff(a.force_minus(t0, t1), b.force_minus(t0, t1)));
    return std::max(g, max_abs_diff(a.force_plus(t0, t1), b.force_plus(t0, t1)));
  });
}

double beta_gap(const RouthCertificate& cert, const TwoFormField& beta, const std::vector<ProbePair>& probes) {
  return max_gap_on_probes(probes, [&](const Vec& q, const Vec&) { return max_abs_diff(cert.beta(q), beta(q)); });
}

double momentum_drift(const DiscreteSystem& sys, const SymmetrySetup& setup, const Trajectory& tr) {
  const Vec j0 = momentum_plus(sys, setup, tr[0], tr[1]);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < tr.size(); ++k)
    worst = std::max(worst, max_abs_diff(momentum_plus(sys, setup, tr[k], tr[k + 1]), j0));
  return worst;
}

/// Number of sample pairs where the regularity flag and invertibility of [ω⁺] disagree.
double regularity_disagreements(const DiscreteSystem& sys, const std::vector<ProbePair>& probes) {
  double bad = 0.0;
  for (const auto& p : probes) {
    const bool regular = regularity_matrices(sys, p.q0, p.q1).is_regular;
    const bool nondegenerate = invertible(omega_f_plus(sys, p.q0, p.q1).m);
    if (regular != nondegenerate) bad += 1.0;
  }
  return bad;
}

std::vector<CheckResult> bar_checks(const ScenarioConfig& cfg) {
  const systems::BarParams bp{cfg.m, cfg.inertia, cfg.h};
  const DiscreteSystem bar = systems::bar(bp);
  const Vec mu{0.0, cfg.mu2, 0.0};
  const ReducedSystem red = reduce(bar, bar_symmetry(cfg.m, cfg.h), mu, bar_connection(cfg.nu));
  const DiscreteSystem closed = systems::bar_reduced_closed_form(bp, cfg.mu2, cfg.nu);
  const SolverConfig s = solver_config(cfg);
  const auto probes = halton_probes(2, 50, {-1, -1}, {1, 1});
  std::vector<CheckResult> out;

  out.push_back(make_check("closed-form-reduction", 1e-10, [&] { return closed_form_gap(red.reduced, closed, probes); }));
  out.push_back(make_check("closed-form-flow", 1e-10, [&] {
    const Trajectory tr = run(red.reduced, cfg.tau0, cfg.tau1, 100, s);
    double worst = 0.0;
    for (std::size_t k = 2; k < tr.size(); ++k)
      for (std::size_t i = 0; i < 2; ++i) worst = std::max(worst, std::abs(tr[k][i] - (2 * tr[k - 1][i] - tr[k - 2][i])));
    return worst;
  }));
  const auto seed = red.reconstruct(cfg.tau0, cfg.tau1);
  out.push_back(make_check("momentum-conservation", 1e-10, [&] {
    return momentum_drift(bar, bar_symmetry(cfg.m, cfg.h), run(bar, seed.first, seed.second, 100, s));
  }));
  RouthCertificate cert;
  out.push_back(make_check("routh-detection", 1e-8, [&] {
    cert = detect_routh(red.reduced);
    return cert.max_violation;
  }));
  out.push_back(make_check("routh-beta-vs-beta-mu", 1e-8, [&] { return beta_gap(cert, red.beta_mu, probes); }));
  out.push_back(make_check("symplectic-preservation", 1e-8, [&] {
    PreservationOptions po;
    po.solver = s;
    po.certificate = &cert;
    return check_preservation(red.reduced, FormKind::OmegaPlusCorrected, cfg.tau0, cfg.tau1, 50, po).max_defect;
  }));
  out.push_back(make_check("symplectic-preservation-unreduced", 1e-8, [&] {
    PreservationOptions po;
    po.solver = s;
    return check_preservation(bar, FormKind::OmegaLd, seed.first, seed.second, 50, po).max_defect;
  }));
  out.push_back(make_check("reduction-correspondence", 1e-9, [&] {
    return verify_reduction(bar, red, seed.first, seed.second, 100, s).max_discrepancy;
  }));
  return out;
}

std::vector<CheckResult> central_checks(const ScenarioConfig& cfg) {
  const auto p = central_params(cfg, cfg.h);
  const DiscreteSystem full = systems::central_midpoint(p);
  const ReducedSystem red = central_reduction(p);
  const DiscreteSystem closed = systems::central_reduced_closed_form(p);
  const ScalarField2 gamma = systems::central_reduced_potential(p);
  const SolverConfig s = solver_config(cfg);
  const auto probes = halton_probes(1, 50, {0.2}, {3.0});
  const Vec t0{cfg.seed_r0}, t1{cfg.seed_r1};
  std::vector<CheckResult> out;

  // an explicit μ that contradicts the initial data is a deliberate override
  const double ic_momentum = cfg.m * cfg.r0 * cfg.r0 * cfg.etadot0;
  if (!cfg.mu || std::abs(ic_momentum - p.mu) <= 1e-12)
    out.push_back(make_check("mu-consistency", 1e-12, [&] { return std::abs(ic_momentum - p.mu); }));
  out.push_back(make_check("closed-form-reduction", 1e-10, [&] { return closed_form_gap(red.reduced, closed, probes); }));
  out.push_back(make_check("midpoint-identity", 1e-12, [&] { return midpoint_identity_check(p, 1000); }));
  out.push_back(make_check("force-equals-dgamma", 1e-10, [&] {
    return max_gap_on_probes(probes, [&](const Vec& a, const Vec& b) {
      return std::max(max_abs_diff(red.reduced.force_minus(a, b), d1(gamma, a, b)),
                      max_abs_diff(red.reduced.force_plus(a, b), d2(gamma, a, b)));
    });
  }));
  const auto seed = red.reconstruct(t0, t1);
  out.push_back(make_check("momentum-conservation", 1e-10, [&] {
    return momentum_drift(full, translation_symmetry(2, 1), run(full, seed.first, seed.second, 500, s));
  }));
  RouthCertificate cert;
  out.push_back(make_check("routh-detection", 1e-8, [&] {
    cert = detect_routh(red.reduced);
    return cert.max_violation;
  }));
  out.push_back(make_check("routh-beta-vs-beta-mu", 1e-8, [&] { return beta_gap(cert, red.beta_mu, probes); }));
  out.push_back(make_check("symplectic-preservation", 1e-8, [&] {
    PreservationOptions po;
    po.solver = s;
    po.certificate = &cert;
    return check_preservation(red.reduced, FormKind::OmegaPlusCorrected, t0, t1, 50, po).max_defect;
  }));
  out.push_back(make_check("reduction-correspondence", 1e-8, [&] {
    return verify_reduction(full, red, seed.first, seed.second, 500, s).max_discrepancy;
  }));
  return out;
}

std::vector<CheckResult> synthetic_checks(const ScenarioConfig& cfg) {
  const DiscreteSystem plane = systems::synthetic_routh_plane(cfg.c, cfg.h);
  const DiscreteSystem space = systems::synthetic_routh_space(cfg.c, cfg.h);
  const SolverConfig s = solver_config(cfg);
  std::vector<CheckResult> out;
  RouthCertificate cp, cs;
  out.push_back(make_check("routh-detection-plane", 1e-8, [&] {
    cp = detect_routh(plane);
    return cp.max_violation;
  }));
  out.push_back(make_check("routh-beta-plane", 1e-8, [&] {
    const Matrix b = cp.beta(cfg.seed_q0);
    return std::max({std::abs(b(0, 1) - 2 * cfg.c), std::abs(b(1, 0) + 2 * cfg.c), std::abs(b(0, 0)), std::abs(b(1, 1))});
  }));
  out.push_back(make_check("routh-detection-space", 1e-8, [&] {
    cs = detect_routh(space);
    return cs.max_violation;
  }));
  out.push_back(make_check("routh-beta-closed", 1e-5, [&] {
    double worst = 0.0;
    for (const auto& p : halton_probes(3, 20, {-1, -1, -1}, {1, 1, 1}))
      worst = std::max(worst, exterior_derivative_3_fd(cs.beta, p.q0));
    return worst;
  }));
  const Vec s0{cfg.seed_q0[0], cfg.seed_q0[1], 0.1}, s1{cfg.seed_q1[0], cfg.seed_q1[1], 0.12};
  out.push_back(make_check("symplectic-preservation-plane", 1e-8, [&] {
    PreservationOptions po;
    po.solver = s;
    po.certificate = &cp;
    return check_preservation(plane, FormKind::OmegaPlusCorrected, cfg.seed_q0, cfg.seed_q1, 50, po).max_defect;
  }));
  out.push_back(make_check("symplectic-preservation-space", 1e-8, [&] {
    PreservationOptions po;
    po.solver = s;
    po.certificate = &cs;
    return check_preservation(space, FormKind::OmegaPlusCorrected, s0, s1, 50, po).max_defect;
  }));
  out.push_back(make_check("regularity-nondegeneracy", 0.0, [&] {
    return regularity_disagreements(plane, halton_probes(2, 50, {-1, -1}, {1, 1})) +
           regularity_disagreements(space, halton_probes(3, 50, {-1, -1, -1}, {1, 1, 1}));
  }));
  return out;
}

std::vector<CheckResult> dissipative_checks(const ScenarioConfig& cfg) {
  const DiscreteSystem sys = systems::dissipative_plane(cfg.kappa, cfg.h);
  const SolverConfig s = solver_config(cfg);
  std::vector<CheckResult> out;
  out.push_back(make_check("routh-detection", 1e-8, [&] {
    const auto cert = detect_routh(sys);
    return cert.max_violation;
  }, false));
  PreservationReport rep;
  out.push_back(make_check("symplectic-preservation", 1e-8, [&] {
    PreservationOptions po;
    po.solver = s;
    rep = check_preservation(sys, FormKind::OmegaPlusF, cfg.seed_q0, cfg.seed_q1, 50, po);
    return rep.max_defect;
  }, false));
  out.push_back(make_check("force-driven-evolution", 1e-8, [&] { return rep.max_force_mismatch; }));
  out.push_back(make_check("regularity-nondegeneracy", 0.0, [&] {
    return regularity_disagreements(sys, halton_probes(2, 50, {-1, -1}, {1, 1}));
  }));
  return out;
}

}  // namespace

std::vector<CheckResult> run_checks(const ScenarioConfig& cfg) {
  validate(cfg);
  if (cfg.scenario == "bar") return bar_checks(cfg);
  if (cfg.scenario == "central-potential") return central_checks(cfg);
  if (cfg.scenario == "synthetic-routh") return synthetic_checks(cfg);
  return dissipative_checks(cfg);
}

// -- commands ----------------------------------------------------------------------

namespace {

std::ofstream open_csv(const std::string& out_dir, const std::string& command, const std::string& scenario,
                       std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / (command + "-" + scenario + ".csv");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  log << "writing " << path.string() << '\n';
  f << kCsvSchema << '\n';
  return f;
}

std::string row(std::initializer_list<double> xs) {
  std::string s;
  for (double x : xs) {
    if (!s.empty()) s += ',';
    s += format_number(x);
  }
  return s;
}

void write_failure(std::ostream& f, const MethodFailure& fail) {
  f << "# FAILURE method=" << fail.method << " step=" << fail.step << " message=" << fail.message << '\n';
}

int run_central_csv(const ScenarioConfig& cfg, std::ostream& f, std::ostream& log) {
  const CentralRun r = run_central(cfg);
  f << "# mu=" << format_number(r.mu) << " m*r0^2*etadot0="
    << format_number(cfg.m * cfg.r0 * cfg.r0 * cfg.etadot0)
    << " consistency_defect=" << format_number(r.mu_consistency_defect) << '\n';
  f << "k,t,r_mp,r_rk4,r_oracle,err_mp,err_rk4,energy_mp,energy_rk4,energy_oracle\n";
  for (std::size_t k = 0; k < r.rows(); ++k)
    f << k << ','
      << row({r.t[k], r.r_mp[k], r.r_rk4[k], r.r_oracle[k], std::abs(r.r_mp[k] - r.r_oracle[k]),
              std::abs(r.r_rk4[k] - r.r_oracle[k]), r.energy_mp[k], r.energy_rk4[k], r.energy_oracle[k]})
      << '\n';
  if (r.failure) {
    write_failure(f, *r.failure);
    log << "solver failure (" << r.failure->method << ", step " << r.failure->step << "): " << r.failure->message
        << '\n';
    return kSolverFailure;
  }
  return kSuccess;
}

int run_bar_csv(const ScenarioConfig& cfg, std::ostream& f, std::ostream& log) {
  const systems::BarParams bp{cfg.m, cfg.inertia, cfg.h};
  const ReducedSystem red =
      reduce(systems::bar(bp), bar_symmetry(cfg.m, cfg.h), Vec{0.0, cfg.mu2, 0.0}, bar_connection(cfg.nu));
  const std::size_t n = cfg.step_count();
  f << "k,t,phi,y,phi_closed,y_closed,defect\n";
  if (n == 0) return kSuccess;
  std::vector<Vec> tau{cfg.tau0, cfg.tau1};
  std::optional<MethodFailure> failure;
  for (std::size_t k = 2; k <= n; ++k) {
    try {
      tau.push_back(step(red.reduced, tau[k - 2], tau[k - 1], solver_config(cfg)).q2);
    } catch (const Error& e) {
      failure = MethodFailure{"mp", k, describe(e)};
      break;
    }
  }
  const Vec d = tau[1] - tau[0];
  for (std::size_t k = 0; k < tau.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double phi = tau[0][0] + kk * d[0], y = tau[0][1] + kk * d[1];
    const double defect = std::max(std::abs(tau[k][0] - phi), std::abs(tau[k][1] - y));
    f << k << ',' << row({kk * cfg.h, tau[k][0], tau[k][1], phi, y, defect}) << '\n';
  }
  if (failure) {
    write_failure(f, *failure);
    log << "solver failure at step " << failure->step << ": " << failure->message << '\n';
    return kSolverFailure;
  }
  return kSuccess;
}

int run_planar_csv(const DiscreteSystem& sys, const ScenarioConfig& cfg, std::ostream& f, std::ostream& log) {
  const std::size_t n = cfg.step_count();
  f << "k,t,x,y\n";
  if (n == 0) return kSuccess;
  std::vector<Vec> q{cfg.seed_q0, cfg.seed_q1};
  std::optional<MethodFailure> failure;
  for (std::size_t k = 2; k <= n; ++k) {
    try {
      q.push_back(step(sys, q[k - 2], q[k - 1], solver_config(cfg)).q2);
    } catch (const Error& e) {
      failure = MethodFailure{"mp", k, describe(e)};
      break;
    }
  }
  for (std::size_t k = 0; k < q.size(); ++k)
    f << k << ',' << row({static_cast<double>(k) * cfg.h, q[k][0], q[k][1]}) << '\n';
  if (failure) {
    write_failure(f, *failure);
    log << "solver failure at step " << failure->step << ": " << failure->message << '\n';
    return kSolverFailure;
  }
  return kSuccess;
}

}  // namespace

int cmd_run(const ScenarioConfig& cfg, const std::string& out_dir, std::ostream& log) {
  validate(cfg);
  std::ofstream f = open_csv(out_dir, "run", cfg.scenario, log);
  if (cfg.scenario == "central-potential") return run_central_csv(cfg, f, log);
  if (cfg.scenario == "bar") return run_bar_csv(cfg, f, log);
  if (cfg.scenario == "synthetic-routh") return run_planar_csv(systems::synthetic_routh_plane(cfg.c, cfg.h), cfg, f, log);
  return run_planar_csv(systems::dissipative_plane(cfg.kappa, cfg.h), cfg, f, log);
}

int cmd_check(const ScenarioConfig& cfg, const std::string& out_dir, std::ostream& log) {
  validate(cfg);
  const auto results = run_checks(cfg);
  std::ofstream f = open_csv(out_dir, "check", cfg.scenario, log);
  f << "name,max_defect,tolerance,verdict\n";
  bool ok = true;
  for (const auto& c : results) {
    const std::string line =
        c.name + ',' + format_number(c.max_defect) + ',' + format_number(c.tolerance) + ',' + c.verdict();
    f << line << '\n';
    log << line << '\n';
    ok = ok && c.ok();
  }
  return ok ? kSuccess : kCheckFailure;
}

int cmd_convergence(const ScenarioConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const ConvergenceResult r = run_convergence(cfg);
  std::ofstream f = open_csv(out_dir, "convergence", cfg.scenario, log);
  f << "h,err_mp,err_rk4,fit_order_mp,fit_order_rk4\n";
  for (const auto& row_ : r.rows)
    f << row({row_.h, row_.err_mp, row_.err_rk4, r.order_mp, r.order_rk4}) << '\n';
  for (const auto& s : r.skipped) {
    f << "# skipped " << s << '\n';
    log << "skipped " << s << '\n';
  }
  log << "least-squares order: mp " << format_number(r.order_mp) << ", rk4 " << format_number(r.order_rk4) << '\n';
  return kSuccess;
}

}  // namespace routhe
