#pragma once

// Scenario configuration and the batch pipelines behind the routhe CLI.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "routhe/linalg.hpp"

namespace routhe {

/// Flat configuration of one scenario. Defaults reproduce the central-potential
/// experiment: α=0.1, β=2, m=1, h=0.2, t ∈ [0,100], (r0,η0)=(0.2,1.5708),
/// (ṙ0,η̇0)=(0.01,−2.85), discrete seed (0.2, 0.201).
struct ScenarioConfig {
  std::string scenario = "central-potential";  // central-potential | bar | synthetic-routh | dissipative

  double m = 1.0;
  double inertia = 1.0;  // key J
  double alpha = 0.1;
  double beta = 2.0;
  double nu = 0.7;
  double mu2 = 2.5;
  double c = 0.3;
  double kappa = 0.5;

  double h = 0.2;
  double t_end = 100.0;
  std::optional<std::size_t> steps;  // key N; overrides t_end

  double r0 = 0.2;
  double eta0 = 1.5708;
  double rdot0 = 0.01;
  double etadot0 = -2.85;
  std::optional<double> mu;  // unset or "auto": m r0² η̇0

  double seed_r0 = 0.2;
  double seed_r1 = 0.201;
  Vec tau0{0.0, 0.0};  // bar quotient seed (φ, y)
  Vec tau1{0.1, 0.2};
  Vec seed_q0{1.0, 0.0};  // planar synthetic seeds
  Vec seed_q1{1.0, 0.1};

  double solver_tol = 1e-12;
  int max_iter = 50;
  double oracle_tol = 1e-12;

  std::vector<double> h_list{0.2, 0.1, 0.05, 0.025};
  double convergence_t_end = 10.0;

  bool parallel = false;

  /// Number of time steps: N if given, otherwise round(t_end / h).
  std::size_t step_count() const;
  double momentum() const;
};

/// Applies one `key=value` assignment. Throws ConfigError.
void apply_setting(ScenarioConfig& cfg, const std::string& assignment);
/// Parses `key = value` lines; blank lines and `#` comments are ignored.
ScenarioConfig parse_config(std::istream& in, const std::string& origin = "<config>");
ScenarioConfig load_config(const std::string& path);
/// Throws ConfigError when the configuration is incomplete or inconsistent.
void validate(const ScenarioConfig& cfg);

/// 17 significant digits, round-trip exact.
std::string format_number(double x);

inline constexpr const char* kCsvSchema = "# routhe-csv v1";

struct MethodFailure {
  std::string method;
  std::size_t step = 0;
  std::string message;
};

/// The three central-potential pipelines sampled on the grid t_k = k h.
struct CentralRun {
  double mu = 0.0;
  double mu_consistency_defect = 0.0;  // |m r0² η̇0 − μ|
  std::vector<double> t;
  std::vector<double> r_mp, r_rk4, r_oracle;
  std::vector<double> energy_mp, energy_rk4, energy_oracle;
  double energy_exact = 0.0;
  std::optional<MethodFailure> failure;
  std::size_t rows() const { return t.size(); }
};

CentralRun run_central(const ScenarioConfig& cfg);

struct EnergyStats {
  double mean = 0.0;
  double amplitude = 0.0;  // (max − min) / 2
  double drift = 0.0;      // least-squares slope times the time span
  double end_minus_start = 0.0;
};

EnergyStats energy_stats(const std::vector<double>& t, const std::vector<double>& e);

struct ConvergenceRow {
  double h = 0.0;
  double err_mp = 0.0;
  double err_rk4 = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::vector<std::string> skipped;  // one message per failed h
  double order_mp = 0.0;
  double order_rk4 = 0.0;
};

/// Global error at convergence_t_end against the adaptive oracle for each h.
ConvergenceResult run_convergence(const ScenarioConfig& cfg);

/// Least-squares slope of log(err) against log(h).
double fit_order(const std::vector<double>& h, const std::vector<double>& err);

struct CheckResult {
  std::string name;
  double max_defect = 0.0;
  double tolerance = 0.0;
  bool expect_pass = true;
  bool within = false;

  /// A check passes when the observation agrees with the expectation.
  bool ok() const { return within == expect_pass; }
  std::string verdict() const;
};

std::vector<CheckResult> run_checks(const ScenarioConfig& cfg);

/// Exit codes of the command-line tool.
enum ExitCode : int { kSuccess = 0, kCheckFailure = 1, kConfigError = 2, kSolverFailure = 3 };

/// Each command writes `<out_dir>/<command>-<scenario>.csv` and a short log.
int cmd_run(const ScenarioConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_check(const ScenarioConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_convergence(const ScenarioConfig& cfg, const std::string& out_dir, std::ostream& log);

}  // namespace routhe
