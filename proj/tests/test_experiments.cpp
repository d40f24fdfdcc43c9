#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "routhe/errors.hpp"
#include "routhe/experiments.hpp"

using namespace routhe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "experiments-scratch" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

/// Data rows: everything after the header that is not a comment.
std::vector<std::vector<double>> data_rows(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  bool header_seen = false;
  for (const auto& line : lines_of(csv)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

ScenarioConfig with(std::initializer_list<const char*> settings, ScenarioConfig cfg = {}) {
  for (const char* s : settings) apply_setting(cfg, s);
  return cfg;
}

int run_cmd(int (*cmd)(const ScenarioConfig&, const std::string&, std::ostream&), const ScenarioConfig& cfg,
            const fs::path& dir) {
  std::ostringstream log;
  return cmd(cfg, dir.string(), log);
}

}  // namespace

TEST_CASE("configuration parsing") {
  std::istringstream in(
      "# central potential\n"
      "scenario = bar\n"
      "\n"
      "J = 2.5   # inertia\n"
      "h=0.1\n"
      "tau1 = 0.3, 0.4\n"
      "N = 40\n"
      "parallel = true\n");
  const ScenarioConfig cfg = parse_config(in);
  CHECK(cfg.scenario == "bar");
  CHECK(cfg.inertia == 2.5);
  CHECK(cfg.h == 0.1);
  CHECK(cfg.tau1 == Vec{0.3, 0.4});
  CHECK(cfg.step_count() == 40);
  CHECK(cfg.parallel);
  CHECK_NOTHROW(validate(cfg));

  const ScenarioConfig def;
  CHECK(def.step_count() == 500);
  CHECK(def.momentum() == doctest::Approx(-0.114).epsilon(1e-14));
  CHECK(with({"mu=0.3"}).momentum() == 0.3);
  CHECK(with({"mu=auto"}, with({"mu=0.3"})).momentum() == doctest::Approx(-0.114).epsilon(1e-14));

  CHECK_THROWS_AS(apply_setting(ScenarioConfig{}.operator=(def), "no_such_key=1"), ConfigError);
  ScenarioConfig scratch_cfg;
  CHECK_THROWS_AS(apply_setting(scratch_cfg, "h"), ConfigError);
  CHECK_THROWS_AS(apply_setting(scratch_cfg, "h=fast"), ConfigError);
  CHECK_THROWS_AS(apply_setting(scratch_cfg, "N=-3"), ConfigError);
  CHECK_THROWS_AS(apply_setting(scratch_cfg, "parallel=maybe"), ConfigError);
  std::istringstream broken("h = 0.2\nthis line has no assignment\n");
  CHECK_THROWS_AS(parse_config(broken), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/routhe.cfg"), ConfigError);
}

TEST_CASE("configuration validation") {
  CHECK_NOTHROW(validate(ScenarioConfig{}));
  CHECK_THROWS_AS(validate(with({"h=-1"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"h=0"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"N=1"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"t_end=0.3"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"scenario=pendulum"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"h_list=0.2,0.1,0.05"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"h_list=0.2,0.1,0.04,0.02"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"r0=0"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"scenario=bar", "tau0=1,2,3"})), ConfigError);
  CHECK_THROWS_AS(validate(with({"scenario=synthetic-routh", "seed_q1=1"})), ConfigError);
  CHECK_NOTHROW(validate(with({"t_end=0"})));
}

TEST_CASE("numbers are written with 17 significant digits") {
  for (double x : {0.1, -0.114, 1.0 / 3.0, 6.02214076e23, 5e-324, 0.0}) {
    const std::string s = format_number(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("least-squares helpers") {
  const std::vector<double> h{0.2, 0.1, 0.05, 0.025};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * x * x);
  CHECK(fit_order(h, e) == doctest::Approx(2.0).epsilon(1e-12));

  const std::vector<double> t{0, 1, 2, 3, 4};
  const EnergyStats s = energy_stats(t, {1.0, 1.5, 2.0, 2.5, 3.0});
  CHECK(s.drift == doctest::Approx(2.0));
  CHECK(s.end_minus_start == doctest::Approx(2.0));
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.amplitude == doctest::Approx(1.0));
}

TEST_CASE("central-potential run") {
  const CentralRun r = run_central(ScenarioConfig{});
  REQUIRE(r.rows() == 501);
  CHECK_FALSE(r.failure.has_value());
  CHECK(std::abs(r.mu - (-0.114)) <= 1e-12);
  CHECK(r.mu_consistency_defect <= 1e-12);
  CHECK(r.r_mp[0] == 0.2);
  CHECK(r.r_mp[1] == 0.201);
  CHECK(r.t.back() == doctest::Approx(100.0));

  // energy behaviour of the two fixed-step methods
  const EnergyStats rk4 = energy_stats(r.t, r.energy_rk4);
  const EnergyStats mp = energy_stats(r.t, r.energy_mp);
  CHECK(r.energy_rk4.back() - r.energy_rk4.front() < 0.0);
  CHECK(std::abs(mp.mean - r.energy_exact) <= mp.amplitude);
  CHECK(std::abs(mp.drift) <= 0.1 * std::abs(rk4.drift));
  // grid values come from Hermite interpolation between accepted steps
  for (double e : r.energy_oracle) CHECK(std::abs(e - r.energy_exact) <= 1e-8);
}

TEST_CASE("run command output") {
  SUBCASE("default configuration: 501 finite rows and the μ line") {
    const fs::path dir = scratch("run-central");
    CHECK(run_cmd(cmd_run, ScenarioConfig{}, dir) == kSuccess);
    const std::string csv = slurp(dir / "run-central-potential.csv");
    const auto lines = lines_of(csv);
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0] == kCsvSchema);
    CHECK(lines[1].rfind("# mu=", 0) == 0);
    CHECK(lines[2] == "k,t,r_mp,r_rk4,r_oracle,err_mp,err_rk4,energy_mp,energy_rk4,energy_oracle");
    const auto rows = data_rows(csv);
    CHECK(rows.size() == 501);
    for (const auto& row : rows) {
      REQUIRE(row.size() == 10);
      for (double x : row) CHECK(std::isfinite(x));
    }
    CHECK(csv.find("FAILURE") == std::string::npos);
  }
  SUBCASE("t_end = 0 gives a header-only file") {
    const fs::path dir = scratch("run-empty");
    CHECK(run_cmd(cmd_run, with({"t_end=0"}), dir) == kSuccess);
    const std::string csv = slurp(dir / "run-central-potential.csv");
    CHECK(data_rows(csv).empty());
    CHECK(csv.find("k,t,r_mp") != std::string::npos);
  }
  SUBCASE("bar: reduced flow against the closed form") {
    const fs::path dir = scratch("run-bar");
    CHECK(run_cmd(cmd_run, with({"scenario=bar", "N=100"}), dir) == kSuccess);
    const auto rows = data_rows(slurp(dir / "run-bar.csv"));
    CHECK(rows.size() == 101);  // t_k = k h, k = 0..N
    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, row.back());
    CHECK(worst <= 1e-10);
  }
  SUBCASE("planar scenarios") {
    const fs::path dir = scratch("run-planar");
    CHECK(run_cmd(cmd_run, with({"scenario=synthetic-routh", "h=0.1", "t_end=5"}), dir) == kSuccess);
    CHECK(data_rows(slurp(dir / "run-synthetic-routh.csv")).size() == 51);
    CHECK(run_cmd(cmd_run, with({"scenario=dissipative", "h=0.1", "t_end=5"}), dir) == kSuccess);
    CHECK(data_rows(slurp(dir / "run-dissipative.csv")).size() == 51);
  }
  SUBCASE("solver failure keeps the partial file and marks it") {
    const fs::path dir = scratch("run-fail");
    CHECK(run_cmd(cmd_run, with({"max_iter=1"}), dir) == kSolverFailure);
    const std::string csv = slurp(dir / "run-central-potential.csv");
    CHECK(csv.find("# FAILURE method=mp step=") != std::string::npos);
    for (const auto& row : data_rows(csv))
      for (double x : row) CHECK(std::isfinite(x));
  }
}

TEST_CASE("output is deterministic, also with concurrent pipelines") {
  const fs::path a = scratch("det-a"), b = scratch("det-b"), c = scratch("det-c");
  REQUIRE(run_cmd(cmd_run, ScenarioConfig{}, a) == kSuccess);
  REQUIRE(run_cmd(cmd_run, ScenarioConfig{}, b) == kSuccess);
  REQUIRE(run_cmd(cmd_run, with({"parallel=true"}), c) == kSuccess);
  const std::string ref = slurp(a / "run-central-potential.csv");
  CHECK(ref == slurp(b / "run-central-potential.csv"));
  CHECK(ref == slurp(c / "run-central-potential.csv"));

  REQUIRE(run_cmd(cmd_convergence, ScenarioConfig{}, a) == kSuccess);
  REQUIRE(run_cmd(cmd_convergence, ScenarioConfig{}, b) == kSuccess);
  CHECK(slurp(a / "convergence-central-potential.csv") == slurp(b / "convergence-central-potential.csv"));
}

TEST_CASE("check suites") {
  SUBCASE("bar defaults pass") {
    const auto results = run_checks(with({"scenario=bar"}));
    CHECK(results.size() >= 5);
    for (const auto& c : results) {
      INFO(c.name, " defect ", c.max_defect);
      CHECK(c.verdict() == "PASS");
    }
    CHECK(run_cmd(cmd_check, with({"scenario=bar"}), scratch("check-bar")) == kSuccess);
  }
  SUBCASE("dissipative control fails where expected and the suite passes") {
    const fs::path dir = scratch("check-dissipative");
    CHECK(run_cmd(cmd_check, with({"scenario=dissipative"}), dir) == kSuccess);
    const std::string csv = slurp(dir / "check-dissipative.csv");
    CHECK(csv.find("symplectic-preservation,") != std::string::npos);
    CHECK(csv.find("EXPECTED-FAIL") != std::string::npos);
    for (const auto& c : run_checks(with({"scenario=dissipative"}))) CHECK(c.ok());
  }
  SUBCASE("central potential, with and without μ") {
    for (const auto& c : run_checks(ScenarioConfig{})) {
      INFO(c.name, " defect ", c.max_defect);
      CHECK(c.ok());
    }
    // μ = 0 has no centrifugal barrier, so the orbit is started in the well about r = √β
    const auto zero = run_checks(with({"mu=0", "seed_r0=1.3", "seed_r1=1.31"}));
    for (const auto& c : zero) {
      INFO(c.name, " defect ", c.max_defect);
      CHECK(c.ok());
    }
    CHECK(std::none_of(zero.begin(), zero.end(), [](const CheckResult& c) { return c.name == "mu-consistency"; }));
  }
  SUBCASE("μ = 0 from the default seed: trajectory-free reduction checks pass") {
    for (const auto& c : run_checks(with({"mu=0"}))) {
      if (c.name == "closed-form-reduction" || c.name == "midpoint-identity" || c.name == "force-equals-dgamma" ||
          c.name == "routh-detection" || c.name == "routh-beta-vs-beta-mu") {
        INFO(c.name, " defect ", c.max_defect);
        CHECK(c.ok());
      }
    }
  }
  SUBCASE("synthetic Routh scenario") {
    for (const auto& c : run_checks(with({"scenario=synthetic-routh"}))) {
      INFO(c.name, " defect ", c.max_defect);
      CHECK(c.ok());
    }
  }
  SUBCASE("verdicts") {
    CheckResult r{"x", 1.0, 0.5, false, false};
    CHECK(r.verdict() == "EXPECTED-FAIL");
    r.within = true;
    CHECK(r.verdict() == "UNEXPECTED-PASS");
    CHECK_FALSE(r.ok());
    r.expect_pass = true;
    CHECK(r.verdict() == "PASS");
    r.within = false;
    CHECK(r.verdict() == "FAIL");
  }
}

TEST_CASE("convergence: MP is second order") {
  const ConvergenceResult r = run_convergence(ScenarioConfig{});
  REQUIRE(r.rows.size() == 4);
  CHECK(r.skipped.empty());
  CHECK(r.order_mp >= 1.8);
  CHECK(r.order_mp <= 2.2);
}

TEST_CASE("convergence: RK4 slope over the default step sizes lies in [3.7, 4.3]") {
  const ConvergenceResult r = run_convergence(ScenarioConfig{});
  CHECK(r.order_rk4 >= 3.7);
  CHECK(r.order_rk4 <= 4.3);
}

TEST_CASE("convergence skips failing step sizes") {
  const ConvergenceResult r = run_convergence(with({"max_iter=1"}));
  CHECK(r.skipped.size() == 4);
  CHECK(r.rows.empty());
  const fs::path dir = scratch("conv-skip");
  CHECK(run_cmd(cmd_convergence, with({"max_iter=1"}), dir) == kSuccess);
  CHECK(slurp(dir / "convergence-central-potential.csv").find("# skipped") != std::string::npos);
}

#ifdef ROUTHE_CLI
namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(ROUTHE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(cli("check --set scenario=bar --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "check-bar.csv"));
  CHECK(cli("run --set h=-1 --out " + dir.string()) == 2);
  CHECK(cli("run --config /nonexistent.cfg --out " + dir.string()) == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("run --set max_iter=1 --out " + dir.string()) == 3);

  {
    std::ofstream cfg(dir / "bar.cfg");
    cfg << "scenario = bar\nN = 100\n";
  }
  CHECK(cli("run --config " + (dir / "bar.cfg").string() + " --set J=2 --out " + dir.string()) == 0);
  CHECK(data_rows(slurp(dir / "run-bar.csv")).size() == 101);
}
#endif
