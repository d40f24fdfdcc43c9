// routhe run|check|convergence --config <path> [--set key=value ...] --out <dir>

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "routhe/errors.hpp"
#include "routhe/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Forced discrete mechanical systems: experiments and invariant checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  bool parallel = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key=value scenario file (defaults apply when omitted)");
    cmd->add_option("--set", overrides, "override one setting, key=value")->take_all();
    cmd->add_option("--out", out_dir, "output directory for CSV files");
    cmd->add_flag("--parallel", parallel, "run independent pipelines concurrently");
  };
  auto* run = app.add_subcommand("run", "trajectories and energies as CSV");
  auto* check = app.add_subcommand("check", "invariant suite, one line per check");
  auto* conv = app.add_subcommand("convergence", "global errors against the adaptive oracle");
  for (auto* c : {run, check, conv}) add_common(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : routhe::kConfigError;
  }

  routhe::ScenarioConfig cfg;
  try {
    if (!config_path.empty()) cfg = routhe::load_config(config_path);
    for (const auto& s : overrides) routhe::apply_setting(cfg, s);
    if (parallel) cfg.parallel = true;
    routhe::validate(cfg);
  } catch (const routhe::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return routhe::kConfigError;
  }

  try {
    if (run->parsed()) return routhe::cmd_run(cfg, out_dir, std::cout);
    if (check->parsed()) return routhe::cmd_check(cfg, out_dir, std::cout);
    return routhe::cmd_convergence(cfg, out_dir, std::cout);
  } catch (const routhe::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return routhe::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return routhe::kSolverFailure;
  }
}
