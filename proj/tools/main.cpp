// ksbound command-line interface: validate / bound / simulate / verify /
// sweep over flat key-value experiment configs.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "ksbound/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  double tol = -1.0;
  bool no_plots = false;
  bool frozen_constants = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--tol", args.tol,
                  "tolerance override (quadrature for bound, residual for verify)");
  cmd->add_flag("--no-plots", args.no_plots, "skip SVG plot emission");
}

ksbound::ExperimentConfig load(const CommonArgs& args, bool tol_is_verify,
                               bool with_frozen = false) {
  ksbound::CliOverrides overrides;
  if (!args.out_dir.empty()) overrides.out_dir = args.out_dir;
  if (args.tol > 0.0) overrides.tol = args.tol;
  if (args.no_plots) overrides.no_plots = true;
  if (with_frozen && args.frozen_constants) overrides.frozen_constants = true;
  return ksbound::load_experiment_file(args.config_path, overrides,
                                       tol_is_verify);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lower-bound analysis and simulation for a quasilinear "
               "chemotaxis system"};
  app.require_subcommand(1);

  CommonArgs validate_args, bound_args, simulate_args, verify_args, sweep_args;
  CLI::App* validate = app.add_subcommand(
      "validate", "check (p,q) admissibility and report binding terms");
  add_common(validate, validate_args);
  CLI::App* bound = app.add_subcommand(
      "bound", "assemble constants and evaluate the blow-up-time lower bound");
  add_common(bound, bound_args);
  CLI::App* simulate = app.add_subcommand(
      "simulate", "integrate the system and record the energy history");
  add_common(simulate, simulate_args);
  CLI::App* verify = app.add_subcommand(
      "verify", "audit the energy inequalities along a trajectory");
  add_common(verify, verify_args);
  CLI::App* sweep = app.add_subcommand(
      "sweep", "per-m1 bound (and optional simulation) comparison");
  add_common(sweep, sweep_args);
  sweep->add_flag("--frozen-constants", sweep_args.frozen_constants,
                  "vary only f(eta, r(m1)), keep all constants fixed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      return ksbound::run_validate(load(validate_args, false), std::cout);
    }
    if (*bound) {
      return ksbound::run_bound(load(bound_args, false), std::cout).exit_code;
    }
    if (*simulate) {
      return ksbound::run_simulate(load(simulate_args, false), std::cout)
          .exit_code;
    }
    if (*verify) {
      return ksbound::run_verify(load(verify_args, true), std::cout).exit_code;
    }
    if (*sweep) {
      return ksbound::run_sweep(load(sweep_args, false, true), std::cout)
          .exit_code;
    }
  } catch (const ksbound::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ksbound::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ksbound::kExitRuntime;
  }
  return ksbound::kExitConfig;
}
