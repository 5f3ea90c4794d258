#pragma once

/// @file experiment.hpp
/// @brief Experiment orchestration shared by the CLI and the test suites:
///        config resolution, initial-data synthesis, and the validate /
///        bound / simulate / verify / sweep entry points.
///
/// Exit-code contract: 0 success, 1 inadmissible configuration or failed
/// bound/inequality check, 2 config error, 3 runtime failure.

#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ksbound/bound.hpp"
#include "ksbound/config.hpp"
#include "ksbound/constants.hpp"
#include "ksbound/csv.hpp"
#include "ksbound/exponents.hpp"
#include "ksbound/field.hpp"
#include "ksbound/grid.hpp"
#include "ksbound/report.hpp"
#include "ksbound/rng.hpp"
#include "ksbound/solver.hpp"
#include "ksbound/svg.hpp"
#include "ksbound/verify.hpp"

namespace ksbound {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInadmissible = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

struct InitialSpec {
  enum class Kind { constant, gaussian, from_file };
  Kind kind = Kind::constant;
  double value = 0.0;                      // constant(c)
  double amp = 0.0, width = 1.0, center = 0.0;  // gaussian(amp,width,center)
  std::string path;                        // from-file(path)
};

inline InitialSpec parse_initial_spec(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos ||
      close < open) {
    throw ConfigError("initial data: expected name(args), got '" + text + "'");
  }
  const std::string name = text.substr(0, open);
  const std::string args = text.substr(open + 1, close - open - 1);
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(args);
  while (std::getline(in, token, ',')) parts.push_back(token);

  InitialSpec spec;
  const auto number = [&](const std::string& s) {
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw ConfigError("initial data: bad number '" + s + "'");
    }
  };
  if (name == "constant") {
    if (parts.size() != 1) throw ConfigError("constant(c) takes one argument");
    spec.kind = InitialSpec::Kind::constant;
    spec.value = number(parts[0]);
  } else if (name == "gaussian") {
    if (parts.size() < 2 || parts.size() > 3) {
      throw ConfigError("gaussian(amplitude,width[,center]) takes 2-3 arguments");
    }
    spec.kind = InitialSpec::Kind::gaussian;
    spec.amp = number(parts[0]);
    spec.width = number(parts[1]);
    spec.center = parts.size() == 3 ? number(parts[2]) : 0.0;
    if (!(spec.width > 0.0)) throw ConfigError("gaussian width must be > 0");
  } else if (name == "from-file") {
    if (parts.size() != 1) throw ConfigError("from-file(path) takes one argument");
    spec.kind = InitialSpec::Kind::from_file;
    spec.path = parts[0];
  } else {
    throw ConfigError("unknown initial data kind: " + name);
  }
  return spec;
}

inline std::vector<double> materialize_initial(const InitialSpec& spec,
                                               const Grid& grid,
                                               bool want_v_column) {
  std::vector<double> field(grid.cells, 0.0);
  switch (spec.kind) {
    case InitialSpec::Kind::constant:
      field.assign(grid.cells, spec.value);
      break;
    case InitialSpec::Kind::gaussian:
      for (std::size_t i = 0; i < grid.cells; ++i) {
        const double d = grid.centers[i] - spec.center;
        field[i] = spec.amp * std::exp(-0.5 * d * d / (spec.width * spec.width));
      }
      break;
    case InitialSpec::Kind::from_file: {
      const State file_state = read_snapshot_csv(spec.path, grid);
      field = want_v_column ? file_state.v : file_state.u;
      break;
    }
  }
  return field;
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  ModelParams model;
  std::size_t grid_cells = 256;

  bool exponent_search = false;
  double p = 0.0, q = 0.0, eta = 0.0;
  ScanRange p_range{1.1, 8.0}, q_range{1.1, 8.0};
  double search_step = 0.1;

  bool gn_estimate = false;
  double gn_c1 = 1.0, gn_c2 = 1.0;
  int gn_budget = 400;
  double gn_safety = 2.0;
  std::uint64_t gn_seed = 20240501u;

  std::optional<double> d_delta;
  std::optional<double> delta_override;

  SolverConfig solver;
  InitialSpec initial_u, initial_v;
  double initial_noise = 0.0;

  double bound_tol = 1e-10;
  double verify_tol = 1e-3;

  std::vector<double> sweep_m1;
  bool sweep_frozen = false;
  bool sweep_simulate = false;

  std::string out_dir = "out";
  bool plots = true;

  KeyValueConfig raw;  ///< retained for the resolved-config echo
};

struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<double> tol;
  std::optional<bool> frozen_constants;
  bool no_plots = false;
};

/// Loads and schema-validates an experiment configuration. CLI overrides are
/// injected before resolution so the report echo shows effective values.
inline ExperimentConfig load_experiment(KeyValueConfig kv,
                                        const CliOverrides& overrides = {},
                                        bool tol_is_verify = false) {
  if (overrides.out_dir) kv.override_value("output.dir", *overrides.out_dir);
  if (overrides.no_plots) kv.override_value("output.plots", "false");
  if (overrides.frozen_constants) {
    kv.override_value("sweep.frozen", *overrides.frozen_constants ? "true" : "false");
  }
  if (overrides.tol) {
    kv.override_value(tol_is_verify ? "verify.tol" : "bound.tol",
                      KeyValueConfig::format_double(*overrides.tol));
  }

  ExperimentConfig cfg;
  cfg.model.n = static_cast<int>(kv.get_int("model.n"));
  cfg.model.m1 = kv.get_double("model.m1");
  cfg.model.m2 = kv.get_double("model.m2");
  cfg.model.chi = kv.get_double("model.chi", 1.0);
  cfg.model.alpha = kv.get_double("model.alpha", 1.0);

  const std::string geometry = kv.get_string("domain.geometry", "interval");
  if (geometry == "interval") {
    if (cfg.model.n != 1) {
      throw ConfigError("interval geometry requires model.n = 1");
    }
    cfg.model.domain = DomainSpec::interval(kv.get_double("domain.length", 1.0));
  } else if (geometry == "ball") {
    cfg.model.domain =
        DomainSpec::ball(kv.get_double("domain.radius", 1.0), cfg.model.n);
  } else {
    throw ConfigError("domain.geometry must be 'interval' or 'ball'");
  }
  cfg.model.domain.convex = kv.get_bool("domain.convex", true);
  if (!cfg.model.domain.convex) {
    if (!kv.has("domain.d_delta")) {
      throw ConfigError(
          "non-convex domain requires domain.d_delta (no computable default)");
    }
    cfg.d_delta = kv.get_double("domain.d_delta");
    if (!(*cfg.d_delta > 0.0)) {
      throw ConfigError("domain.d_delta must be > 0");
    }
  }
  try {
    cfg.model.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }

  cfg.grid_cells = static_cast<std::size_t>(kv.get_int("grid.cells", 256));
  if (cfg.grid_cells < 8) throw ConfigError("grid.cells must be >= 8");

  const std::string expo_mode = kv.get_string("exponents.mode", "explicit");
  const EtaChoice eta_choice = eta_default(cfg.model.n);
  cfg.eta = kv.get_double("exponents.eta", eta_choice.value);
  if (eta_choice.dimension_fixed &&
      std::abs(cfg.eta - eta_choice.value) > 1e-12) {
    throw ConfigError("exponents.eta is fixed to n/(n-1) for n >= 3");
  }
  if (!(cfg.eta > 1.0 && cfg.eta < 2.0)) {
    throw ConfigError("exponents.eta must lie in (1,2)");
  }
  if (expo_mode == "explicit") {
    cfg.exponent_search = false;
    cfg.p = kv.get_double("exponents.p");
    cfg.q = kv.get_double("exponents.q");
  } else if (expo_mode == "search") {
    cfg.exponent_search = true;
    cfg.p_range = {kv.get_double("exponents.p_min", 1.1),
                   kv.get_double("exponents.p_max", 8.0)};
    cfg.q_range = {kv.get_double("exponents.q_min", 1.1),
                   kv.get_double("exponents.q_max", 8.0)};
    cfg.search_step = kv.get_double("exponents.step", 0.1);
  } else {
    throw ConfigError("exponents.mode must be 'explicit' or 'search'");
  }

  const std::string gn_mode = kv.get_string("gn.mode", "user");
  if (gn_mode == "user") {
    cfg.gn_estimate = false;
    cfg.gn_c1 = kv.get_double("gn.c1", 1.0);
    cfg.gn_c2 = kv.get_double("gn.c2", 1.0);
    if (!(cfg.gn_c1 > 0.0 && cfg.gn_c2 > 0.0)) {
      throw ConfigError("gn.c1 and gn.c2 must be > 0");
    }
  } else if (gn_mode == "estimate") {
    cfg.gn_estimate = true;
    cfg.gn_budget = static_cast<int>(kv.get_int("gn.budget", 400));
    cfg.gn_safety = kv.get_double("gn.safety", 2.0);
    cfg.gn_seed = static_cast<std::uint64_t>(kv.get_int("gn.seed", 20240501));
    if (cfg.gn_budget < 1) throw ConfigError("gn.budget must be >= 1");
    if (!(cfg.gn_safety >= 1.0)) throw ConfigError("gn.safety must be >= 1");
  } else {
    throw ConfigError("gn.mode must be 'user' or 'estimate'");
  }

  if (kv.has("constants.delta")) {
    cfg.delta_override = kv.get_double("constants.delta");
  }

  cfg.solver.cfl_safety = kv.get_double("solver.cfl_safety", 0.9);
  cfg.solver.dt_min = kv.get_double("solver.dt_min", 1e-12);
  cfg.solver.u_blowup_threshold =
      kv.get_double("solver.u_blowup_threshold", 1e8);
  cfg.solver.t_end = kv.get_double("solver.t_end", 1.0);
  cfg.solver.sample_stride =
      static_cast<int>(kv.get_int("solver.sample_stride", 10));
  cfg.solver.seed = static_cast<std::uint64_t>(kv.get_int("solver.seed", 0));
  cfg.solver.step_rel_tol = kv.get_double("solver.step_rel_tol", 1e-4);
  cfg.solver.clip_negative = kv.get_bool("solver.clip_negative", true);
  cfg.solver.snapshot_stride =
      static_cast<int>(kv.get_int("solver.snapshot_stride", 0));
  try {
    cfg.solver.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }

  cfg.initial_u = parse_initial_spec(kv.get_string("initial.u", "constant(1)"));
  cfg.initial_v = parse_initial_spec(kv.get_string("initial.v", "constant(0)"));
  cfg.initial_noise = kv.get_double("initial.noise", 0.0);
  if (cfg.initial_noise < 0.0) throw ConfigError("initial.noise must be >= 0");

  cfg.bound_tol = kv.get_double("bound.tol", 1e-10);
  cfg.verify_tol = kv.get_double("verify.tol", 1e-3);
  if (!(cfg.bound_tol > 0.0)) throw ConfigError("bound.tol must be > 0");
  if (!(cfg.verify_tol > 0.0)) throw ConfigError("verify.tol must be > 0");

  if (kv.has("sweep.m1")) cfg.sweep_m1 = kv.get_double_list("sweep.m1");
  cfg.sweep_frozen = kv.get_bool("sweep.frozen", false);
  cfg.sweep_simulate = kv.get_bool("sweep.simulate", false);

  cfg.out_dir = kv.get_string("output.dir", "out");
  cfg.plots = kv.get_bool("output.plots", true);

  kv.reject_unconsumed();
  cfg.raw = std::move(kv);
  return cfg;
}

inline ExperimentConfig load_experiment_file(const std::string& path,
                                             const CliOverrides& overrides = {},
                                             bool tol_is_verify = false) {
  return load_experiment(KeyValueConfig::from_file(path), overrides,
                         tol_is_verify);
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

inline State build_initial_state(const ExperimentConfig& cfg,
                                 const Grid& grid) {
  State state;
  state.u = materialize_initial(cfg.initial_u, grid, false);
  state.v = materialize_initial(cfg.initial_v, grid, true);
  if (cfg.initial_noise > 0.0) {
    Rng rng(cfg.solver.seed);
    for (auto& u : state.u) u += rng.uniform(0.0, cfg.initial_noise);
  }
  for (std::size_t i = 0; i < grid.cells; ++i) {
    if (state.u[i] < 0.0 || state.v[i] < 0.0) {
      throw ConfigError("initial data must be nonnegative");
    }
  }
  return state;
}

/// Resolves the exponent configuration, by derivation or by grid search
/// (first hit of the f(eta,r)-sorted scan).
inline ExponentConfig resolve_exponents(const ExperimentConfig& cfg,
                                        std::string* note = nullptr) {
  if (!cfg.exponent_search) {
    return derive_exponents(cfg.model, cfg.p, cfg.q, cfg.eta);
  }
  const auto found = search_admissible(cfg.model, cfg.p_range, cfg.q_range,
                                       cfg.search_step, cfg.eta);
  if (found.empty()) {
    throw std::domain_error(
        "exponent search found no admissible (p, q) in the configured ranges");
  }
  if (note) {
    *note = "search selected (p, q) = (" + std::to_string(found.front().p) +
            ", " + std::to_string(found.front().q) + ")";
  }
  return found.front();
}

struct GnResolution {
  GnConstants constants;
  std::string provenance;
};

inline GnResolution resolve_gn(const ExperimentConfig& cfg,
                               const ExponentConfig& expo, const Grid& grid) {
  GnResolution res;
  if (!cfg.gn_estimate) {
    res.constants = {cfg.gn_c1, cfg.gn_c2, GnProvenance::user_supplied};
    res.provenance = "user-supplied c1, c2";
    return res;
  }
  const GnEstimateSpec density_spec{2.0 * expo.r * expo.eta, 2.0 * expo.r,
                                    2.0 * expo.r, expo.a};
  const GnEstimateSpec gradient_spec{2.0 * expo.eta, 2.0, 2.0, 0.5};
  const double c1 =
      estimate_gn_constant(density_spec, grid, cfg.gn_budget, cfg.gn_seed);
  const double c2 =
      estimate_gn_constant(gradient_spec, grid, cfg.gn_budget, cfg.gn_seed);
  res.constants = {c1 * cfg.gn_safety, c2 * cfg.gn_safety,
                   GnProvenance::empirically_estimated};
  res.provenance = "empirically-estimated c1, c2 (x" +
                   KeyValueConfig::format_double(cfg.gn_safety) +
                   " safety, budget " + std::to_string(cfg.gn_budget) + ")";
  return res;
}

inline void ensure_out_dir(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
}

inline std::string out_path(const ExperimentConfig& cfg,
                            const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

namespace detail {

inline void report_condition(ReportBuilder& rb, const std::string& label,
                             const ConditionVerdict& v) {
  rb.field(label + ".pass", v.pass ? "yes" : "no");
  rb.field(label + ".margin", v.margin);
  rb.field(label + ".binding-term", v.binding_name());
  for (const auto& term : v.terms) {
    rb.field(label + ".term[" + term.name + "]", term.value);
  }
}

inline void report_exponents(ReportBuilder& rb, const ExponentConfig& e) {
  rb.section("exponents");
  rb.field("p", e.p);
  rb.field("q", e.q);
  rb.field("eta", e.eta);
  rb.field("r", e.r);
  rb.field("f(eta,r)", e.f_r);
  rb.field("f(eta,1)", e.f_1);
  rb.field("a", e.a);
  rb.field("a*r*eta", e.ar_eta);
  rb.field("beta1", e.beta1);
  rb.field("beta2", e.beta2);
  rb.field("q > 1/(eta-1)", e.q_large_enough ? "yes" : "no");
  rb.field("admissible", e.admissible ? "yes" : "no");
  report_condition(rb, "C1", e.c1);
  report_condition(rb, "C2", e.c2);
}

inline void report_constants(ReportBuilder& rb, const BoundConstants& bc,
                             const EpsilonChoice& eps, const GnConstants& gn) {
  rb.section("constants audit");
  rb.field("gn.c1", gn.c1);
  rb.field("gn.c2", gn.c2);
  rb.field("gn.provenance", to_string(gn.provenance));
  rb.field("delta", bc.delta);
  rb.field("D_delta", bc.d_delta);
  rb.field("C1", bc.cfactors.c1);
  rb.field("C2", bc.cfactors.c2);
  rb.field("C2 (alt prefactor)", bc.cfactors.c2_factor_alt);
  rb.field("C3", bc.cfactors.c3);
  rb.field("C4", bc.cfactors.c4);
  rb.field("C5", bc.cfactors.c5);
  rb.field("C6", bc.cfactors.c6);
  rb.field("E1", bc.efactors.e1);
  rb.field("E2", bc.efactors.e2);
  rb.field("eps cap (grad-u)", eps.cap_grad_u);
  rb.field("eps cap (grad-v)", eps.cap_grad_v);
  rb.field("eps cap (grad-v, alt)", eps.cap_grad_v_alt);
  rb.field("eps cap (R-floor)", eps.cap_r_floor);
  rb.field("epsilon", bc.epsilon);
  rb.field("epsilon binding cap", eps.binding_name());
  rb.field("A", bc.A);
  rb.field("B", bc.B);
  rb.field("C", bc.C);
  rb.field("D", bc.D);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommand: validate
// ---------------------------------------------------------------------------

inline int run_validate(const ExperimentConfig& cfg, std::ostream& out) {
  ensure_out_dir(cfg);
  ReportBuilder rb("admissibility report");
  rb.resolved_config(cfg.raw.resolved());

  std::string note;
  bool admissible = false;
  try {
    const ExponentConfig expo = resolve_exponents(cfg, &note);
    admissible = expo.admissible;
    detail::report_exponents(rb, expo);
    if (!note.empty()) rb.field("search", note);
  } catch (const std::domain_error& e) {
    rb.section("exponents");
    rb.field("admissible", "no");
    rb.field("reason", e.what());
  }
  rb.section("verdict");
  rb.field("admissible", admissible ? "yes" : "no");
  rb.write(out_path(cfg, "validate_report.txt"));
  out << rb.finish();
  return admissible ? kExitOk : kExitInadmissible;
}

// ---------------------------------------------------------------------------
// Subcommand: bound
// ---------------------------------------------------------------------------

struct BoundOutcome {
  int exit_code = kExitOk;
  BoundReport quadrature;
  std::optional<BoundReport> closed_form;
  std::string report_hash;
};

inline BoundOutcome run_bound(const ExperimentConfig& cfg, std::ostream& out) {
  ensure_out_dir(cfg);
  ReportBuilder rb("lower bound report");
  rb.resolved_config(cfg.raw.resolved());

  BoundOutcome outcome;
  std::string note;
  ExponentConfig expo;
  try {
    expo = resolve_exponents(cfg, &note);
  } catch (const std::domain_error& e) {
    out << "inadmissible: " << e.what() << "\n";
    outcome.exit_code = kExitInadmissible;
    return outcome;
  }
  detail::report_exponents(rb, expo);
  if (!note.empty()) rb.field("search", note);
  if (!expo.admissible) {
    rb.section("verdict");
    rb.field("admissible", "no");
    rb.write(out_path(cfg, "bound_report.txt"));
    out << "inadmissible configuration; see "
        << out_path(cfg, "bound_report.txt") << "\n";
    outcome.exit_code = kExitInadmissible;
    return outcome;
  }

  const Grid grid = make_grid(cfg.model.domain, cfg.grid_cells);
  const State initial = build_initial_state(cfg, grid);
  const GnResolution gn = resolve_gn(cfg, expo, grid);
  const AssemblyResult assembly = assemble_bound_constants(
      expo, cfg.model, gn.constants, cfg.d_delta.value_or(0.0),
      cfg.delta_override.value_or(-1.0));

  const double phi0 =
      phi_measure(initial, expo.p, expo.q, cfg.model.alpha, grid);
  std::string conditional = gn.provenance;
  if (!cfg.model.domain.convex) conditional += "; user-supplied D_delta";

  outcome.quadrature =
      lower_bound_integral(phi0, assembly.constants, expo, cfg.bound_tol);
  outcome.quadrature.conditional_on = conditional;

  detail::report_constants(rb, assembly.constants, assembly.epsilon_choice,
                           gn.constants);
  rb.section("bound");
  rb.field("Phi(0)", phi0);
  rb.field("t_lower (quadrature)", outcome.quadrature.t_lower);
  rb.field("quadrature error estimate",
           outcome.quadrature.quadrature_error_estimate);
  rb.field("quadrature tolerance", cfg.bound_tol);
  if (phi0 > 0.0 && phi0 < 1.0) {
    outcome.closed_form = closed_form_bound(phi0, assembly.constants, expo);
    outcome.closed_form->conditional_on = conditional;
    rb.field("t_lower (closed form)", outcome.closed_form->t_lower);
    rb.field("closed-form branch", to_string(outcome.closed_form->method));
    rb.field("closed form <= quadrature",
             outcome.closed_form->t_lower <=
                     outcome.quadrature.t_lower +
                         outcome.quadrature.quadrature_error_estimate
                 ? "yes"
                 : "no");
  }
  rb.field("conditional on", conditional);

  outcome.report_hash = rb.hash();
  rb.write(out_path(cfg, "bound_report.txt"));
  out << "admissible (p, q, eta) = (" << expo.p << ", " << expo.q << ", "
      << expo.eta << ")\n"
      << "Phi(0)  = " << csv_number(phi0) << "\n"
      << "t_lower = " << csv_number(outcome.quadrature.t_lower)
      << "  [" << conditional << "]\n";
  if (outcome.closed_form) {
    out << "closed  = " << csv_number(outcome.closed_form->t_lower) << "\n";
  }
  out << "report: " << out_path(cfg, "bound_report.txt") << "\n";
  return outcome;
}

// ---------------------------------------------------------------------------
// Subcommand: simulate
// ---------------------------------------------------------------------------

struct SimulateOutcome {
  int exit_code = kExitOk;
  Trajectory trajectory;
  std::string report_hash;
  std::string energy_csv_path;
};

inline SimulateOutcome run_simulate(const ExperimentConfig& cfg,
                                    std::ostream& out) {
  ensure_out_dir(cfg);
  SimulateOutcome outcome;

  SolverConfig solver = cfg.solver;
  // Energy probes use the experiment exponents when they are available.
  try {
    const ExponentConfig expo = resolve_exponents(cfg);
    solver.p_energy = expo.p;
    solver.q_energy = expo.q;
  } catch (const std::exception&) {
    // keep SolverConfig defaults; simulation does not require admissibility
  }

  const Grid grid = make_grid(cfg.model.domain, cfg.grid_cells);
  const State initial = build_initial_state(cfg, grid);
  outcome.trajectory = simulate(initial, cfg.model, grid, solver);
  const Trajectory& traj = outcome.trajectory;

  outcome.energy_csv_path = out_path(cfg, "energy.csv");
  write_energy_csv(outcome.energy_csv_path, traj.series);
  write_snapshot_csv(out_path(cfg, "snapshot_initial.csv"),
                     traj.snapshots.front().second, grid);
  write_snapshot_csv(out_path(cfg, "snapshot_final.csv"),
                     traj.snapshots.back().second, grid);
  for (std::size_t i = 1; i + 1 < traj.snapshots.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", i);
    write_snapshot_csv(out_path(cfg, name), traj.snapshots[i].second, grid);
  }

  if (cfg.plots) {
    std::vector<std::pair<double, double>> phi_pts, umax_pts;
    for (const auto& s : traj.series.samples) {
      phi_pts.emplace_back(s.t, s.phi);
      umax_pts.emplace_back(s.t, s.u_max);
    }
    const auto spread = [](const std::vector<std::pair<double, double>>& pts) {
      double lo = pts.front().second, hi = lo;
      for (const auto& p : pts) {
        lo = std::min(lo, p.second);
        hi = std::max(hi, p.second);
      }
      return lo > 0.0 && hi / lo > 1e3;
    };
    SvgOptions phi_opt{"Phi(t)", "t", "Phi", spread(phi_pts)};
    write_line_chart(out_path(cfg, "phi_vs_t.svg"), phi_pts, phi_opt);
    SvgOptions umax_opt{"max density", "t", "u_max", spread(umax_pts)};
    write_line_chart(out_path(cfg, "umax_vs_t.svg"), umax_pts, umax_opt);
  }

  const BlowupVerdict& v = traj.verdict;
  ReportBuilder rb("simulation report");
  rb.resolved_config(cfg.raw.resolved());
  rb.section("verdict");
  rb.field("outcome", to_string(v.kind));
  rb.field("threshold trigger", v.threshold_trigger ? "yes" : "no");
  rb.field("dt-underflow trigger", v.dt_underflow_trigger ? "yes" : "no");
  if (v.t_star_estimate) rb.field("t* (max-density fit)", *v.t_star_estimate);
  if (v.t_star_phi) rb.field("t* (Phi fit)", *v.t_star_phi);
  if (v.t_star_estimate) {
    rb.field("low confidence", v.low_confidence ? "yes" : "no");
  }
  rb.field("final t", traj.series.samples.back().t);
  rb.field("final max density", v.final_u_max);
  rb.field("final Phi", v.final_phi);
  rb.field("final max |grad v|", v.final_gradv_max);
  rb.field("mass drift (relative)", v.mass_drift);
  rb.field("clip events", static_cast<double>(v.clip_events));
  rb.field("steps", static_cast<double>(v.steps));
  rb.field("energy samples", static_cast<double>(traj.series.samples.size()));

  outcome.report_hash = rb.hash();
  rb.write(out_path(cfg, "simulate_report.txt"));
  out << "outcome: " << to_string(v.kind) << " after " << v.steps
      << " steps, t = " << csv_number(traj.series.samples.back().t) << "\n";
  if (v.t_star_estimate) {
    out << "t* (max-density fit) = " << csv_number(*v.t_star_estimate) << "\n";
  }
  if (v.t_star_phi) {
    out << "t* (Phi fit)         = " << csv_number(*v.t_star_phi) << "\n";
  }
  out << "energy CSV: " << outcome.energy_csv_path << "\n"
      << "report: " << out_path(cfg, "simulate_report.txt") << "\n";
  return outcome;
}

// ---------------------------------------------------------------------------
// Subcommand: verify
// ---------------------------------------------------------------------------

struct VerifyOutcome {
  int exit_code = kExitOk;
  VerifyReport report;
  std::string report_hash;
};

inline VerifyOutcome run_verify(const ExperimentConfig& cfg,
                                std::ostream& out) {
  ensure_out_dir(cfg);
  VerifyOutcome outcome;

  std::string note;
  std::optional<ExponentConfig> expo;
  try {
    expo = resolve_exponents(cfg, &note);
  } catch (const std::exception& e) {
    note = e.what();
  }

  SolverConfig solver = cfg.solver;
  if (expo) {
    solver.p_energy = expo->p;
    solver.q_energy = expo->q;
  }
  const Grid grid = make_grid(cfg.model.domain, cfg.grid_cells);
  const State initial = build_initial_state(cfg, grid);
  const Trajectory traj = simulate(initial, cfg.model, grid, solver);

  VerifyReport& vr = outcome.report;
  vr.checks.push_back(check_density_energy(traj.series, solver.p_energy,
                                           cfg.model, cfg.verify_tol));
  vr.checks.push_back(check_signal_gradient_energy(
      traj.series, solver.q_energy, cfg.model, cfg.verify_tol));

  if (expo && expo->admissible) {
    const GnResolution gn = resolve_gn(cfg, *expo, grid);
    const AssemblyResult assembly = assemble_bound_constants(
        *expo, cfg.model, gn.constants, cfg.d_delta.value_or(0.0),
        cfg.delta_override.value_or(-1.0));
    std::string conditional = gn.provenance;
    if (!cfg.model.domain.convex) conditional += "; user-supplied D_delta";
    vr.checks.push_back(check_energy_ode(traj.series, assembly.constants,
                                         *expo, cfg.verify_tol, conditional));
  } else {
    CheckResult skipped;
    skipped.name = "energy-ode";
    skipped.skipped = true;
    skipped.tolerance = cfg.verify_tol;
    skipped.note = note.empty()
                       ? "skipped: exponents not admissible, no constants"
                       : "skipped: " + note;
    vr.checks.push_back(skipped);
  }

  ReportBuilder rb("inequality verification report");
  rb.resolved_config(cfg.raw.resolved());
  rb.section("trajectory");
  rb.field("outcome", to_string(traj.verdict.kind));
  rb.field("energy samples",
           static_cast<double>(traj.series.samples.size()));
  rb.section("checks");
  rb.line("name | samples | worst residual | tolerance | verdict | conditional");
  for (const auto& c : vr.checks) {
    std::ostringstream row;
    row << c.name << " | " << c.samples << " | "
        << (c.skipped ? "-" : csv_number(c.worst_residual)) << " | "
        << csv_number(c.tolerance) << " | "
        << (c.skipped ? "SKIP" : (c.pass ? "PASS" : "FAIL")) << " | "
        << (c.conditional ? "yes" : "no");
    if (!c.note.empty()) row << "  (" << c.note << ")";
    rb.line(row.str());
  }

  outcome.report_hash = rb.hash();
  rb.write(out_path(cfg, "verify_report.txt"));
  out << rb.finish();
  outcome.exit_code = vr.all_passed() ? kExitOk : kExitInadmissible;
  return outcome;
}

// ---------------------------------------------------------------------------
// Subcommand: sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  double m1 = 0.0;
  double p = 0.0, q = 0.0;
  double phi0 = 0.0;
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  double t_lb = 0.0;
  std::optional<double> t_star_observed;
  std::string verdict;
  bool admissible = false;
  double f_r = 0.0;
};

struct SweepOutcome {
  int exit_code = kExitOk;
  std::vector<SweepRow> rows;
  std::string report_hash;
};

inline SweepOutcome run_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  ensure_out_dir(cfg);
  SweepOutcome outcome;
  if (cfg.sweep_m1.empty()) {
    throw ConfigError("sweep requires sweep.m1 = <comma-separated list>");
  }
  if (cfg.exponent_search) {
    throw ConfigError("sweep requires explicit exponents.p / exponents.q");
  }

  const Grid grid = make_grid(cfg.model.domain, cfg.grid_cells);
  const State initial = build_initial_state(cfg, grid);

  std::vector<double> m1_values = cfg.sweep_m1;
  std::sort(m1_values.begin(), m1_values.end());

  // Frozen mode: one set of constants from the base model, only the exponent
  // f(eta, r(m1)) varies across rows.
  std::optional<BoundConstants> frozen;
  if (cfg.sweep_frozen) {
    const ExponentConfig base = derive_exponents(cfg.model, cfg.p, cfg.q, cfg.eta);
    if (!base.admissible) {
      out << "base configuration inadmissible; frozen sweep needs admissible "
             "(p, q) at model.m1\n";
      outcome.exit_code = kExitInadmissible;
      return outcome;
    }
    const GnResolution gn = resolve_gn(cfg, base, grid);
    frozen = assemble_bound_constants(base, cfg.model, gn.constants,
                                      cfg.d_delta.value_or(0.0),
                                      cfg.delta_override.value_or(-1.0))
                 .constants;
  }

  const auto run_row = [&](double m1) {
    SweepRow row;
    row.m1 = m1;
    row.p = cfg.p;
    row.q = cfg.q;
    ModelParams params = cfg.model;
    params.m1 = m1;
    try {
      const ExponentConfig expo = derive_exponents(params, cfg.p, cfg.q, cfg.eta);
      row.admissible = expo.admissible;
      row.f_r = expo.f_r;
      row.phi0 = phi_measure(initial, expo.p, expo.q, params.alpha, grid);
      if (!expo.admissible) {
        row.verdict = "inadmissible";
        return row;
      }
      BoundConstants bc;
      if (frozen) {
        bc = *frozen;
      } else {
        const GnResolution gn = resolve_gn(cfg, expo, grid);
        bc = assemble_bound_constants(expo, params, gn.constants,
                                      cfg.d_delta.value_or(0.0),
                                      cfg.delta_override.value_or(-1.0))
                 .constants;
      }
      row.A = bc.A;
      row.B = bc.B;
      row.C = bc.C;
      row.D = bc.D;
      row.t_lb = lower_bound_integral(row.phi0, bc, expo, cfg.bound_tol).t_lower;
      row.verdict = "ok";
      if (cfg.sweep_simulate) {
        SolverConfig solver = cfg.solver;
        solver.p_energy = expo.p;
        solver.q_energy = expo.q;
        const Trajectory traj = simulate(initial, params, grid, solver);
        row.verdict = to_string(traj.verdict.kind);
        if (traj.verdict.t_star_estimate) {
          row.t_star_observed = traj.verdict.t_star_estimate;
        }
      }
    } catch (const std::exception& e) {
      row.verdict = std::string("error: ") + e.what();
    }
    return row;
  };

  // Share-nothing workers, deterministic row order on collection.
  std::vector<std::future<SweepRow>> futures;
  futures.reserve(m1_values.size());
  for (const double m1 : m1_values) {
    futures.push_back(std::async(std::launch::async, run_row, m1));
  }
  for (auto& f : futures) outcome.rows.push_back(f.get());

  CsvWriter csv(out_path(cfg, "sweep.csv"),
                "m1,p,q,phi0,A,B,C,D,t_lb,t_star_observed,verdict");
  std::vector<std::pair<double, double>> tlb_pts;
  for (const auto& row : outcome.rows) {
    csv.row(std::vector<std::string>{
        csv_number(row.m1), csv_number(row.p), csv_number(row.q),
        csv_number(row.phi0), csv_number(row.A), csv_number(row.B),
        csv_number(row.C), csv_number(row.D), csv_number(row.t_lb),
        row.t_star_observed ? csv_number(*row.t_star_observed) : "none",
        row.verdict});
    if (row.admissible) tlb_pts.emplace_back(row.m1, row.t_lb);
  }
  if (cfg.plots) {
    SvgOptions opt{"lower bound vs diffusion exponent", "m1", "t_lb", false};
    write_line_chart(out_path(cfg, "tlb_vs_m1.svg"), tlb_pts, opt);
  }

  // In frozen mode the bound must not decrease as m1 grows.
  bool monotone_ok = true;
  if (cfg.sweep_frozen) {
    for (std::size_t i = 0; i + 1 < tlb_pts.size(); ++i) {
      if (tlb_pts[i + 1].second <
          tlb_pts[i].second * (1.0 - 1e-9)) {
        monotone_ok = false;
      }
    }
  }

  ReportBuilder rb("diffusion-exponent sweep report");
  rb.resolved_config(cfg.raw.resolved());
  rb.section("rows");
  rb.line("m1 | f(eta,r) | t_lb | t* | verdict");
  for (const auto& row : outcome.rows) {
    std::ostringstream line;
    line << csv_number(row.m1) << " | " << csv_number(row.f_r) << " | "
         << csv_number(row.t_lb) << " | "
         << (row.t_star_observed ? csv_number(*row.t_star_observed) : "none")
         << " | " << row.verdict;
    rb.line(line.str());
  }
  if (cfg.sweep_frozen) {
    rb.section("frozen-constants monotonicity");
    rb.field("t_lb nondecreasing in m1", monotone_ok ? "yes" : "no");
  }

  outcome.report_hash = rb.hash();
  rb.write(out_path(cfg, "sweep_report.txt"));
  out << rb.finish();
  if (!monotone_ok) outcome.exit_code = kExitInadmissible;
  return outcome;
}

}  // namespace ksbound
