// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "ksbound/experiment.hpp"

using namespace ksbound;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using CriterionFn = std::function<Outcome()>;

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --------------------------------------------------------------------------
// 1. Exponent arithmetic
// --------------------------------------------------------------------------
Outcome criterion_exponents() {
  Outcome out;
  out.pass &= close(exponent_f(1.5, 1.0, 3), 3.0, 1e-12);
  out.pass &= close(exponent_f(1.5, 0.8, 3), 1.8, 1e-12);
  out.pass &= close(gn_exponent_a(1.0, 1.5, 3), 0.5, 1e-12);
  Rng rng(20250101);
  const auto samples = testing::random_admissible(rng, 1000);
  out.pass &= samples.size() == 1000;
  double worst = 0.0;
  for (const auto& s : samples) {
    const double via_a =
        (1.0 - s.config.a) * s.config.eta / (1.0 - s.config.ar_eta);
    worst = std::max(worst,
                     std::abs(s.config.f_r - via_a) / std::abs(s.config.f_r));
  }
  out.pass &= worst <= 1e-12;
  out.detail = "identity worst rel err " + fmt(worst) + " over " +
               std::to_string(samples.size()) + " configs";
  return out;
}

// --------------------------------------------------------------------------
// 2. Condition gates with independent re-evaluation
// --------------------------------------------------------------------------
Outcome criterion_gates() {
  Outcome out;
  const ModelParams params = testing::worked_params();
  const ExponentConfig good = derive_exponents(params, 4.0, 4.0);
  const ExponentConfig bad = derive_exponents(params, 3.0, 4.0);
  out.pass &= good.admissible;
  out.pass &= !bad.admissible;

  // Brute-force re-evaluation of each max-term.
  const double c1_terms[3] = {0.5 * 3 * (2 - 1), 3.0 * (2 - 1 - 1), 3.0};
  double c1_max = c1_terms[0];
  int c1_arg = 0;
  for (int i = 1; i < 3; ++i) {
    if (c1_terms[i] > c1_max) { c1_max = c1_terms[i]; c1_arg = i; }
  }
  out.pass &= good.c1.pass == (4.0 > c1_max);
  out.pass &= static_cast<int>(good.c1.binding) == c1_arg;
  out.pass &= bad.c1.pass == (3.0 > c1_max);
  out.pass &= static_cast<int>(bad.c1.binding) == c1_arg;

  const double q = 4.0, eta = 1.5, m1 = 1.0, m2 = 2.0;
  const double c2_terms[4] = {
      q * (2 * m2 - m1 - 3) / (q * eta - q - 1), -2 * m2 + m1 + 3,
      2 * q / (q * eta - q + 1), eta * (m1 - 1) / ((eta - 1) * (eta - 2))};
  double c2_max = c2_terms[0];
  int c2_arg = 0;
  for (int i = 1; i < 4; ++i) {
    if (c2_terms[i] > c2_max) { c2_max = c2_terms[i]; c2_arg = i; }
  }
  out.pass &= good.c2.pass == (4.0 > c2_max);
  out.pass &= static_cast<int>(good.c2.binding) == c2_arg;
  out.detail = "(4,4) admissible, (3,4) inadmissible, binding terms match";
  return out;
}

// --------------------------------------------------------------------------
// 3. Constants audit of the worked configuration
// --------------------------------------------------------------------------
Outcome criterion_constants() {
  Outcome out;
  const ModelParams params = testing::worked_params();
  const ExponentConfig cfg = derive_exponents(params, 4.0, 4.0);
  const CFactors cf = assemble_c_factors(cfg, testing::unit_gn());
  const EFactors ef = assemble_e_factors(cfg, params);
  const AssemblyResult res =
      assemble_bound_constants(cfg, params, testing::unit_gn());
  out.pass &= close(ef.e1, 5.0, 1e-12);
  out.pass &= close(ef.e2, 4.0, 1e-12);
  out.pass &= close(cf.c1, 3.0, 1e-12);
  out.pass &= close(cf.c2, 2.0, 1e-12);
  out.pass &= close(cf.c4, 3.0, 1e-12);
  out.pass &= close(res.constants.epsilon, 1.0 / 64.0, 1e-12);
  out.pass &= close_rel(res.constants.A, 2560.0, 1e-12);
  out.pass &= close_rel(res.constants.C, 288.0, 1e-12);
  out.pass &= res.constants.D == 0.0;
  out.detail = "E1=" + fmt(ef.e1) + " E2=" + fmt(ef.e2) + " eps=" +
               fmt(res.constants.epsilon) + " A=" + fmt(res.constants.A) +
               " C=" + fmt(res.constants.C);
  return out;
}

// --------------------------------------------------------------------------
// 4. Quadrature oracles and closed-form ordering
// --------------------------------------------------------------------------
Outcome criterion_quadrature() {
  Outcome out;
  ExponentConfig cfg = testing::worked_exponents();
  BoundConstants bc;
  bc.A = 1.0;

  cfg.f_r = 2.0;
  out.pass &= close(lower_bound_integral(1.0, bc, cfg).t_lower, 1.0, 1e-8);
  cfg.f_r = 3.0;
  out.pass &= close(lower_bound_integral(1.0, bc, cfg).t_lower, 0.5, 1e-8);
  cfg.f_r = 2.0;
  bc.D = 1.0;
  out.pass &= close(lower_bound_integral(0.0, bc, cfg).t_lower,
                    2.0 * std::atan(1.0), 1e-8);

  Rng rng(44100);
  const auto samples = testing::random_admissible(rng, 100);
  out.pass &= samples.size() == 100;
  int ordered = 0;
  for (const auto& s : samples) {
    const AssemblyResult res =
        assemble_bound_constants(s.config, s.params, testing::unit_gn());
    const double phi0 = rng.uniform(0.01, 0.99);
    const BoundReport quad = lower_bound_integral(phi0, res.constants, s.config);
    const BoundReport closed = closed_form_bound(phi0, res.constants, s.config);
    if (closed.t_lower <=
        quad.t_lower + quad.quadrature_error_estimate + 1e-15) {
      ++ordered;
    }
  }
  out.pass &= ordered == 100;
  out.detail = "tail oracles ok; closed form <= quadrature on " +
               std::to_string(ordered) + "/100 random configs";
  return out;
}

// --------------------------------------------------------------------------
// 5. Frozen-constants diffusion-exponent sweep
// --------------------------------------------------------------------------
Outcome criterion_m1_effect() {
  Outcome out;
  const ModelParams params = testing::worked_params();
  const BoundConstants frozen =
      assemble_bound_constants(testing::worked_exponents(), params,
                               testing::unit_gn())
          .constants;
  std::vector<M1SweepEntry> entries;
  const CheckResult check = check_m1_monotonicity(
      params, 4.0, 4.0, {1.0, 1.5, 2.0, 3.0}, frozen, 4.0, &entries);
  out.pass &= check.pass;
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    out.pass &= entries[i].f_r > entries[i + 1].f_r;
    out.pass &= entries[i + 1].t_lb >= entries[i].t_lb * (1.0 - 1e-9);
  }
  std::string fs, ts;
  for (const auto& e : entries) {
    fs += fmt(e.f_r) + " ";
    ts += fmt(e.t_lb) + " ";
  }
  out.detail = "f: " + fs + "| t_lb: " + ts;
  return out;
}

// --------------------------------------------------------------------------
// 6. Solver quality: mass conservation and convergence order
// --------------------------------------------------------------------------
Outcome criterion_solver_quality() {
  Outcome out;
  constexpr double kPi = 3.14159265358979323846;

  ModelParams params;
  params.n = 1;
  params.m1 = 1.0;
  params.m2 = 2.0;
  params.chi = 1e-300;
  params.alpha = 1.0;
  params.domain = DomainSpec::interval(1.0);

  const double t_end = 0.1;
  std::vector<double> errors;
  double worst_drift = 0.0;
  for (const std::size_t cells : {64u, 128u, 256u}) {
    const Grid grid = make_grid(params.domain, cells);
    State s;
    s.u.resize(cells);
    s.v.assign(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
      s.u[i] = 2.0 + std::cos(kPi * grid.centers[i]);
    }
    SolverConfig cfg;
    cfg.t_end = t_end;
    cfg.sample_stride = 100000;
    cfg.step_rel_tol = 1.0;
    const Trajectory traj = simulate(s, params, grid, cfg);
    worst_drift = std::max(worst_drift, traj.verdict.mass_drift);
    double err = 0.0;
    const State& last = traj.snapshots.back().second;
    for (std::size_t i = 0; i < cells; ++i) {
      const double exact =
          2.0 + std::cos(kPi * grid.centers[i]) * std::exp(-kPi * kPi * t_end);
      err = std::max(err, std::abs(last.u[i] - exact));
    }
    errors.push_back(err);
  }
  const double order1 = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  out.pass &= worst_drift < 1e-8;
  out.pass &= order1 >= 1.7 && order1 <= 2.3;
  out.pass &= order2 >= 1.7 && order2 <= 2.3;

  // A chemotaxis run must conserve mass as well.
  ModelParams chem = params;
  chem.chi = 1.0;
  const Grid grid = make_grid(chem.domain, 96);
  State s;
  s.u.resize(96);
  s.v.assign(96, 0.0);
  for (std::size_t i = 0; i < 96; ++i) {
    const double x = grid.centers[i];
    s.u[i] = 1.0 + 2.0 * std::exp(-30.0 * (x - 0.5) * (x - 0.5));
  }
  SolverConfig cfg;
  cfg.t_end = 0.2;
  cfg.sample_stride = 50;
  const Trajectory traj = simulate(s, chem, grid, cfg);
  out.pass &= traj.verdict.kind == RunOutcome::completed_horizon;
  out.pass &= traj.verdict.mass_drift < 1e-8;

  out.detail = "orders " + fmt(order1) + ", " + fmt(order2) +
               "; worst mass drift " +
               fmt(std::max(worst_drift, traj.verdict.mass_drift));
  return out;
}

// --------------------------------------------------------------------------
// 7. Inequality audits
// --------------------------------------------------------------------------
Outcome criterion_inequality_audits() {
  Outcome out;
  ModelParams params;
  params.n = 1;
  params.m1 = 1.0;
  params.m2 = 2.0;
  params.chi = 1e-300;
  params.alpha = 1.0;
  params.domain = DomainSpec::interval(1.0);
  const Grid grid = make_grid(params.domain, 96);

  State s;
  s.u.resize(grid.cells);
  s.v.assign(grid.cells, 0.0);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double x = grid.centers[i];
    s.u[i] = 1.0 + 2.0 * std::exp(-30.0 * (x - 0.5) * (x - 0.5));
  }
  SolverConfig cfg;
  cfg.t_end = 0.2;
  cfg.sample_stride = 20;
  cfg.p_energy = 4.0;
  cfg.q_energy = 4.0;

  // Unconditional: chi = 0 run.
  const Trajectory dissipative = simulate(s, params, grid, cfg);
  const CheckResult u0 =
      check_density_energy(dissipative.series, 4.0, params);
  const CheckResult v0 =
      check_signal_gradient_energy(dissipative.series, 4.0, params);

  // Generic chemotaxis run on the convex interval.
  ModelParams chem = params;
  chem.chi = 1.0;
  const Trajectory generic = simulate(s, chem, grid, cfg);
  const CheckResult u1 = check_density_energy(generic.series, 4.0, chem);
  const CheckResult v1 =
      check_signal_gradient_energy(generic.series, 4.0, chem);

  out.pass &= u0.pass && v0.pass && u1.pass && v1.pass;
  out.pass &= u0.worst_residual >= -1e-3 && u1.worst_residual >= -1e-3;
  out.pass &= v0.worst_residual >= -1e-3 && v1.worst_residual >= -1e-3;
  out.detail = "worst residuals: chi0 " + fmt(u0.worst_residual) + "/" +
               fmt(v0.worst_residual) + ", generic " +
               fmt(u1.worst_residual) + "/" + fmt(v1.worst_residual);
  return out;
}

// --------------------------------------------------------------------------
// 8. End-to-end bound sanity on a radial blow-up run
// --------------------------------------------------------------------------
Outcome criterion_end_to_end() {
  Outcome out;
  ModelParams params;
  params.n = 2;
  params.m1 = 1.0;
  params.m2 = 3.0;
  params.chi = 1.0;
  params.alpha = 1.0;
  params.domain = DomainSpec::ball(1.0, 2);
  const Grid grid = make_grid(params.domain, 512);

  const double p = 7.0, q = 6.0;
  const ExponentConfig cfg = derive_exponents(params, p, q);
  if (!cfg.admissible) return {false, "(7,6) unexpectedly inadmissible"};

  // Estimated GN constants (with safety factor) feed the bound.
  const GnEstimateSpec density_spec{2.0 * cfg.r * cfg.eta, 2.0 * cfg.r,
                                    2.0 * cfg.r, cfg.a};
  const GnEstimateSpec gradient_spec{2.0 * cfg.eta, 2.0, 2.0, 0.5};
  GnConstants gn;
  gn.c1 = 2.0 * estimate_gn_constant(density_spec, grid, 300);
  gn.c2 = 2.0 * estimate_gn_constant(gradient_spec, grid, 300);
  gn.provenance = GnProvenance::empirically_estimated;
  const AssemblyResult res = assemble_bound_constants(cfg, params, gn);

  State s;
  s.u.resize(grid.cells);
  s.v.assign(grid.cells, 0.0);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double r = grid.centers[i];
    s.u[i] = 1500.0 * std::exp(-0.5 * r * r / (0.08 * 0.08));
  }

  SolverConfig solver;
  solver.t_end = 0.5;
  solver.sample_stride = 10;
  solver.u_blowup_threshold = 1e5;
  solver.dt_min = 1e-13;
  solver.p_energy = p;
  solver.q_energy = q;
  const Trajectory traj = simulate(s, params, grid, solver);
  if (traj.verdict.kind != RunOutcome::blowup_detected) {
    return {false, std::string("expected blow-up, got ") +
                       to_string(traj.verdict.kind)};
  }
  const double t_star = *traj.verdict.t_star_estimate;
  const double t_star_phi = *traj.verdict.t_star_phi;

  const double phi0 = phi_measure(s, p, q, params.alpha, grid);
  const double t_lb = lower_bound_integral(phi0, res.constants, cfg).t_lower;

  out.pass &= t_lb <= t_star;
  const double agreement =
      std::abs(t_star - t_star_phi) / std::max(t_star, 1e-300);
  out.pass &= agreement <= 0.05;
  out.detail = "t_lb " + fmt(t_lb) + " <= t* " + fmt(t_star) +
               "; Phi-fit " + fmt(t_star_phi) + " (gap " +
               fmt(agreement * 100.0) + "%)";
  return out;
}

// --------------------------------------------------------------------------
// 9. Blow-up detector self-test
// --------------------------------------------------------------------------
Outcome criterion_detector() {
  Outcome out;
  std::vector<std::pair<double, double>> series;
  for (int k = 0; k <= 48; ++k) {
    const double m = std::pow(10.0, k / 8.0);
    series.emplace_back(1.0 - 1.0 / m, m);
  }
  const DivergenceFit fit = detect_blowup(series, 1e6);
  out.pass = std::abs(fit.t_star - 1.0) <= 1e-3 && !fit.low_confidence;
  out.detail = "recovered t* = " + fmt(fit.t_star);
  return out;
}

// --------------------------------------------------------------------------
// 10. Determinism of the harness artifacts
// --------------------------------------------------------------------------
Outcome criterion_determinism() {
  Outcome out;
  const auto base_dir =
      std::filesystem::temp_directory_path() / "ksbound_acceptance";
  std::filesystem::remove_all(base_dir);

  const std::string config_text =
      "model.n = 1\n"
      "model.m1 = 1\n"
      "model.m2 = 2\n"
      "domain.geometry = interval\n"
      "grid.cells = 64\n"
      "exponents.p = 4\n"
      "exponents.q = 4\n"
      "initial.u = gaussian(2, 0.15, 0.5)\n"
      "initial.v = constant(0)\n"
      "initial.noise = 0.1\n"
      "solver.t_end = 0.05\n"
      "solver.seed = 42\n"
      "output.plots = false\n";

  std::string hashes[2], energy[2];
  const auto dir = base_dir / "run";
  std::filesystem::create_directories(dir);
  for (int run = 0; run < 2; ++run) {
    const auto cfg = load_experiment(KeyValueConfig::from_string(
        config_text + "output.dir = " + dir.string() + "\n"));
    std::ostringstream sink;
    const SimulateOutcome sim = run_simulate(cfg, sink);
    hashes[run] = sim.report_hash;
    energy[run] = slurp(dir / "energy.csv");
  }
  out.pass = hashes[0] == hashes[1] && energy[0] == energy[1] &&
             !energy[0].empty();
  out.detail = "report hash " + hashes[0] +
               (out.pass ? " reproduced" : " NOT reproduced");
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    CriterionFn fn;
  };
  const std::vector<Entry> criteria = {
      {1, "exponent arithmetic", criterion_exponents},
      {2, "condition gates", criterion_gates},
      {3, "constants audit", criterion_constants},
      {4, "quadrature", criterion_quadrature},
      {5, "m1 effect (frozen constants)", criterion_m1_effect},
      {6, "solver quality", criterion_solver_quality},
      {7, "inequality audits", criterion_inequality_audits},
      {8, "end-to-end bound sanity", criterion_end_to_end},
      {9, "blow-up detector self-test", criterion_detector},
      {10, "determinism", criterion_determinism},
  };

  int failed = 0;
  for (const auto& entry : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %2d: %s  (%s) [%.2fs]\n",
                outcome.pass ? "PASS" : "FAIL", entry.id, entry.label,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failed;
  }
  std::printf("ACCEPTANCE: %zu/%zu criteria passed\n",
              criteria.size() - failed, criteria.size());
  return failed;
}
