#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "ksbound/solver.hpp"

using namespace ksbound;
using Catch::Approx;

namespace {

constexpr double kPi = 3.14159265358979323846;

ModelParams interval_model(double m1, double m2, double chi) {
  ModelParams params;
  params.n = 1;
  params.m1 = m1;
  params.m2 = m2;
  params.chi = chi;
  params.alpha = 1.0;
  params.domain = DomainSpec::interval(1.0);
  return params;
}

State cosine_state(const Grid& grid, double mean, double amp, int mode) {
  State s;
  s.u.resize(grid.cells);
  s.v.assign(grid.cells, 0.0);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    s.u[i] = mean + amp * std::cos(mode * kPi * grid.centers[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("rhs on constant states") {
  const ModelParams params = interval_model(1.0, 2.0, 1e-12);
  const Grid grid = make_grid(params.domain, 32);

  SECTION("uniform density does not move") {
    ModelParams no_chem = params;
    no_chem.chi = 1e-300;  // chi > 0 required; effectively zero
    State s;
    s.u.assign(grid.cells, 2.0);
    s.v.assign(grid.cells, 0.0);
    const Derivatives d = rhs(s, no_chem, grid);
    for (const double du : d.du) CHECK(du == 0.0);
  }

  SECTION("constant fields reduce to the reaction terms") {
    State s;
    s.u.assign(grid.cells, 3.0);
    s.v.assign(grid.cells, 1.25);
    const Derivatives d = rhs(s, params, grid);
    for (std::size_t i = 0; i < grid.cells; ++i) {
      CHECK(d.du[i] == 0.0);
      CHECK(d.dv[i] == Approx(3.0 - 1.25).epsilon(1e-14));
    }
  }

  SECTION("negative input is rejected") {
    State s;
    s.u.assign(grid.cells, 1.0);
    s.v.assign(grid.cells, 0.0);
    s.u[3] = -0.5;
    CHECK_THROWS_WITH(rhs(s, params, grid),
                      Catch::Matchers::ContainsSubstring("invalid-state"));
  }
}

TEST_CASE("rhs conserves discrete mass on random states") {
  Rng rng(404);
  for (const DomainSpec spec :
       {DomainSpec::interval(1.0), DomainSpec::ball(1.0, 2)}) {
    ModelParams params = interval_model(1.5, 2.5, 0.8);
    params.n = spec.dim;
    params.domain = spec;
    const Grid grid = make_grid(spec, 48);
    for (int trial = 0; trial < 20; ++trial) {
      State s;
      s.u.resize(grid.cells);
      s.v.resize(grid.cells);
      for (std::size_t i = 0; i < grid.cells; ++i) {
        s.u[i] = rng.uniform(0.0, 3.0);
        s.v[i] = rng.uniform(0.0, 2.0);
      }
      const Derivatives d = rhs(s, params, grid);
      double total = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < grid.cells; ++i) {
        total += d.du[i] * grid.volumes[i];
        scale += std::abs(d.du[i]) * grid.volumes[i];
      }
      CHECK(std::abs(total) <= 1e-12 * std::max(scale, 1.0));
    }
  }
}

TEST_CASE("manufactured heat solution converges at second order") {
  // chi ~ 0, m1 = 1: u(x,t) = 2 + cos(pi x) exp(-pi^2 t) solves the density
  // equation with zero-flux boundaries.
  const double t_end = 0.1;
  std::vector<double> errors;
  for (const std::size_t cells : {64u, 128u, 256u}) {
    ModelParams params = interval_model(1.0, 2.0, 1e-300);
    const Grid grid = make_grid(params.domain, cells);
    State s = cosine_state(grid, 2.0, 1.0, 1);

    SolverConfig cfg;
    cfg.t_end = t_end;
    cfg.sample_stride = 1000000;  // endpoints only
    cfg.step_rel_tol = 1.0;       // stability-capped dt, no rejection noise
    const Trajectory traj = simulate(s, params, grid, cfg);

    double err = 0.0;
    const State& last = traj.snapshots.back().second;
    for (std::size_t i = 0; i < grid.cells; ++i) {
      const double exact =
          2.0 + std::cos(kPi * grid.centers[i]) * std::exp(-kPi * kPi * t_end);
      err = std::max(err, std::abs(last.u[i] - exact));
    }
    errors.push_back(err);
  }
  const double ratio1 = errors[0] / errors[1];
  const double ratio2 = errors[1] / errors[2];
  CHECK(ratio1 > 3.2);
  CHECK(ratio1 < 4.8);
  CHECK(ratio2 > 3.2);
  CHECK(ratio2 < 4.8);
}

TEST_CASE("pure diffusion settles to the spatial mean") {
  ModelParams params = interval_model(1.0, 2.0, 1e-300);
  const Grid grid = make_grid(params.domain, 128);
  State s = cosine_state(grid, 2.0, 1.0, 2);

  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.sample_stride = 500;
  const Trajectory traj = simulate(s, params, grid, cfg);
  REQUIRE(traj.verdict.kind == RunOutcome::completed_horizon);

  const State& last = traj.snapshots.back().second;
  double deviation = 0.0;
  for (const double u : last.u) deviation = std::max(deviation, std::abs(u - 2.0));
  CHECK(deviation < 1e-6);
  CHECK(traj.verdict.clip_events == 0);
  CHECK(traj.verdict.mass_drift < 1e-8);
}

TEST_CASE("clipping disabled keeps negatives at roundoff scale") {
  ModelParams params = interval_model(1.0, 2.0, 1e-300);
  const Grid grid = make_grid(params.domain, 64);
  State s = cosine_state(grid, 1.0, 1.0, 1);  // touches zero at the boundary

  SolverConfig cfg;
  cfg.t_end = 0.05;
  cfg.clip_negative = false;
  cfg.sample_stride = 100000;
  const Trajectory traj = simulate(s, params, grid, cfg);
  double min_u = 0.0;
  for (const double u : traj.snapshots.back().second.u) {
    min_u = std::min(min_u, u);
  }
  CHECK(min_u >= -1e-10);
}

TEST_CASE("accepted steps respect the stability cap") {
  ModelParams params = interval_model(2.0, 2.0, 1.0);
  const Grid grid = make_grid(params.domain, 48);
  Rng rng(5);
  State s;
  s.u.resize(grid.cells);
  s.v.resize(grid.cells);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    s.u[i] = rng.uniform(0.5, 2.0);
    s.v[i] = rng.uniform(0.0, 1.0);
  }
  SolverConfig cfg;
  cfg.t_end = 1.0;
  for (int step = 0; step < 25; ++step) {
    const double cap = cfg.cfl_safety * stable_dt(s, params, grid);
    const StepResult sr = step_adaptive(s, params, grid, cfg, 0.0, cfg.t_end);
    REQUIRE_FALSE(sr.underflow);
    CHECK(sr.dt_used <= cap * (1.0 + 1e-12));
  }
}

TEST_CASE("subcritical interval run completes the horizon") {
  // m2 < m1 + 2/n keeps the density bounded.
  ModelParams params = interval_model(1.0, 2.0, 1.0);
  const Grid grid = make_grid(params.domain, 96);
  State s;
  s.u.resize(grid.cells);
  s.v.assign(grid.cells, 0.0);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double x = grid.centers[i];
    s.u[i] = 1.0 + 2.0 * std::exp(-40.0 * (x - 0.5) * (x - 0.5));
  }
  SolverConfig cfg;
  cfg.t_end = 0.3;
  cfg.sample_stride = 50;
  cfg.p_energy = 4.0;
  cfg.q_energy = 4.0;
  const Trajectory traj = simulate(s, params, grid, cfg);
  CHECK(traj.verdict.kind == RunOutcome::completed_horizon);
  CHECK(traj.verdict.final_u_max < 10.0);
  CHECK(traj.verdict.mass_drift < 1e-8);
  CHECK(traj.verdict.clip_events == 0);

  SECTION("energy sample times are strictly increasing") {
    const auto& samples = traj.series.samples;
    for (std::size_t k = 1; k < samples.size(); ++k) {
      CHECK(samples[k].t > samples[k - 1].t);
    }
  }
}

TEST_CASE("supercritical radial run detects blow-up") {
  // m2 > m1 + 2/n with concentrated mass in the plane.
  ModelParams params;
  params.n = 2;
  params.m1 = 1.0;
  params.m2 = 3.0;
  params.chi = 1.0;
  params.alpha = 1.0;
  params.domain = DomainSpec::ball(1.0, 2);
  const Grid grid = make_grid(params.domain, 128);

  State s;
  s.u.resize(grid.cells);
  s.v.assign(grid.cells, 0.0);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double r = grid.centers[i];
    s.u[i] = 400.0 * std::exp(-0.5 * r * r / (0.12 * 0.12));
  }

  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.sample_stride = 10;
  cfg.u_blowup_threshold = 1e5;
  cfg.p_energy = 4.0;
  cfg.q_energy = 4.0;
  const Trajectory traj = simulate(s, params, grid, cfg);
  REQUIRE(traj.verdict.kind == RunOutcome::blowup_detected);
  REQUIRE(traj.verdict.t_star_estimate.has_value());
  REQUIRE(traj.verdict.t_star_phi.has_value());
  const double t_last = traj.series.samples.back().t;
  CHECK(*traj.verdict.t_star_estimate >= t_last);
  CHECK(*traj.verdict.t_star_phi >= t_last);
}

TEST_CASE("identical seeds reproduce identical energy series") {
  ModelParams params = interval_model(1.0, 2.0, 1.0);
  const Grid grid = make_grid(params.domain, 48);
  Rng noise(99);
  State s;
  s.u.resize(grid.cells);
  s.v.assign(grid.cells, 0.0);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    s.u[i] = 1.0 + noise.uniform(0.0, 0.1);
  }
  SolverConfig cfg;
  cfg.t_end = 0.05;
  cfg.sample_stride = 7;

  const Trajectory a = simulate(s, params, grid, cfg);
  const Trajectory b = simulate(s, params, grid, cfg);
  REQUIRE(a.series.samples.size() == b.series.samples.size());
  for (std::size_t k = 0; k < a.series.samples.size(); ++k) {
    CHECK(a.series.samples[k].t == b.series.samples[k].t);
    CHECK(a.series.samples[k].phi == b.series.samples[k].phi);
    CHECK(a.series.samples[k].u_max == b.series.samples[k].u_max);
    CHECK(a.series.samples[k].mass == b.series.samples[k].mass);
  }
}

TEST_CASE("blow-up detector on synthetic series") {
  SECTION("first-order pole recovers t* = 1") {
    std::vector<std::pair<double, double>> series;
    for (int k = 0; k <= 48; ++k) {
      const double m = std::pow(10.0, k / 8.0);  // up to 1e6
      series.emplace_back(1.0 - 1.0 / m, m);
    }
    const DivergenceFit fit = detect_blowup(series, 1e6);
    CHECK_FALSE(fit.low_confidence);
    CHECK(fit.t_star == Approx(1.0).margin(1e-3));
  }

  SECTION("second-order pole stays within 5e-3") {
    std::vector<std::pair<double, double>> series;
    for (int k = 0; k <= 96; ++k) {
      const double m = std::pow(10.0, k / 16.0);  // up to 1e6
      series.emplace_back(1.0 - 1.0 / std::sqrt(m), m);
    }
    const DivergenceFit fit = detect_blowup(series, 1e6);
    CHECK(fit.t_star == Approx(1.0).margin(5e-3));
  }

  SECTION("below threshold is a precondition violation") {
    std::vector<std::pair<double, double>> series{{0.0, 5.0}, {1.0, 5.0}};
    CHECK_THROWS_AS(detect_blowup(series, 1e6), std::invalid_argument);
  }

  SECTION("non-decaying tail is low confidence") {
    std::vector<std::pair<double, double>> series{
        {0.0, 2e6}, {0.5, 1.5e6}, {1.0, 1.2e6}};
    const DivergenceFit fit = detect_blowup(series, 1e6);
    CHECK(fit.low_confidence);
    CHECK(fit.t_star == 1.0);
  }
}
