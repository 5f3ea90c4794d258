#pragma once

/// @file solver.hpp
/// @brief Explicit adaptive time integration of the chemotaxis system with
///        zero-flux boundaries, plus blow-up detection.
///
/// Fluxes are finite-volume at faces: centered on diffusion, first-order
/// upwind on the chemotactic advection (positivity robustness near steep
/// gradients). The step is a two-stage second-order (Heun) update under a
/// quadratic stability cap, with step-doubling error control that halves dt
/// on failure. Negative values are clipped at 0 and every clip is counted;
/// a subcritical run that clips is a quality-gate failure, not noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ksbound/field.hpp"
#include "ksbound/grid.hpp"

namespace ksbound {

struct SolverConfig {
  double cfl_safety = 0.9;          ///< in (0, 1]
  double dt_min = 1e-12;            ///< smallest allowed step
  double u_blowup_threshold = 1e8;  ///< density ceiling triggering detection
  double t_end = 1.0;               ///< horizon
  int sample_stride = 10;           ///< steps between energy samples
  std::uint64_t seed = 0;           ///< seed for randomized initial data
  double p_energy = 2.0;            ///< p of the recorded Phi
  double q_energy = 2.0;            ///< q of the recorded Phi
  double step_rel_tol = 1e-4;       ///< step-doubling acceptance tolerance
  bool clip_negative = true;
  int snapshot_stride = 0;          ///< extra snapshots every k samples (0: none)

  void validate() const {
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
      throw std::invalid_argument("SolverConfig: cfl_safety must be in (0,1]");
    }
    if (!(dt_min > 0.0)) {
      throw std::invalid_argument("SolverConfig: dt_min must be > 0");
    }
    if (!(t_end > 0.0)) {
      throw std::invalid_argument("SolverConfig: t_end must be > 0");
    }
    if (sample_stride < 1) {
      throw std::invalid_argument("SolverConfig: sample_stride must be >= 1");
    }
  }
};

struct Derivatives {
  std::vector<double> du;
  std::vector<double> dv;
};

namespace detail {

inline void validate_state(const State& s, std::size_t cells) {
  if (s.u.size() != cells || s.v.size() != cells) {
    throw std::invalid_argument("solver: state size mismatch");
  }
  // Slack of 1e-9 below zero tolerates roundoff when clipping is disabled.
  for (std::size_t i = 0; i < cells; ++i) {
    if (s.u[i] < -1e-9 || s.v[i] < -1e-9) {
      throw std::invalid_argument("solver: invalid-state (negative values)");
    }
  }
}

}  // namespace detail

/// Right-hand side of the semi-discrete system:
///   du/dt = div[(u+alpha)^(m1-1) grad u - chi u (u+alpha)^(m2-2) grad v]
///   dv/dt = Lap v - v + u
/// in conservative face-flux form; the face sums telescope, so the discrete
/// u-mass is conserved to roundoff.
inline void rhs(const State& state, const ModelParams& params, const Grid& grid,
                Derivatives& out) {
  const std::size_t n = grid.cells;
  detail::validate_state(state, n);
  out.du.assign(n, 0.0);
  out.dv.assign(n, 0.0);

  const double inv_h = 1.0 / grid.spacing;
  const double m1_expo = params.m1 - 1.0;
  const double m2_expo = params.m2 - 2.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double area = grid.face_areas[j];
    const double grad_u = (state.u[j] - state.u[j - 1]) * inv_h;
    const double grad_v = (state.v[j] - state.v[j - 1]) * inv_h;
    const double u_face = 0.5 * (state.u[j] + state.u[j - 1]) + params.alpha;
    const double diffusivity = powx(u_face, m1_expo);
    const double velocity = params.chi * powx(u_face, m2_expo) * grad_v;
    const double u_upwind = velocity > 0.0 ? state.u[j - 1] : state.u[j];
    const double flux_u = area * (diffusivity * grad_u - velocity * u_upwind);
    const double flux_v = area * grad_v;
    out.du[j - 1] += flux_u;
    out.du[j] -= flux_u;
    out.dv[j - 1] += flux_v;
    out.dv[j] -= flux_v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double inv_vol = 1.0 / grid.volumes[i];
    out.du[i] *= inv_vol;
    out.dv[i] = out.dv[i] * inv_vol - state.v[i] + state.u[i];
  }
}

inline Derivatives rhs(const State& state, const ModelParams& params,
                       const Grid& grid) {
  Derivatives d;
  rhs(state, params, grid, d);
  return d;
}

/// Stability cap: dt <= h^2 / (2 max diffusivity) joined with the advective
/// limit h / max|velocity|; the v-equation contributes unit diffusivity.
inline double stable_dt(const State& state, const ModelParams& params,
                        const Grid& grid) {
  const std::size_t n = grid.cells;
  double max_diff = 1.0;  // v-equation
  double max_speed = 0.0;
  const double inv_h = 1.0 / grid.spacing;
  for (std::size_t i = 0; i < n; ++i) {
    max_diff =
        std::max(max_diff, powx(state.u[i] + params.alpha, params.m1 - 1.0));
  }
  for (std::size_t j = 1; j < n; ++j) {
    const double grad_v = (state.v[j] - state.v[j - 1]) * inv_h;
    const double u_face = 0.5 * (state.u[j] + state.u[j - 1]) + params.alpha;
    const double speed =
        std::abs(params.chi * powx(u_face, params.m2 - 2.0) * grad_v);
    max_speed = std::max(max_speed, speed);
  }
  const double h = grid.spacing;
  double dt = h * h / (2.0 * max_diff);
  if (max_speed > 0.0) dt = std::min(dt, h / max_speed);
  return dt;
}

struct StepResult {
  double dt_used = 0.0;
  long clip_events = 0;
  bool underflow = false;  ///< true: dt fell below dt_min, state not advanced
};

namespace detail {

struct StepWorkspace {
  Derivatives k_start, k_mid, k_stage;
  State stage, full, half, second;
};

/// out = base + scale * (a + b), clipped at 0 when requested.
inline long combine_clipped(const State& base, double scale,
                            const Derivatives& a, const Derivatives& b,
                            bool clip, State& out) {
  const std::size_t n = base.u.size();
  out.u.resize(n);
  out.v.resize(n);
  long clips = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double u = base.u[i] + scale * (a.du[i] + b.du[i]);
    double v = base.v[i] + scale * (a.dv[i] + b.dv[i]);
    if (clip) {
      if (u < 0.0) { u = 0.0; ++clips; }
      if (v < 0.0) { v = 0.0; ++clips; }
    }
    out.u[i] = u;
    out.v[i] = v;
  }
  return clips;
}

/// One Heun step of size dt from `from`, with k0 = rhs(from) precomputed.
/// `out` must not alias ws.stage, and k0 must not alias ws.k_stage.
inline long heun_step(const State& from, const Derivatives& k0, double dt,
                      const ModelParams& params, const Grid& grid, bool clip,
                      StepWorkspace& ws, State& out) {
  long clips = combine_clipped(from, 0.5 * dt, k0, k0, clip, ws.stage);
  ws.stage.t = from.t + dt;
  rhs(ws.stage, params, grid, ws.k_stage);
  clips += combine_clipped(from, 0.5 * dt, k0, ws.k_stage, clip, out);
  out.t = from.t + dt;
  return clips;
}

inline double step_error(const State& full, const State& half) {
  double err = 0.0;
  for (std::size_t i = 0; i < full.u.size(); ++i) {
    err = std::max(err, std::abs(full.u[i] - half.u[i]) /
                            std::max(1.0, std::abs(half.u[i])));
    err = std::max(err, std::abs(full.v[i] - half.v[i]) /
                            std::max(1.0, std::abs(half.v[i])));
  }
  return err;
}

inline StepResult step_adaptive_ws(State& state, const ModelParams& params,
                                   const Grid& grid, const SolverConfig& cfg,
                                   double dt_hint, double t_limit,
                                   StepWorkspace& ws) {
  const double cap = cfg.cfl_safety * stable_dt(state, params, grid);
  double dt = dt_hint > 0.0 ? std::min(dt_hint, cap) : cap;
  // A final sliver shorter than dt_min is not an underflow.
  double dt_floor = cfg.dt_min;
  if (t_limit > state.t && t_limit - state.t < dt) {
    dt = t_limit - state.t;
    dt_floor = std::min(dt_floor, dt);
  }

  rhs(state, params, grid, ws.k_start);
  StepResult result;
  while (true) {
    if (dt < dt_floor) {
      result.dt_used = dt;
      result.underflow = true;
      return result;
    }
    long clips = heun_step(state, ws.k_start, dt, params, grid,
                           cfg.clip_negative, ws, ws.full);
    clips += heun_step(state, ws.k_start, 0.5 * dt, params, grid,
                       cfg.clip_negative, ws, ws.half);
    rhs(ws.half, params, grid, ws.k_mid);
    clips += heun_step(ws.half, ws.k_mid, 0.5 * dt, params, grid,
                       cfg.clip_negative, ws, ws.second);

    if (step_error(ws.full, ws.second) <= cfg.step_rel_tol) {
      const double t_new = state.t + dt;
      state = ws.second;
      state.t = t_new;
      result.dt_used = dt;
      result.clip_events = clips;
      return result;
    }
    dt *= 0.5;
  }
}

}  // namespace detail

/// Advances the state by one accepted adaptive step (or reports underflow,
/// leaving the state untouched).
inline StepResult step_adaptive(
    State& state, const ModelParams& params, const Grid& grid,
    const SolverConfig& cfg, double dt_hint = 0.0,
    double t_limit = std::numeric_limits<double>::infinity()) {
  cfg.validate();
  detail::StepWorkspace ws;
  return detail::step_adaptive_ws(state, params, grid, cfg, dt_hint, t_limit,
                                  ws);
}

// ---------------------------------------------------------------------------
// Blow-up detection
// ---------------------------------------------------------------------------

struct DivergenceFit {
  double t_star = 0.0;
  bool low_confidence = false;
};

/// Fits 1/value linearly in t over the final decade of the series (power-law
/// blow-up ansatz) and extrapolates the zero crossing, clamped to be at or
/// after the last sample. A non-decaying fit yields the last sample time with
/// the low-confidence flag set.
inline DivergenceFit extrapolate_divergence_time(
    const std::vector<std::pair<double, double>>& series) {
  DivergenceFit fit;
  if (series.empty()) {
    throw std::invalid_argument("extrapolate_divergence_time: empty series");
  }
  const double t_last = series.back().first;
  const double v_last = series.back().second;
  fit.t_star = t_last;
  if (!(v_last > 0.0)) {
    fit.low_confidence = true;
    return fit;
  }

  std::size_t begin = series.size();
  while (begin > 0 && series[begin - 1].second >= 0.1 * v_last &&
         series[begin - 1].second > 0.0) {
    --begin;
  }
  while (series.size() - begin < 3 && begin > 0) --begin;
  const std::size_t count = series.size() - begin;
  if (count < 2) {
    fit.low_confidence = true;
    return fit;
  }

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = begin; i < series.size(); ++i) {
    const double t = series[i].first;
    const double y = 1.0 / series[i].second;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = count * stt - st * st;
  if (denom == 0.0) {
    fit.low_confidence = true;
    return fit;
  }
  const double slope = (count * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / count;
  if (!(slope < 0.0)) {
    fit.low_confidence = true;
    return fit;
  }
  fit.t_star = std::max(-intercept / slope, t_last);
  return fit;
}

/// Extrapolated blow-up time from a (t, max-density) series whose last value
/// has reached the detection threshold.
inline DivergenceFit detect_blowup(
    const std::vector<std::pair<double, double>>& umax_series,
    double threshold) {
  if (umax_series.empty() || umax_series.back().second < threshold) {
    throw std::invalid_argument(
        "detect_blowup: series has not reached the threshold");
  }
  return extrapolate_divergence_time(umax_series);
}

// ---------------------------------------------------------------------------
// Full simulation
// ---------------------------------------------------------------------------

enum class RunOutcome { completed_horizon, blowup_detected, step_underflow };

inline const char* to_string(RunOutcome k) {
  switch (k) {
    case RunOutcome::completed_horizon: return "completed-horizon";
    case RunOutcome::blowup_detected: return "blowup-detected";
    default: return "step-underflow";
  }
}

struct BlowupVerdict {
  RunOutcome kind = RunOutcome::completed_horizon;
  std::optional<double> t_star_estimate;  ///< from the max-density series
  std::optional<double> t_star_phi;       ///< from the Phi series
  bool threshold_trigger = false;
  bool dt_underflow_trigger = false;
  bool low_confidence = false;
  double final_u_max = 0.0;
  double final_phi = 0.0;
  double final_gradv_max = 0.0;
  double mass_drift = 0.0;  ///< |m(T) - m(0)| / m(0)
  long clip_events = 0;
  long steps = 0;
};

struct Trajectory {
  EnergySeries series;
  std::vector<std::pair<double, State>> snapshots;
  BlowupVerdict verdict;
};

/// Integrates from `initial` until the horizon, blow-up detection, or step
/// underflow. Energy samples are recorded every `sample_stride` accepted
/// steps (plus the initial and final states); the run is deterministic.
inline Trajectory simulate(const State& initial, const ModelParams& params,
                           const Grid& grid, const SolverConfig& cfg) {
  cfg.validate();
  params.validate();
  detail::validate_state(initial, grid.cells);

  Trajectory traj;
  traj.series.p = cfg.p_energy;
  traj.series.q = cfg.q_energy;
  State state = initial;
  state.t = 0.0;

  const auto record = [&](const State& s) {
    EnergySample sample =
        sample_energies(s, params, cfg.p_energy, cfg.q_energy, grid);
    if (traj.series.samples.empty() ||
        sample.t > traj.series.samples.back().t) {
      traj.series.samples.push_back(sample);
      return true;
    }
    return false;
  };

  record(state);
  traj.snapshots.emplace_back(state.t, state);
  const double mass0 = traj.series.samples.front().mass;
  const double u_max0 = traj.series.samples.front().u_max;

  detail::StepWorkspace ws;
  double dt_hint = 0.0;
  long samples_since_snapshot = 0;
  BlowupVerdict& verdict = traj.verdict;

  while (state.t < cfg.t_end * (1.0 - 1e-14)) {
    const StepResult sr = detail::step_adaptive_ws(state, params, grid, cfg,
                                                   dt_hint, cfg.t_end, ws);
    if (sr.underflow) {
      verdict.dt_underflow_trigger = true;
      break;
    }
    ++verdict.steps;
    verdict.clip_events += sr.clip_events;
    dt_hint = sr.dt_used * 1.25;

    if (verdict.steps % cfg.sample_stride == 0) {
      if (record(state) && cfg.snapshot_stride > 0 &&
          ++samples_since_snapshot >= cfg.snapshot_stride) {
        traj.snapshots.emplace_back(state.t, state);
        samples_since_snapshot = 0;
      }
    }

    const double u_max = *std::max_element(state.u.begin(), state.u.end());
    if (u_max >= cfg.u_blowup_threshold) {
      verdict.threshold_trigger = true;
      break;
    }
  }

  record(state);
  traj.snapshots.emplace_back(state.t, state);

  const EnergySample& last = traj.series.samples.back();
  verdict.final_u_max = last.u_max;
  verdict.final_phi = last.phi;
  verdict.final_gradv_max = last.gradv_max;
  verdict.mass_drift =
      mass0 != 0.0 ? std::abs(last.mass - mass0) / std::abs(mass0) : 0.0;

  if (verdict.threshold_trigger) {
    verdict.kind = RunOutcome::blowup_detected;
  } else if (verdict.dt_underflow_trigger) {
    // dt collapse with substantial density growth is the second blow-up
    // trigger; without growth it is a plain integration failure.
    verdict.kind = last.u_max >= 10.0 * std::max(u_max0, 1e-300)
                       ? RunOutcome::blowup_detected
                       : RunOutcome::step_underflow;
  } else {
    verdict.kind = RunOutcome::completed_horizon;
  }

  if (verdict.kind == RunOutcome::blowup_detected) {
    std::vector<std::pair<double, double>> umax_series, phi_series;
    umax_series.reserve(traj.series.samples.size());
    phi_series.reserve(traj.series.samples.size());
    // Phi is fitted on the p-norm scale Phi^(1/p), so both detectors apply
    // the same pole ansatz over comparable final-decade windows.
    const double inv_p = 1.0 / std::max(cfg.p_energy, 1.0);
    for (const auto& s : traj.series.samples) {
      umax_series.emplace_back(s.t, s.u_max);
      phi_series.emplace_back(s.t, std::pow(s.phi, inv_p));
    }
    const DivergenceFit fit_u = extrapolate_divergence_time(umax_series);
    const DivergenceFit fit_phi = extrapolate_divergence_time(phi_series);
    verdict.t_star_estimate = fit_u.t_star;
    verdict.t_star_phi = fit_phi.t_star;
    verdict.low_confidence = fit_u.low_confidence || fit_phi.low_confidence;
  }
  return traj;
}

}  // namespace ksbound
