#pragma once

/// @file field.hpp
/// @brief Discrete fields, norms, and the energy functional
///        Phi(t) = (1/p) int (u+alpha)^p + (1/q) int |grad v|^(2q).
///
/// Gradients are centered differences on cell centers with reflected ghost
/// cells, so the boundary-normal contribution vanishes, consistent with the
/// zero-flux boundary condition.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ksbound/grid.hpp"

namespace ksbound {

/// std::pow with fast paths for the handful of exponents the solver hits in
/// its inner loop.
inline double powx(double base, double expo) {
  if (expo == 0.0) return 1.0;
  if (expo == 1.0) return base;
  if (expo == 2.0) return base * base;
  if (expo == 0.5) return std::sqrt(base);
  return std::pow(base, expo);
}

/// Discrete fields at one time: density u, signal v.
struct State {
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;
};

/// Centered-difference gradient magnitude per cell, reflected ghosts at the
/// boundary.
inline std::vector<double> gradient(const std::vector<double>& w,
                                    const Grid& grid) {
  const std::size_t n = grid.cells;
  if (w.size() != n) throw std::invalid_argument("gradient: size mismatch");
  std::vector<double> g(n);
  const double inv_2h = 0.5 / grid.spacing;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (i == 0) ? w[0] : w[i - 1];
    const double right = (i + 1 == n) ? w[n - 1] : w[i + 1];
    g[i] = (right - left) * inv_2h;
  }
  return g;
}

/// Total mass: sum of u_i V_i.
inline double mass(const std::vector<double>& u, const Grid& grid) {
  if (u.size() != grid.cells) throw std::invalid_argument("mass: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < grid.cells; ++i) total += u[i] * grid.volumes[i];
  return total;
}

struct GradNorm {
  double integral = 0.0;              ///< int |grad v|^k
  std::vector<double> magnitude;      ///< |grad v| per cell
};

/// int |grad v|^k with the same stencil phi_measure uses.
inline GradNorm grad_norms(const std::vector<double>& v, const Grid& grid,
                           double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("grad_norms: need k >= 1");
  GradNorm result;
  auto g = gradient(v, grid);
  result.integral = 0.0;
  for (std::size_t i = 0; i < grid.cells; ++i) {
    g[i] = std::abs(g[i]);
    result.integral += powx(g[i], k) * grid.volumes[i];
  }
  result.magnitude = std::move(g);
  return result;
}

/// Phi = (1/p) sum (u_i+alpha)^p V_i + (1/q) sum |grad v|_i^(2q) V_i.
inline double phi_measure(const State& state, double p, double q, double alpha,
                          const Grid& grid) {
  if (!(p >= 1.0 && q >= 1.0)) {
    throw std::invalid_argument("phi_measure: need p, q >= 1");
  }
  double density_part = 0.0;
  for (std::size_t i = 0; i < grid.cells; ++i) {
    density_part += powx(state.u[i] + alpha, p) * grid.volumes[i];
  }
  const GradNorm gn = grad_norms(state.v, grid, 2.0 * q);
  return density_part / p + gn.integral / q;
}

/// One row of the recorded energy history. Beyond the exported columns
/// (t, phi, u_max, mass, gradv_energy) it carries the integrals the
/// inequality audits need, so no field snapshots have to be retained.
struct EnergySample {
  double t = 0.0;
  double phi = 0.0;
  double u_max = 0.0;
  double mass = 0.0;
  double gradv_energy = 0.0;   ///< int |grad v|^(2q)
  double u_p_integral = 0.0;   ///< int (u+alpha)^p
  double diss_u = 0.0;         ///< int (u+alpha)^(p+m1-3) |grad u|^2
  double rhs_u = 0.0;          ///< int (u+alpha)^(p+2m2-m1-3) |grad v|^2
  double diss_v = 0.0;         ///< int |grad(|grad v|^q)|^2
  double rhs_v = 0.0;          ///< int (u+alpha)^2 |grad v|^(2q-2)
  double gradv_max = 0.0;      ///< max |grad v| (logged for audit)
};

struct EnergySeries {
  double p = 0.0;  ///< energy exponents the samples were recorded with
  double q = 0.0;
  std::vector<EnergySample> samples;
};

/// Evaluates every recorded functional of (u, v) at the state's time.
inline EnergySample sample_energies(const State& state,
                                    const ModelParams& params, double p,
                                    double q, const Grid& grid) {
  EnergySample s;
  s.t = state.t;
  const double alpha = params.alpha;
  const auto grad_u = gradient(state.u, grid);
  const GradNorm gv = grad_norms(state.v, grid, 2.0 * q);

  std::vector<double> gradv_pow_q(grid.cells);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    gradv_pow_q[i] = powx(gv.magnitude[i], q);
  }
  const auto grad_gradv_q = gradient(gradv_pow_q, grid);

  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double vol = grid.volumes[i];
    const double ua = state.u[i] + alpha;
    const double gv2 = gv.magnitude[i] * gv.magnitude[i];
    s.u_p_integral += powx(ua, p) * vol;
    s.mass += state.u[i] * vol;
    s.u_max = std::max(s.u_max, state.u[i]);
    s.gradv_max = std::max(s.gradv_max, gv.magnitude[i]);
    s.diss_u += powx(ua, p + params.m1 - 3.0) * grad_u[i] * grad_u[i] * vol;
    s.rhs_u += powx(ua, p + 2.0 * params.m2 - params.m1 - 3.0) * gv2 * vol;
    s.diss_v += grad_gradv_q[i] * grad_gradv_q[i] * vol;
    s.rhs_v += ua * ua * powx(gv.magnitude[i], 2.0 * q - 2.0) * vol;
  }
  s.gradv_energy = gv.integral;
  s.phi = s.u_p_integral / p + s.gradv_energy / q;
  return s;
}

}  // namespace ksbound
