#pragma once

/// @file bound.hpp
/// @brief Evaluation of the blow-up-time lower bound
///
///     t* >= integral_{Phi(0)}^{infinity} dtau / G(tau),
///     G(tau) = A tau^f(eta,r) + B tau^f(eta,1) + C tau^eta + D,
///
/// by adaptive quadrature (with the tail mapped to a finite interval via
/// sigma = 1/tau), plus the closed-form under-estimate valid for Phi(0) < 1.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ksbound/constants.hpp"
#include "ksbound/exponents.hpp"
#include "ksbound/quadrature.hpp"

namespace ksbound {

enum class BoundMethod { quadrature, closed_form_r_ge_1, closed_form_r_lt_1 };

inline const char* to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::quadrature: return "quadrature";
    case BoundMethod::closed_form_r_ge_1: return "closed-form-r>=1";
    default: return "closed-form-r<1";
  }
}

/// A computed lower bound with its provenance.
struct BoundReport {
  double phi0 = 0.0;
  double t_lower = 0.0;
  BoundMethod method = BoundMethod::quadrature;
  BoundConstants constants;
  ExponentConfig exponents;
  double quadrature_error_estimate = 0.0;
  std::string conditional_on = "user-supplied constants";
};

/// G(phi) = A phi^f(eta,r) + B phi^f(eta,1) + C phi^eta + D.
inline double g_of_phi(double phi, const BoundConstants& bc,
                       const ExponentConfig& cfg) {
  if (!(phi >= 0.0)) throw std::invalid_argument("g_of_phi: phi must be >= 0");
  return bc.A * std::pow(phi, cfg.f_r) + bc.B * std::pow(phi, cfg.f_1) +
         bc.C * std::pow(phi, cfg.eta) + bc.D;
}

namespace detail {

struct PowerTerm {
  double coef;
  double expo;
};

inline std::array<PowerTerm, 4> bound_terms(const BoundConstants& bc,
                                            const ExponentConfig& cfg) {
  return {{{bc.A, cfg.f_r}, {bc.B, cfg.f_1}, {bc.C, cfg.eta}, {bc.D, 0.0}}};
}

}  // namespace detail

/// Integral of 1/G from phi0 to infinity with absolute error <= tol.
///
/// The interval is split at a crossover point tau_c beyond which the
/// largest-exponent term dominates; [phi0, tau_c] is integrated directly and
/// the tail via the exact substitution sigma = 1/tau followed by the
/// regularizing power map sigma = z^(1/(g_max - 1)), under which the leading
/// term of the transformed integrand is constant at z = 0 and the rest are
/// positive powers. Convergence requires the largest exponent among nonzero
/// terms to exceed 1.
inline BoundReport lower_bound_integral(double phi0, const BoundConstants& bc,
                                        const ExponentConfig& cfg,
                                        double tol = 1e-10) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("lower_bound_integral: invalid-tolerance");
  }
  if (!(phi0 >= 0.0)) {
    throw std::invalid_argument("lower_bound_integral: phi0 must be >= 0");
  }

  const auto terms = detail::bound_terms(bc, cfg);
  double g_max = -1.0;
  double lead_coef = 0.0;
  bool any_active = false;
  for (const auto& t : terms) {
    if (t.coef < 0.0) {
      throw std::invalid_argument("lower_bound_integral: negative coefficient");
    }
    if (t.coef == 0.0) continue;
    any_active = true;
    if (t.expo > g_max) {
      g_max = t.expo;
      lead_coef = t.coef;
    } else if (t.expo == g_max) {
      lead_coef += t.coef;
    }
  }
  if (!any_active || g_max <= 1.0) {
    throw std::domain_error("lower_bound_integral: divergent-integral");
  }

  BoundReport report;
  report.phi0 = phi0;
  report.method = BoundMethod::quadrature;
  report.constants = bc;
  report.exponents = cfg;

  // With D = 0 the integrand ~ tau^(-g) with g > 1 near 0: divergent at the
  // lower endpoint, i.e. the bound is infinite (no finite-time blow-up).
  if (phi0 == 0.0 && bc.D == 0.0) {
    report.t_lower = std::numeric_limits<double>::infinity();
    return report;
  }

  // Crossover: past tau_c the leading term exceeds every other one.
  double tau_c = std::max(phi0, 1.0);
  for (const auto& t : terms) {
    if (t.coef == 0.0 || t.expo == g_max) continue;
    const double cross = std::pow(t.coef / lead_coef, 1.0 / (g_max - t.expo));
    if (cross > tau_c) tau_c = cross;
  }
  tau_c = std::min(tau_c, std::max(phi0, 1.0) * 1e8);

  const auto inv_g = [&](double tau) { return 1.0 / g_of_phi(tau, bc, cfg); };
  // Tail in sigma = 1/tau, then sigma = z^stretch with stretch = 1/(g_max-1):
  // integrand m / sum_i c_i z^(1 - (g_i - 1) stretch); every exponent is
  // >= 0 and the leading one is exactly 0.
  const double stretch = 1.0 / (g_max - 1.0);
  const auto tail = [&](double z) {
    double denom = 0.0;
    for (const auto& t : terms) {
      if (t.coef != 0.0) {
        denom += t.coef * std::pow(z, 1.0 - (t.expo - 1.0) * stretch);
      }
    }
    return stretch / denom;
  };

  double value = 0.0, err = 0.0;
  if (tau_c > phi0) {
    const QuadResult head = integrate_adaptive(inv_g, phi0, tau_c, 0.5 * tol);
    value += head.value;
    err += head.error_estimate;
  }
  const QuadResult tail_part = integrate_adaptive(
      tail, 0.0, std::pow(1.0 / tau_c, g_max - 1.0), 0.5 * tol);
  value += tail_part.value;
  err += tail_part.error_estimate;

  report.t_lower = value;
  report.quadrature_error_estimate = err;
  return report;
}

/// Closed-form under-estimate of the integral for Phi(0) in (0, 1):
///
///   r >= 1:  1/(f(eta,r)-1) * Phi0 / (A Phi0^(f_r-1) + B Phi0^(f_1-1)
///                                      + C Phi0^(eta-1) + D)
///   r <  1:  the same expression with prefactor 1/(f(eta,1)-1) and the
///            B-term leading the sum.
///
/// Always <= the quadrature value on the same inputs.
inline BoundReport closed_form_bound(double phi0, const BoundConstants& bc,
                                     const ExponentConfig& cfg) {
  if (!(phi0 > 0.0 && phi0 < 1.0)) {
    throw std::domain_error("closed_form_bound: out-of-domain (need phi0 in (0,1))");
  }
  BoundReport report;
  report.phi0 = phi0;
  report.constants = bc;
  report.exponents = cfg;

  const double a_term = bc.A * std::pow(phi0, cfg.f_r - 1.0);
  const double b_term = bc.B * std::pow(phi0, cfg.f_1 - 1.0);
  const double c_term = bc.C * std::pow(phi0, cfg.eta - 1.0);
  double prefactor;
  double denom;
  if (cfg.r >= 1.0) {
    report.method = BoundMethod::closed_form_r_ge_1;
    prefactor = 1.0 / (cfg.f_r - 1.0);
    denom = a_term + b_term + c_term + bc.D;
  } else {
    report.method = BoundMethod::closed_form_r_lt_1;
    prefactor = 1.0 / (cfg.f_1 - 1.0);
    denom = b_term + a_term + c_term + bc.D;
  }
  if (!(denom > 0.0)) {
    throw std::domain_error("closed_form_bound: divergent-integral");
  }
  report.t_lower = prefactor * phi0 / denom;
  return report;
}

}  // namespace ksbound
