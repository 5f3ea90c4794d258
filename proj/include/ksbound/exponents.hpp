#pragma once

/// @file exponents.hpp
/// @brief Model parameters and the exponent algebra behind the blow-up-time
///        lower bound for the quasilinear chemotaxis system
///
///            u_t = div[(u+a)^(m1-1) grad u - chi u (u+a)^(m2-2) grad v],
///            v_t = Lap v - v + u,
///
///        with zero-flux boundaries. The bound is valid only for energy
///        exponents (p, q) passing two admissibility conditions (C1) and
///        (C2); this header houses those gates and every derived exponent
///        (eta, r, f(eta,s), the Gagliardo-Nirenberg interpolation exponent
///        `a`, and the Holder exponents beta1/beta2).
///
/// All checks of strict inequalities use exact floating comparison: the
/// conditions are open, so boundary values fail.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksbound {

// ---------------------------------------------------------------------------
// Domain and model parameters
// ---------------------------------------------------------------------------

enum class Geometry { interval, ball };

/// Volume of the unit ball in dimension n.
inline double unit_ball_volume(int n) {
  return std::pow(3.14159265358979323846, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Bounded domain descriptor. Only interval and radially symmetric ball
/// geometries are meshable; both are convex, so the `convex` flag starts
/// true. Non-convex domains enter the bound solely through the boundary
/// constant D_delta, never through geometry, and are modelled by clearing
/// the flag on a geometry of equal measure.
struct DomainSpec {
  Geometry geometry = Geometry::interval;
  double extent = 1.0;  ///< interval length L, or ball radius R
  int dim = 1;          ///< spatial dimension n
  bool convex = true;
  double measure = 1.0;  ///< |Omega|

  static DomainSpec interval(double length) {
    if (!(length > 0.0)) {
      throw std::invalid_argument("DomainSpec::interval: length must be > 0");
    }
    DomainSpec d;
    d.geometry = Geometry::interval;
    d.extent = length;
    d.dim = 1;
    d.convex = true;
    d.measure = length;
    return d;
  }

  static DomainSpec ball(double radius, int n) {
    if (!(radius > 0.0) || n < 1) {
      throw std::invalid_argument("DomainSpec::ball: need radius > 0, n >= 1");
    }
    DomainSpec d;
    d.geometry = Geometry::ball;
    d.extent = radius;
    d.dim = n;
    d.convex = true;
    d.measure = unit_ball_volume(n) * std::pow(radius, n);
    return d;
  }
};

/// Physical/model parameters of the chemotaxis system.
struct ModelParams {
  int n = 1;          ///< spatial dimension
  double m1 = 1.0;    ///< diffusion exponent
  double m2 = 2.0;    ///< sensitivity exponent
  double chi = 1.0;   ///< chemotactic coefficient, > 0
  double alpha = 1.0; ///< regularization, > 0
  DomainSpec domain;

  void validate() const {
    if (n < 1) throw std::invalid_argument("ModelParams: invalid-dimension (n >= 1)");
    if (!(chi > 0.0)) throw std::invalid_argument("ModelParams: chi must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("ModelParams: alpha must be > 0");
    if (!(domain.measure > 0.0)) {
      throw std::invalid_argument("ModelParams: domain measure must be > 0");
    }
    if (domain.dim != n) {
      throw std::invalid_argument("ModelParams: domain dimension must match n");
    }
  }
};

// ---------------------------------------------------------------------------
// Elementary exponents
// ---------------------------------------------------------------------------

/// Result of the eta selection. For n >= 3 the value n/(n-1) is forced; for
/// n in {1,2} any eta in (1,2) works and the caller may override the default.
struct EtaChoice {
  double value;
  bool dimension_fixed;  ///< true iff n >= 3 pinned the value
};

/// Default eta for dimension n: n/(n-1) for n >= 3, else the midpoint 3/2
/// with `dimension_fixed == false` as the needs-choice marker.
inline EtaChoice eta_default(int n) {
  if (n < 1) throw std::invalid_argument("eta_default: invalid-dimension");
  if (n >= 3) return {static_cast<double>(n) / (n - 1), true};
  return {1.5, false};
}

/// r(m1) = p / (p + m1 - 1).
inline double exponent_r(double p, double m1) {
  const double denom = p + m1 - 1.0;
  if (denom == 0.0) {
    throw std::domain_error("exponent_r: degenerate-exponent (p + m1 - 1 == 0)");
  }
  return p / denom;
}

/// f(eta, s) = 1 + (eta-1) / (n (1/n - eta/2 + 1/(2s))).
///
/// A negative denominator yields f < 1, which makes the bound formula
/// inapplicable; the value is returned as-is and admissibility screening
/// rejects such configurations.
inline double exponent_f(double eta, double s, int n) {
  if (n < 1) throw std::invalid_argument("exponent_f: invalid-dimension");
  if (!(s > 0.0)) throw std::invalid_argument("exponent_f: s must be > 0");
  const double denom = 1.0 / n - 0.5 * eta + 0.5 / s;
  if (denom == 0.0) throw std::domain_error("exponent_f: singular-exponent");
  return 1.0 + (eta - 1.0) / (n * denom);
}

/// Gagliardo-Nirenberg interpolation exponent for the density estimate:
/// a = (1/(2r) - 1/(2 r eta)) / (1/(2r) + 1/n - 1/2), in (0,1).
inline double gn_exponent_a(double r, double eta, int n) {
  if (n < 1) throw std::invalid_argument("gn_exponent_a: invalid-dimension");
  if (!(r > 0.0)) throw std::invalid_argument("gn_exponent_a: r must be > 0");
  if (!(eta > 1.0 && eta < 2.0)) {
    throw std::invalid_argument("gn_exponent_a: eta must lie in (1,2)");
  }
  const double denom = 0.5 / r + 1.0 / n - 0.5;
  if (!(denom > 0.0)) throw std::domain_error("gn_exponent_a: gn-inapplicable");
  return (0.5 / r - 0.5 / (r * eta) ) / denom;
}

/// Holder exponents of the mixed-term estimates:
///   beta1 = p/(p+2m2-m1-3) * (q eta - 1)/q,
///   beta2 = (p/2) * (q eta - q + 1)/q.
/// Both exceed 1 exactly when (C2) holds.
struct BetaExponents {
  double beta1;
  double beta2;
};

inline BetaExponents beta_exponents(double p, double q, double eta, double m1,
                                    double m2) {
  const double mix = p + 2.0 * m2 - m1 - 3.0;
  if (!(mix > 0.0)) {
    throw std::domain_error("beta_exponents: holder-inapplicable (p+2m2-m1-3 <= 0)");
  }
  if (!(q * eta - 1.0 > 0.0) || !(q * eta - q + 1.0 > 0.0)) {
    throw std::domain_error("beta_exponents: holder-inapplicable (q eta range)");
  }
  return {p / mix * (q * eta - 1.0) / q, 0.5 * p * (q * eta - q + 1.0) / q};
}

// ---------------------------------------------------------------------------
// Admissibility conditions
// ---------------------------------------------------------------------------

struct ConditionTerm {
  std::string name;
  double value;
};

/// Verdict of one max-type admissibility condition p > max{terms}. Margins
/// and binding terms are reported so the harness can explain failures.
struct ConditionVerdict {
  bool pass = false;
  double margin = 0.0;       ///< p - max(terms); positive iff pass
  std::size_t binding = 0;   ///< index of the largest term
  std::vector<ConditionTerm> terms;

  double threshold() const { return terms[binding].value; }
  const std::string& binding_name() const { return terms[binding].name; }
};

namespace detail {
inline ConditionVerdict verdict_from_terms(double p,
                                           std::vector<ConditionTerm> terms) {
  ConditionVerdict v;
  v.terms = std::move(terms);
  v.binding = 0;
  for (std::size_t i = 1; i < v.terms.size(); ++i) {
    if (v.terms[i].value > v.terms[v.binding].value) v.binding = i;
  }
  v.margin = p - v.terms[v.binding].value;
  v.pass = p > v.terms[v.binding].value;
  return v;
}
}  // namespace detail

/// Condition (C1): p > max{ (n/2)(m2-m1), n(m2-m1-1), n }.
inline ConditionVerdict check_c1(double p, int n, double m1, double m2) {
  return detail::verdict_from_terms(
      p, {{"(n/2)*(m2-m1)", 0.5 * n * (m2 - m1)},
          {"n*(m2-m1-1)", n * (m2 - m1 - 1.0)},
          {"n", static_cast<double>(n)}});
}

/// Condition (C2):
/// p > max{ q(2m2-m1-3)/(q eta-q-1), -2m2+m1+3, 2q/(q eta-q+1),
///          eta(m1-1)/((eta-1)(eta-2)) }.
/// Requires q > 1/(eta-1), which also makes the first denominator positive.
inline ConditionVerdict check_c2(double p, double q, int n, double m1,
                                 double m2, double eta) {
  (void)n;
  if (!(q * (eta - 1.0) > 1.0)) {
    throw std::invalid_argument("check_c2: q-too-small (need q > 1/(eta-1))");
  }
  return detail::verdict_from_terms(
      p, {{"q*(2m2-m1-3)/(q*eta-q-1)",
           q * (2.0 * m2 - m1 - 3.0) / (q * eta - q - 1.0)},
          {"-2m2+m1+3", -2.0 * m2 + m1 + 3.0},
          {"2q/(q*eta-q+1)", 2.0 * q / (q * eta - q + 1.0)},
          {"eta*(m1-1)/((eta-1)*(eta-2))",
           eta * (m1 - 1.0) / ((eta - 1.0) * (eta - 2.0))}});
}

// ---------------------------------------------------------------------------
// Full exponent configuration
// ---------------------------------------------------------------------------

/// Energy exponents (p, q), eta, and everything derived from them, together
/// with the admissibility verdicts.
struct ExponentConfig {
  double p = 0.0;
  double q = 0.0;
  double eta = 0.0;
  double r = 0.0;       ///< r(m1) = p/(p+m1-1)
  double f_r = 0.0;     ///< f(eta, r)
  double f_1 = 0.0;     ///< f(eta, 1)
  double a = 0.0;       ///< GN interpolation exponent
  double ar_eta = 0.0;  ///< a * r * eta, must be < 1
  double beta1 = 0.0;
  double beta2 = 0.0;
  ConditionVerdict c1;
  ConditionVerdict c2;
  bool q_large_enough = false;
  bool admissible = false;
};

/// Derives the full exponent configuration for given (p, q, eta). Quantities
/// whose formulas degenerate on inadmissible input are left NaN; `admissible`
/// reflects every gate the bound requires.
inline ExponentConfig derive_exponents(const ModelParams& params, double p,
                                       double q, double eta) {
  params.validate();
  if (!(eta > 1.0 && eta < 2.0)) {
    throw std::invalid_argument("derive_exponents: eta must lie in (1,2)");
  }
  const double nan = std::nan("");
  ExponentConfig cfg;
  cfg.p = p;
  cfg.q = q;
  cfg.eta = eta;
  cfg.r = exponent_r(p, params.m1);
  cfg.f_1 = exponent_f(eta, 1.0, params.n);
  cfg.f_r = cfg.r > 0.0 ? exponent_f(eta, cfg.r, params.n) : nan;

  cfg.c1 = check_c1(p, params.n, params.m1, params.m2);
  cfg.q_large_enough = q * (eta - 1.0) > 1.0;
  bool derived_ok = true;
  if (cfg.q_large_enough) {
    cfg.c2 = check_c2(p, q, params.n, params.m1, params.m2, eta);
  } else {
    derived_ok = false;
  }
  try {
    cfg.a = cfg.r > 0.0 ? gn_exponent_a(cfg.r, eta, params.n) : nan;
    cfg.ar_eta = cfg.a * cfg.r * eta;
  } catch (const std::domain_error&) {
    cfg.a = cfg.ar_eta = nan;
    derived_ok = false;
  }
  try {
    const auto betas = beta_exponents(p, q, eta, params.m1, params.m2);
    cfg.beta1 = betas.beta1;
    cfg.beta2 = betas.beta2;
  } catch (const std::domain_error&) {
    cfg.beta1 = cfg.beta2 = nan;
    derived_ok = false;
  }

  cfg.admissible = derived_ok && cfg.c1.pass && cfg.c2.pass &&
                   cfg.q_large_enough && p > 1.0 && cfg.r > 0.0 &&
                   cfg.a > 0.0 && cfg.a < 1.0 && cfg.ar_eta < 1.0 &&
                   cfg.f_r > 1.0 && cfg.f_1 > 1.0 && cfg.beta1 > 1.0 &&
                   cfg.beta2 > 1.0;
  return cfg;
}

inline ExponentConfig derive_exponents(const ModelParams& params, double p,
                                       double q) {
  return derive_exponents(params, p, q, eta_default(params.n).value);
}

// ---------------------------------------------------------------------------
// Admissible-pair search
// ---------------------------------------------------------------------------

struct ScanRange {
  double lo;
  double hi;
};

/// Uniform grid scan for admissible (p, q) pairs. Returns every pair passing
/// all gates, sorted by f(eta, r) ascending (smaller exponent gives a better
/// bound shape), with ties broken by (p, q).
inline std::vector<ExponentConfig> search_admissible(const ModelParams& params,
                                                     ScanRange p_range,
                                                     ScanRange q_range,
                                                     double step,
                                                     double eta) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("search_admissible: step must be > 0");
  }
  if (p_range.hi < p_range.lo || q_range.hi < q_range.lo) {
    throw std::invalid_argument("search_admissible: empty range");
  }
  std::vector<ExponentConfig> found;
  const double fuzz = 0.5 * step;
  for (double p = p_range.lo; p <= p_range.hi + fuzz; p += step) {
    for (double q = q_range.lo; q <= q_range.hi + fuzz; q += step) {
      ExponentConfig cfg = derive_exponents(params, p, q, eta);
      if (cfg.admissible) found.push_back(std::move(cfg));
    }
  }
  std::sort(found.begin(), found.end(),
            [](const ExponentConfig& lhs, const ExponentConfig& rhs) {
              if (lhs.f_r != rhs.f_r) return lhs.f_r < rhs.f_r;
              if (lhs.p != rhs.p) return lhs.p < rhs.p;
              return lhs.q < rhs.q;
            });
  return found;
}

inline std::vector<ExponentConfig> search_admissible(const ModelParams& params,
                                                     ScanRange p_range,
                                                     ScanRange q_range,
                                                     double step) {
  return search_admissible(params, p_range, q_range, step,
                           eta_default(params.n).value);
}

}  // namespace ksbound
