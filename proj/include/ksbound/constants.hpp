#pragma once

/// @file constants.hpp
/// @brief Assembly of the constants in the energy differential inequality
///        dPhi/dt <= A Phi^f(eta,r) + B Phi^f(eta,1) + C Phi^eta + D.
///
/// The pipeline is: Gagliardo-Nirenberg constants (c1, c2) -> the six
/// interpolation factors C1..C6 -> the Holder aggregates E1/E2 -> the delta
/// and epsilon selections -> the final (A, B, C, D). Every intermediate is
/// kept so reports can print a full audit trail.

#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ksbound/exponents.hpp"

namespace ksbound {

/// Provenance of the Gagliardo-Nirenberg constants feeding the bound.
enum class GnProvenance { user_supplied, empirically_estimated };

inline const char* to_string(GnProvenance p) {
  return p == GnProvenance::user_supplied ? "user-supplied"
                                          : "empirically-estimated";
}

struct GnConstants {
  double c1 = 1.0;  ///< GN constant of the density estimate
  double c2 = 1.0;  ///< GN constant of the signal-gradient estimate
  GnProvenance provenance = GnProvenance::user_supplied;

  void validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0)) {
      throw std::invalid_argument("GnConstants: c1, c2 must be > 0");
    }
  }
};

/// Interpolation factors C1..C6. `c2_factor_alt` records the variant of C2
/// with prefactor 2^(2 r eta - 1) instead of 2^(2 r eta); the larger
/// (conservative) prefactor is the one used downstream, the alternative is
/// reported in audits only.
struct CFactors {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0;
  double c2_factor_alt = 0.0;
};

struct EFactors {
  double e1 = 0.0;
  double e2 = 0.0;
};

/// Holder conjugate x' = x/(x-1).
inline double holder_conjugate(double x) {
  if (!(x > 1.0)) {
    throw std::domain_error("holder_conjugate: exponent must exceed 1");
  }
  return x / (x - 1.0);
}

/// C1..C6 from the exponent configuration and the GN constants:
///   C1 = 2^(2 r eta - 1) * a r eta * c1^(2 r eta)
///   C2 = 2^(2 r eta)     * (1 - a r eta) * c1^(2 r eta)
///   C3 = 2^(2 r eta - 1) * c1^(2 r eta)
///   C4 = 2^(2 eta - 1) * (eta/2)     * c2^(2 eta)
///   C5 = 2^(2 eta - 1) * ((2-eta)/2) * c2^(2 eta)
///   C6 = 2^(2 eta - 1) * c2^(2 eta)
inline CFactors assemble_c_factors(const ExponentConfig& cfg,
                                   const GnConstants& gn) {
  gn.validate();
  if (!(cfg.ar_eta > 0.0 && cfg.ar_eta < 1.0)) {
    throw std::domain_error("assemble_c_factors: inadmissible-config (a r eta)");
  }
  const double tre = 2.0 * cfg.r * cfg.eta;
  const double te = 2.0 * cfg.eta;
  const double c1_pow = std::pow(gn.c1, tre);
  const double c2_pow = std::pow(gn.c2, te);
  CFactors f;
  f.c1 = std::pow(2.0, tre - 1.0) * cfg.ar_eta * c1_pow;
  f.c2 = std::pow(2.0, tre) * (1.0 - cfg.ar_eta) * c1_pow;
  f.c2_factor_alt = std::pow(2.0, tre - 1.0) * (1.0 - cfg.ar_eta) * c1_pow;
  f.c3 = std::pow(2.0, tre - 1.0) * c1_pow;
  f.c4 = std::pow(2.0, te - 1.0) * 0.5 * cfg.eta * c2_pow;
  f.c5 = std::pow(2.0, te - 1.0) * 0.5 * (2.0 - cfg.eta) * c2_pow;
  f.c6 = std::pow(2.0, te - 1.0) * c2_pow;
  return f;
}

/// E1/E2 aggregates (with x' the Holder conjugate):
///   E1 = chi^2(p-1)/2 * 1/(q eta)'  * |Omega|^(1/beta1')
///      + (4(q-1)+n)/2 * 1/(q' eta)' * |Omega|^(1/beta2')
///   E2 = chi^2(p-1)/2 * 1/(q eta) + (4(q-1)+n)/2 * 1/(q' eta)
inline EFactors assemble_e_factors(const ExponentConfig& cfg,
                                   const ModelParams& params) {
  if (!(cfg.beta1 > 1.0 && cfg.beta2 > 1.0)) {
    throw std::domain_error("assemble_e_factors: inadmissible-config (beta)");
  }
  const double omega = params.domain.measure;
  const double chem = 0.5 * params.chi * params.chi * (cfg.p - 1.0);
  const double diss = 0.5 * (4.0 * (cfg.q - 1.0) + params.n);
  const double q_eta = cfg.q * cfg.eta;
  const double qp_eta = holder_conjugate(cfg.q) * cfg.eta;
  EFactors e;
  e.e1 = chem / holder_conjugate(q_eta) *
             std::pow(omega, 1.0 / holder_conjugate(cfg.beta1)) +
         diss / holder_conjugate(qp_eta) *
             std::pow(omega, 1.0 / holder_conjugate(cfg.beta2));
  e.e2 = chem / q_eta + diss / qp_eta;
  return e;
}

/// Midpoint policy for delta in the open interval (0, 2(q-1)/q^2).
inline double choose_delta(double q) {
  if (!(q > 1.0)) throw std::invalid_argument("choose_delta: invalid-q");
  return (q - 1.0) / (q * q);
}

/// The epsilon selection with its cap audit. epsilon is the minimum of
/// three caps: keeping the density-dissipation coefficient nonnegative,
/// keeping the gradient-dissipation coefficient nonnegative, and keeping
/// the R >= 1 floor that lets R^(1/beta) <= R. `cap_grad_v_alt` records,
/// for audit only, the variant E2 C2 eps <= 2(p-1)/q^2 - delta.
struct EpsilonChoice {
  double value = 0.0;
  double cap_grad_u = 0.0;
  double cap_grad_v = 0.0;
  double cap_r_floor = 0.0;
  double cap_grad_v_alt = 0.0;
  int binding = 0;  ///< 0: grad-u cap, 1: grad-v cap, 2: R-floor cap

  const char* binding_name() const {
    switch (binding) {
      case 0: return "grad-u-cap";
      case 1: return "grad-v-cap";
      default: return "r-floor-cap";
    }
  }
};

/// Maximizes epsilon subject to all three caps; the bound improves as A and
/// B shrink, and both carry negative powers of epsilon.
inline EpsilonChoice choose_epsilon(const ExponentConfig& cfg,
                                    const ModelParams& params,
                                    const CFactors& cf, const EFactors& ef,
                                    double delta) {
  EpsilonChoice choice;
  const double pm = cfg.p + params.m1 - 1.0;
  choice.cap_grad_u =
      0.5 * (cfg.p - 1.0) * (2.0 / pm) * (2.0 / pm) / (ef.e1 * cf.c1);
  choice.cap_grad_v =
      (2.0 * (cfg.q - 1.0) / (cfg.q * cfg.q) - delta) / (ef.e2 * cf.c4);
  choice.cap_grad_v_alt =
      (2.0 * (cfg.p - 1.0) / (cfg.q * cfg.q) - delta) / (ef.e2 * cf.c2);
  const double mass_floor =
      std::pow(params.alpha, cfg.p) * params.domain.measure;
  choice.cap_r_floor = std::pow(cf.c2 * std::pow(mass_floor, cfg.f_r),
                                cfg.ar_eta / (1.0 - cfg.ar_eta));
  choice.value = choice.cap_grad_u;
  choice.binding = 0;
  if (choice.cap_grad_v < choice.value) {
    choice.value = choice.cap_grad_v;
    choice.binding = 1;
  }
  if (choice.cap_r_floor < choice.value) {
    choice.value = choice.cap_r_floor;
    choice.binding = 2;
  }
  if (!(choice.value > 0.0)) {
    throw std::domain_error("choose_epsilon: infeasible-epsilon");
  }
  return choice;
}

/// The assembled coefficients of the differential inequality.
struct BoundConstants {
  double delta = 0.0;
  double d_delta = 0.0;
  double epsilon = 0.0;
  CFactors cfactors;
  EFactors efactors;
  double A = 0.0;  ///< coefficient of Phi^f(eta,r)
  double B = 0.0;  ///< coefficient of Phi^f(eta,1)
  double C = 0.0;  ///< coefficient of Phi^eta
  double D = 0.0;  ///< additive boundary term, D_delta (0 on convex domains)
};

/// Final assembly:
///   A = p^f(eta,r) E1 C2 eps^(-(1-a r eta)/(a r eta))
///   B = q^f(eta,1) E2 C5 eps^(-eta/(2-eta))
///   C = p^eta E1 C3 + q^eta E2 C6
///   D = D_delta
inline BoundConstants assemble_abcd(const ExponentConfig& cfg,
                                    const CFactors& cf, const EFactors& ef,
                                    double epsilon, double delta,
                                    double d_delta) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("assemble_abcd: epsilon must be > 0");
  }
  if (d_delta < 0.0) {
    throw std::invalid_argument("assemble_abcd: D_delta must be >= 0");
  }
  BoundConstants bc;
  bc.delta = delta;
  bc.d_delta = d_delta;
  bc.epsilon = epsilon;
  bc.cfactors = cf;
  bc.efactors = ef;
  bc.A = std::pow(cfg.p, cfg.f_r) * ef.e1 * cf.c2 *
         std::pow(epsilon, -(1.0 - cfg.ar_eta) / cfg.ar_eta);
  bc.B = std::pow(cfg.q, cfg.f_1) * ef.e2 * cf.c5 *
         std::pow(epsilon, -cfg.eta / (2.0 - cfg.eta));
  bc.C = std::pow(cfg.p, cfg.eta) * ef.e1 * cf.c3 +
         std::pow(cfg.q, cfg.eta) * ef.e2 * cf.c6;
  bc.D = d_delta;
  return bc;
}

/// Whole-pipeline convenience: C-factors, E-factors, delta (midpoint policy
/// unless overridden), epsilon (max under caps), then (A, B, C, D).
/// For convex domains D_delta is forced to 0; for non-convex domains it must
/// be supplied (the boundary-integral estimate is existence-only, there is
/// no computable default).
struct AssemblyResult {
  BoundConstants constants;
  EpsilonChoice epsilon_choice;
};

inline AssemblyResult assemble_bound_constants(const ExponentConfig& cfg,
                                               const ModelParams& params,
                                               const GnConstants& gn,
                                               double d_delta = 0.0,
                                               double delta_override = -1.0) {
  if (!cfg.admissible) {
    throw std::domain_error("assemble_bound_constants: inadmissible-config");
  }
  if (params.domain.convex) {
    d_delta = 0.0;
  } else if (!(d_delta > 0.0)) {
    throw std::invalid_argument(
        "assemble_bound_constants: non-convex domain requires D_delta > 0");
  }
  const double delta =
      delta_override > 0.0 ? delta_override : choose_delta(cfg.q);
  if (!(delta < 2.0 * (cfg.q - 1.0) / (cfg.q * cfg.q))) {
    throw std::invalid_argument(
        "assemble_bound_constants: delta outside (0, 2(q-1)/q^2)");
  }
  const CFactors cf = assemble_c_factors(cfg, gn);
  const EFactors ef = assemble_e_factors(cfg, params);
  AssemblyResult result;
  result.epsilon_choice = choose_epsilon(cfg, params, cf, ef, delta);
  result.constants =
      assemble_abcd(cfg, cf, ef, result.epsilon_choice.value, delta, d_delta);
  return result;
}

// ---------------------------------------------------------------------------
// Serialization (bit-exact double round trip via nlohmann::json)
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const CFactors& f) {
  j = nlohmann::json{{"c1", f.c1}, {"c2", f.c2}, {"c3", f.c3},
                     {"c4", f.c4}, {"c5", f.c5}, {"c6", f.c6},
                     {"c2_factor_alt", f.c2_factor_alt}};
}

inline void from_json(const nlohmann::json& j, CFactors& f) {
  j.at("c1").get_to(f.c1);
  j.at("c2").get_to(f.c2);
  j.at("c3").get_to(f.c3);
  j.at("c4").get_to(f.c4);
  j.at("c5").get_to(f.c5);
  j.at("c6").get_to(f.c6);
  j.at("c2_factor_alt").get_to(f.c2_factor_alt);
}

inline void to_json(nlohmann::json& j, const EFactors& e) {
  j = nlohmann::json{{"e1", e.e1}, {"e2", e.e2}};
}

inline void from_json(const nlohmann::json& j, EFactors& e) {
  j.at("e1").get_to(e.e1);
  j.at("e2").get_to(e.e2);
}

inline void to_json(nlohmann::json& j, const BoundConstants& bc) {
  j = nlohmann::json{{"delta", bc.delta},     {"d_delta", bc.d_delta},
                     {"epsilon", bc.epsilon}, {"cfactors", bc.cfactors},
                     {"efactors", bc.efactors}, {"A", bc.A},
                     {"B", bc.B},             {"C", bc.C},
                     {"D", bc.D}};
}

inline void from_json(const nlohmann::json& j, BoundConstants& bc) {
  j.at("delta").get_to(bc.delta);
  j.at("d_delta").get_to(bc.d_delta);
  j.at("epsilon").get_to(bc.epsilon);
  j.at("cfactors").get_to(bc.cfactors);
  j.at("efactors").get_to(bc.efactors);
  j.at("A").get_to(bc.A);
  j.at("B").get_to(bc.B);
  j.at("C").get_to(bc.C);
  j.at("D").get_to(bc.D);
}

}  // namespace ksbound
