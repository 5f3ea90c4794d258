#pragma once

// Shared fixtures for the test suites.

#include <cmath>
#include <vector>

#include "ksbound/constants.hpp"
#include "ksbound/exponents.hpp"
#include "ksbound/rng.hpp"

namespace ksbound::testing {

/// Ball in dimension n scaled so that |Omega| = 1.
inline DomainSpec unit_measure_ball(int n) {
  const double radius = std::pow(1.0 / unit_ball_volume(n), 1.0 / n);
  return DomainSpec::ball(radius, n);
}

/// The fully explicit reference configuration: n = 3, m1 = 1, m2 = 2,
/// chi = alpha = 1, |Omega| = 1. With p = q = 4 and c1 = c2 = 1 it yields
/// E1 = 5, E2 = 4, C1 = 3, C2 = 2, C4 = 3, eps = 1/64, A = 2560, C = 288.
inline ModelParams worked_params() {
  ModelParams params;
  params.n = 3;
  params.m1 = 1.0;
  params.m2 = 2.0;
  params.chi = 1.0;
  params.alpha = 1.0;
  params.domain = unit_measure_ball(3);
  return params;
}

inline ExponentConfig worked_exponents() {
  return derive_exponents(worked_params(), 4.0, 4.0);
}

inline GnConstants unit_gn() {
  return {1.0, 1.0, GnProvenance::user_supplied};
}

struct AdmissibleSample {
  ModelParams params;
  ExponentConfig config;
};

/// Draws random admissible configurations across dimensions 1..4.
inline std::vector<AdmissibleSample> random_admissible(Rng& rng,
                                                       std::size_t count) {
  std::vector<AdmissibleSample> out;
  std::size_t attempts = 0;
  while (out.size() < count && attempts < 400 * count) {
    ++attempts;
    ModelParams params;
    params.n = 1 + static_cast<int>(rng.below(4));
    params.m1 = rng.uniform(0.5, 3.0);
    params.m2 = rng.uniform(0.5, 3.5);
    params.chi = rng.uniform(0.2, 3.0);
    params.alpha = rng.uniform(0.3, 2.0);
    params.domain = params.n == 1
                        ? DomainSpec::interval(rng.uniform(0.5, 2.0))
                        : DomainSpec::ball(rng.uniform(0.5, 1.5), params.n);
    const double p = rng.uniform(1.5, 9.0);
    const double q = rng.uniform(1.5, 9.0);
    try {
      ExponentConfig cfg = derive_exponents(params, p, q);
      if (cfg.admissible) out.push_back({params, std::move(cfg)});
    } catch (const std::exception&) {
    }
  }
  return out;
}

}  // namespace ksbound::testing
