#pragma once

/// @file grid.hpp
/// @brief Cell-centered finite-volume grids on the interval [0, L] and the
///        radially symmetric ball of radius R in dimension n.
///
/// Radial grids offset the first center to r = h/2, away from the r = 0
/// coordinate singularity. Cell volumes are the exact slab/shell measures,
/// so the quadrature weights partition |Omega| to roundoff at any resolution.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ksbound/exponents.hpp"

namespace ksbound {

struct Grid {
  DomainSpec spec;
  std::size_t cells = 0;
  double spacing = 0.0;             ///< h
  std::vector<double> centers;      ///< x (interval) or r (ball), per cell
  std::vector<double> volumes;      ///< quadrature weight per cell
  std::vector<double> face_areas;   ///< cells + 1 entries

  double measure() const { return spec.measure; }
};

inline Grid make_grid(const DomainSpec& spec, std::size_t n_cells) {
  if (n_cells < 8) throw std::invalid_argument("make_grid: need N >= 8");
  Grid g;
  g.spec = spec;
  g.cells = n_cells;
  g.spacing = spec.extent / static_cast<double>(n_cells);
  g.centers.resize(n_cells);
  g.volumes.resize(n_cells);
  g.face_areas.resize(n_cells + 1);

  if (spec.geometry == Geometry::interval) {
    for (std::size_t i = 0; i < n_cells; ++i) {
      g.centers[i] = (static_cast<double>(i) + 0.5) * g.spacing;
      g.volumes[i] = g.spacing;
    }
    for (std::size_t j = 0; j <= n_cells; ++j) g.face_areas[j] = 1.0;
  } else {
    const int n = spec.dim;
    const double omega_n = unit_ball_volume(n);
    const double sphere_area = n * omega_n;  // |S^(n-1)|
    for (std::size_t j = 0; j <= n_cells; ++j) {
      const double r = static_cast<double>(j) * g.spacing;
      g.face_areas[j] = sphere_area * std::pow(r, n - 1);
    }
    for (std::size_t i = 0; i < n_cells; ++i) {
      const double r_in = static_cast<double>(i) * g.spacing;
      const double r_out = r_in + g.spacing;
      g.centers[i] = 0.5 * (r_in + r_out);
      g.volumes[i] = omega_n * (std::pow(r_out, n) - std::pow(r_in, n));
    }
  }
  return g;
}

}  // namespace ksbound
