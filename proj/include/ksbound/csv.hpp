#pragma once

/// @file csv.hpp
/// @brief Fixed-column CSV writers. Doubles are printed with %.17g so files
///        round-trip exactly and reruns are byte-identical.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksbound/field.hpp"
#include "ksbound/grid.hpp"

namespace ksbound {

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ",";
      out_ << csv_number(values[i]);
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

/// Energy history: fixed columns (t, phi, u_max, mass, gradv_energy).
inline void write_energy_csv(const std::string& path,
                             const EnergySeries& series) {
  CsvWriter csv(path, "t,phi,u_max,mass,gradv_energy");
  for (const auto& s : series.samples) {
    csv.row(std::vector<double>{s.t, s.phi, s.u_max, s.mass, s.gradv_energy});
  }
}

/// Field snapshot: fixed columns (x, u, v).
inline void write_snapshot_csv(const std::string& path, const State& state,
                               const Grid& grid) {
  CsvWriter csv(path, "x,u,v");
  for (std::size_t i = 0; i < grid.cells; ++i) {
    csv.row(std::vector<double>{grid.centers[i], state.u[i], state.v[i]});
  }
}

/// Snapshot reader for file-based initial data; expects the exact layout
/// write_snapshot_csv produces with a matching cell count.
inline State read_snapshot_csv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "x,u,v") {
    throw std::runtime_error("snapshot " + path + ": expected header x,u,v");
  }
  State state;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x, u, v;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &u, &v) != 3) {
      throw std::runtime_error("snapshot " + path + ": malformed row");
    }
    state.u.push_back(u);
    state.v.push_back(v);
  }
  if (state.u.size() != grid.cells) {
    throw std::runtime_error("snapshot " + path +
                             ": cell count does not match the grid");
  }
  return state;
}

}  // namespace ksbound
