#pragma once

/// @file svg.hpp
/// @brief Minimal self-contained SVG line charts (no plotting dependency).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ksbound {

struct SvgOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_y = false;
  int width = 720;
  int height = 440;
};

inline void write_line_chart(const std::string& path,
                             const std::vector<std::pair<double, double>>& pts,
                             SvgOptions opt = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  const double margin_l = 70, margin_r = 20, margin_t = 40, margin_b = 50;
  const double plot_w = opt.width - margin_l - margin_r;
  const double plot_h = opt.height - margin_t - margin_b;

  std::vector<std::pair<double, double>> data;
  for (const auto& p : pts) {
    if (opt.log_y && !(p.second > 0.0)) continue;
    data.emplace_back(p.first, opt.log_y ? std::log10(p.second) : p.second);
  }

  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (!data.empty()) {
    x_lo = x_hi = data.front().first;
    y_lo = y_hi = data.front().second;
    for (const auto& p : data) {
      x_lo = std::min(x_lo, p.first);
      x_hi = std::max(x_hi, p.first);
      y_lo = std::min(y_lo, p.second);
      y_hi = std::max(y_hi, p.second);
    }
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;

  const auto px = [&](double x) {
    return margin_l + (x - x_lo) / (x_hi - x_lo) * plot_w;
  };
  const auto py = [&](double y) {
    return margin_t + (y_hi - y) / (y_hi - y_lo) * plot_h;
  };
  const auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
      << "\" height=\"" << opt.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << margin_l << "\" y=\"" << margin_t << "\" width=\""
      << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333\"/>\n"
      << "<text x=\"" << opt.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" << opt.title
      << "</text>\n";

  if (!data.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" "
           "points=\"";
    for (const auto& p : data) out << fmt(px(p.first)) << "," << fmt(py(p.second)) << " ";
    out << "\"/>\n";
  }

  const std::string y_lo_label = opt.log_y ? "1e" + fmt(y_lo) : fmt(y_lo);
  const std::string y_hi_label = opt.log_y ? "1e" + fmt(y_hi) : fmt(y_hi);
  out << "<text x=\"" << margin_l << "\" y=\"" << opt.height - 16
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << fmt(x_lo)
      << "</text>\n"
      << "<text x=\"" << opt.width - margin_r << "\" y=\"" << opt.height - 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
      << fmt(x_hi) << "</text>\n"
      << "<text x=\"" << margin_l - 6 << "\" y=\"" << margin_t + 12
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
      << y_hi_label << "</text>\n"
      << "<text x=\"" << margin_l - 6 << "\" y=\"" << margin_t + plot_h
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
      << y_lo_label << "</text>\n"
      << "<text x=\"" << opt.width / 2 << "\" y=\"" << opt.height - 4
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" << opt.x_label << "</text>\n"
      << "<text x=\"14\" y=\"" << margin_t - 8
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << opt.y_label
      << (opt.log_y ? " (log10)" : "") << "</text>\n"
      << "</svg>\n";
}

}  // namespace ksbound
