#pragma once

/// @file report.hpp
/// @brief Plain-text report assembly with a content hash. Reports carry the
///        fully resolved configuration, so identical configs reproduce
///        identical hashes.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ksbound {

/// FNV-1a 64-bit content hash.
inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

class ReportBuilder {
 public:
  explicit ReportBuilder(const std::string& title) {
    line("=== " + title + " ===");
  }

  void section(const std::string& name) {
    line("");
    line("[" + name + "]");
  }

  void line(const std::string& text) { body_ += text + "\n"; }

  void field(const std::string& name, const std::string& value) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-28s = %s", name.c_str(), value.c_str());
    line(buf);
  }

  void field(const std::string& name, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    field(name, std::string(buf));
  }

  void resolved_config(const std::map<std::string, std::string>& resolved) {
    section("resolved config");
    for (const auto& [key, value] : resolved) field(key, value);
  }

  /// Body followed by its own hash line.
  std::string finish() const {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(body_)));
    return body_ + "\nreport-hash: " + buf + "\n";
  }

  std::string hash() const {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(body_)));
    return buf;
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << finish();
  }

 private:
  std::string body_;
};

}  // namespace ksbound
