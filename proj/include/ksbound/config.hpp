#pragma once

/// @file config.hpp
/// @brief Flat key-value experiment configuration: one `section.key = value`
///        per line, `#` comments, no nesting. Diff-able and hashable; one
///        config file describes one experiment.
///
/// Every lookup is tracked: values actually used (including materialized
/// defaults) are echoed into reports, and keys never consumed are flagged as
/// schema errors before any computation starts.

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksbound {

/// Configuration error with the offending line (0 when not line-specific).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? message + " (line " +
                                          std::to_string(line) + ")"
                                    : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    cfg.parse(in);
    return cfg;
  }

  static KeyValueConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    KeyValueConfig cfg;
    cfg.parse(in);
    return cfg;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  /// Sets or replaces a value before resolution (CLI flag overrides).
  void override_value(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }

  std::string get_string(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ConfigError("missing required key: " + key);
    }
    consumed_.insert(key);
    resolved_[key] = it->second;
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    const std::string value = it == entries_.end() ? fallback : it->second;
    consumed_.insert(key);
    resolved_[key] = value;
    return value;
  }

  double get_double(const std::string& key) {
    return parse_double(key, get_string(key));
  }

  double get_double(const std::string& key, double fallback) {
    if (!has(key)) {
      consumed_.insert(key);
      resolved_[key] = format_double(fallback);
      return fallback;
    }
    return parse_double(key, get_string(key));
  }

  long get_int(const std::string& key) {
    return parse_int(key, get_string(key));
  }

  long get_int(const std::string& key, long fallback) {
    if (!has(key)) {
      consumed_.insert(key);
      resolved_[key] = std::to_string(fallback);
      return fallback;
    }
    return parse_int(key, get_string(key));
  }

  bool get_bool(const std::string& key, bool fallback) {
    if (!has(key)) {
      consumed_.insert(key);
      resolved_[key] = fallback ? "true" : "false";
      return fallback;
    }
    const std::string value = get_string(key);
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    throw ConfigError("key " + key + ": expected a boolean, got '" + value +
                      "'", line_of(key));
  }

  std::vector<double> get_double_list(const std::string& key) {
    const std::string text = get_string(key);
    std::vector<double> values;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
      values.push_back(parse_double(key, trim(token)));
    }
    if (values.empty()) {
      throw ConfigError("key " + key + ": expected a comma-separated list",
                        line_of(key));
    }
    return values;
  }

  /// Fails on any key present in the file but never consumed (typo guard).
  void reject_unconsumed() const {
    for (const auto& [key, value] : entries_) {
      if (!consumed_.count(key)) {
        throw ConfigError("unknown config key: " + key, line_of(key));
      }
    }
  }

  /// Every key the experiment actually used, defaults materialized, sorted.
  const std::map<std::string, std::string>& resolved() const {
    return resolved_;
  }

  static std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  void parse(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string text = trim(line);
      if (text.empty()) continue;
      const auto eq = text.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("expected 'key = value'", lineno);
      }
      const std::string key = trim(text.substr(0, eq));
      const std::string value = trim(text.substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key", lineno);
      if (entries_.count(key)) {
        throw ConfigError("duplicate key: " + key, lineno);
      }
      entries_[key] = value;
      lines_[key] = lineno;
    }
  }

  static std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
      ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
      --end;
    }
    return s.substr(begin, end - begin);
  }

  int line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }

  double parse_double(const std::string& key, const std::string& value) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key " + key + ": expected a number, got '" + value +
                        "'", line_of(key));
    }
  }

  long parse_int(const std::string& key, const std::string& value) const {
    try {
      std::size_t used = 0;
      const long v = std::stol(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key " + key + ": expected an integer, got '" + value +
                        "'", line_of(key));
    }
  }

  std::map<std::string, std::string> entries_;
  std::map<std::string, int> lines_;
  std::set<std::string> consumed_;
  std::map<std::string, std::string> resolved_;
};

}  // namespace ksbound
