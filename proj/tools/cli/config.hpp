#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dysonlab/errors.hpp"

namespace dysonlab::cli {

/// Invalid configuration; carries the source location when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& field, const std::string& message);

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string source_;
  int line_;
  std::string field_;
};

/// Flat key = value configuration.
///
///   # comment
///   theta = 0.5
///   N     = [64, 256, 1024]     # lists: brackets optional, comma separated
///   out   = "results"           # strings may be quoted
///
/// Later assignments (and flag overrides) replace earlier ones.
class Config {
 public:
  struct Entry {
    std::string value;
    std::string source;
    int line = 0;  ///< 0 for flag overrides
  };

  static Config parse_text(const std::string& text, const std::string& source);
  static Config parse_file(const std::string& path);

  /// `key=value` from the command line.
  void set_override(const std::string& assignment, const std::string& source);
  void set(const std::string& key, const std::string& value, const std::string& source, int line = 0);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback) const;

  /// Raises a ConfigError located at `key` (or unlocated if absent).
  /// Effective value of every key read so far (defaults included), as text.
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::map<std::string, Entry> entries_;
  mutable std::map<std::string, std::string> resolved_;
};

}  // namespace dysonlab::cli
