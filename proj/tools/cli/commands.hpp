#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "dysonlab/report.hpp"

namespace dysonlab::cli {

inline constexpr const char* kVersion = "0.1.0";

/// One PASS/FAIL flag of a subcommand.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CommandOutput {
  std::string command;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ExperimentReport> reports;
  std::vector<Check> checks;
  std::optional<std::string> svg;

  bool all_pass() const;
};

struct RunContext {
  unsigned threads = 1;
};

/// Subcommand names in help order.
const std::vector<std::string>& command_names();

/// Validates the whole configuration for `command` (throws ConfigError
/// before any computation), then runs it.
CommandOutput run_command(const std::string& command, const Config& config, const RunContext& context);

/// Writes the result under `out_dir` in the given format (csv, json or svg).
/// Returns the paths written.
std::vector<std::string> write_outputs(const CommandOutput& output, const std::string& out_dir,
                                       const std::string& format);

}  // namespace dysonlab::cli
