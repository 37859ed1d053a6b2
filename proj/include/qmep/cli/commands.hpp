#pragma once

// The four verbs of the qmep tool. Each returns the CSV text and the exit
// code: 0 when every point succeeded, 1 when some were flagged.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qmep/cli/run_config.hpp"

namespace qmep::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_partial = 1;
inline constexpr int exit_config = 2;

struct CommandResult {
  std::string csv;
  int exit_code = exit_ok;
  std::vector<std::string> messages;
};

CommandResult run_invert(const RunConfig& config);
CommandResult run_mobility_sweep(const RunConfig& config);
CommandResult run_relax(const RunConfig& config);
CommandResult run_production_table(const RunConfig& config);

struct Invocation {
  std::string verb;
  std::string config_path;
  std::optional<std::string> output;
  std::optional<int> threads;
  std::optional<double> hbar_scale;
};

/// Loads the config, applies the overrides, runs the verb and writes the
/// CSV to the output path (or out when none is set). Diagnostics go to err.
int run_invocation(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace qmep::cli
