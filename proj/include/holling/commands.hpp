#pragma once

#include "holling/serialize.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace holling {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { exit_ok = 0, exit_config = 1, exit_degenerate = 2, exit_numerical = 3 };

/// Everything a command needs. Unset optionals fall back to per-command
/// defaults; model parameters without a default are required.
struct RunConfig {
  std::string command;
  std::optional<double> alpha, beta, delta, lambda, mu, gamma;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> draws;
  std::optional<int> workers;
  /// continue: parameter to vary, end value, first step, index of the start cycle.
  std::optional<std::string> parameter;
  std::optional<double> to;
  std::optional<double> step;
  std::optional<int> cycle;
};

/// Overlay the keys of a config file (same names as the flags). Keys already
/// set in `cfg` are left alone, so apply flags first. Throws ConfigError on
/// unknown keys or wrong types.
void apply_config_file(RunConfig& cfg, const Json& file);

/// Reads and parses a JSON file. Throws ConfigError.
Json read_config_file(const std::string& path);

/// Model parameters from the config. Required fields are named in the
/// ConfigError; invalid values throw ConfigError naming field and bound.
SystemParams resolve_params(const RunConfig& cfg, bool require_alpha_beta = true);

/// Parameters used by `scenario` when delta, lambda and mu are not given.
SystemParams default_scenario_base();

/// Runs one command and writes its output to `out` (or to the file named in
/// cfg.out). Diagnostics go to `err`. Returns the process exit code.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Portrait data for the given parameters: equilibria, nested cycles around
/// the anti-saddles and a fixed grid of sampled trajectories.
Portrait build_portrait(const SystemParams& params);

}  // namespace holling
