#pragma once

#include <iosfwd>
#include <string>

#include "dualgrad/experiments.hpp"

namespace dualgrad {

/// Error in a configuration file or experiment parameters (usage error,
/// exit code 2 at the CLI).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Applies one `key = value` setting to the spec; throws ConfigError for
/// unknown keys or malformed values.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Parses a flat key-value file (UTF-8, `key = value` lines, `#` comments).
/// A leading `experiment = <id>` line switches to that builtin's defaults
/// before the remaining keys are applied.
ExperimentSpec parse_config(std::istream& in);

ExperimentSpec load_config_file(const std::string& path);

/// Comma-separated positive integers, strictly ascending.
std::vector<long> parse_n_list(const std::string& text);

}  // namespace dualgrad
