#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chaplygin/types.hpp"

namespace chaplygin {

struct GridSpec {
  int n_u = 65;
  int n_v = 65;
};

/// Physical and numerical input for one run. Angles are radians; the
/// freestream speed is nondimensionalized so the Bernoulli constant is 1.
struct ProblemConfig {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double v3inf = 0.0;
  double chaplygin_A = 1.0;
  std::vector<double> mu_schedule;
  std::vector<double> eps_schedule;
  NewtonOptions newton;
  GridSpec grid;
};

/// Parse a config from a JSON document. Unknown keys are rejected.
/// Throws Error(ConfigError) on malformed input and Error(NonSupersonic) /
/// Error(AngleTooLarge) / Error(BadParameter) on invariant violations.
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::filesystem::path& path);

/// Enforce the ProblemConfig invariants (supersonic freestream, angles below
/// the critical angle, monotone schedules, positive Newton options).
void validate_config(const ProblemConfig& config);

/// JSON echo of a config, with the same keys the parser accepts.
std::string config_to_json(const ProblemConfig& config);

}  // namespace chaplygin
