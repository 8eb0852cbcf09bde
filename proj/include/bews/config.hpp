#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bews/sim.hpp"

namespace bews {

/// Analysis knobs carried next to the scenario in one config document.
struct AnalysisConfig {
  int theorem1_grid = 1000;
  int identification_frequencies = 20;
  double identification_amplitude = 1.0;
  int identification_cycles = 20;
  int identification_discard_cycles = 10;
  int bode_points = 400;
  bool bode_diagonal_only = false;
  std::vector<double> compare_shear_amplitudes = {0.05, 0.10, 0.15};
  double metrics_window_revs = 10.0;
};

struct Config {
  Scenario scenario;
  AnalysisConfig analysis;
};

/// Parses and schema-validates a JSON config; unknown keys are rejected.
/// Throws ConfigError on any validation problem.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text);

/// Multiplies the named gain (k_p, k_i, K_col or K_0) by (1 + percent/100).
void perturb_gain(Scenario& scenario, const std::string& name, double percent);

}  // namespace bews
