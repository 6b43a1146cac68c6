#pragma once

// Scenario files for the command-line tool.
//
// INI grammar (sections and keys, '#' or ';' comments):
//
//   [scenario]   preset, strategy, dp, t_end, base_load
//   [integrator] method (rk4 | trapezoidal), dt (s)
//   [output]     sample_rate (Hz), rocof_window (s), channels (comma list)
//   [sweep]      dp (comma list, overrides the grid), first, step, count,
//                strategies (comma list)
//   [gains]      slope (pu/pu), literal (bool), k_dc, k_pv, k_iv, k_pi, k_ii
//   [converter]  n, tau_dc (s), i_max (pu), literal_g_dc, clamp_modulation
//   [machine]    h (s), d_p (pu/pu), tau_g (s)
//   [classifier] v_dc_min (pu), v_dc_duration (s), sync_tol (pu),
//                tail_fraction
//
// Unknown sections or keys are rejected with the offending name.

#include "gridforge/presets.hpp"

#include <boost/property_tree/ptree.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridforge::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSettings {
  std::vector<double> dps;
  std::vector<std::string> strategies;
};

struct CliConfig {
  std::string source;     // file path, or "preset:<name>"
  std::string strategy;
  ScenarioConfig scenario;
  SweepSettings sweep;
  /// Every resolved key, sorted, for the manifest.
  std::map<std::string, std::string> settings;
};

/// Reads `path` (INI). Throws ConfigError naming the path when unreadable.
boost::property_tree::ptree read_config_file(const std::string& path);

/// Applies "section.key=value". Throws ConfigError on malformed input.
void apply_override(boost::property_tree::ptree& tree, const std::string& assignment);

/// Builds the scenario from a tree; `strategy_override` (if non-empty) wins
/// over [scenario] strategy. Throws ConfigError naming the offending key.
CliConfig build_config(const boost::property_tree::ptree& tree, const std::string& source,
                       const std::string& strategy_override = {});

std::vector<double> parse_number_list(const std::string& text, const std::string& key);
std::vector<std::string> split_list(const std::string& text);

}  // namespace gridforge::cli
