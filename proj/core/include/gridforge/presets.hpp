#pragma once

// Named 9-bus scenarios.
//
//   sweep-9bus         SM at bus 1, GFCs at 2 and 3, base load 2.0, load step at 7
//   large-disturbance  same mix, base load 2.25, step 0.75 (or 0.9) at 7, 10 s
//   loss-of-sm         base load 2.1, SM set-point 0.6, GFCs 0.75, SM trip
//   all-gfc            GFCs at 1, 2 and 3, base load 2.25, step 0.9 at 7
//
// The pseudo-strategy "all-sm" replaces every converter by a machine.

#include "gridforge/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gridforge {

struct PresetOptions {
  std::string strategy = "droop";  // droop | vsm | matching | dvoc | all-sm
  std::optional<double> dp;        // overrides the preset disturbance
  std::optional<double> t_end;
  std::optional<double> base_load;  // pu; dispatch is rescaled with it
};

/// Throws std::invalid_argument for unknown names or strategies.
ScenarioConfig make_preset(const std::string& name, const PresetOptions& opts = {});

std::vector<std::string> preset_names();

/// Time of the disturbance in every preset.
inline constexpr double kEventTime = 0.1;

}  // namespace gridforge
