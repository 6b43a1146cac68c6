#pragma once

#include "gridforge/scenario.hpp"

#include <string>
#include <vector>

namespace gridforge {

struct SweepEntry {
  double dp = 0.0;
  MetricsReport metrics;
  std::string error;  // non-empty when the run could not be completed
};

/// dp_i = first + step * i, i = 0 .. count-1.
std::vector<double> sweep_grid(double first = 0.2, double step = 0.007, int count = 100);

/// Worker count: GRIDFORGE_THREADS when set (>= 1), else the hardware
/// concurrency, never more than `jobs`.
int sweep_threads(std::size_t jobs);

/// Runs `base` once per dp, replacing the magnitude of its first load-step
/// event (one is added at bus 7 when none exists). Entries come back in the
/// order of `dps`; failures are recorded per entry. Throws
/// std::invalid_argument for an empty list.
std::vector<SweepEntry> sweep_disturbances(const ScenarioConfig& base, const std::vector<double>& dps,
                                           int threads = 0);

}  // namespace gridforge
