#pragma once

// Scenario configuration, execution and reporting.

#include "gridforge/initialization.hpp"
#include "gridforge/metrics.hpp"
#include "gridforge/system.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gridforge {

enum class EventKind { kLoadStep, kMachineTrip };
std::string to_string(EventKind k);

struct Event {
  double time = 0.1;  // s
  EventKind kind = EventKind::kLoadStep;
  int bus = 7;
  double dp = 0.0;    // load steps: added active power, pu at nominal voltage
};

struct ScenarioConfig {
  std::string name = "custom";
  SystemConfig system;
  double base_load = 2.0;  // informational; already applied to system.network
  std::vector<Event> events;
  double t_end = 3.1;
  numerics::IntegratorConfig integrator;
  double sample_rate = 1000.0;  // Hz
  double rocof_window = 0.25;   // s
  ClassifierThresholds thresholds;
  /// Channel names to keep in the output series; empty keeps all. Channels
  /// needed for classification are always recorded.
  std::vector<std::string> outputs;

  void validate() const;
};

struct MetricsReport {
  std::string frequency_channel;
  double t0 = 0.0;
  double window = 0.25;
  double dp = 0.0;          // summed |dp| of load steps (0 if none)
  double nadir = 0.0;       // rad/s
  double rocof = 0.0;       // rad/s^2
  double nadir_norm = 0.0;  // divided by |dp|
  double rocof_norm = 0.0;
  Stability stability = Stability::kStable;
  std::vector<ChannelIntervals> saturation;
  double total_saturation = 0.0;
  bool aborted = false;  // integration stopped on a numerical fault
  std::string abort_reason;
  double init_residual = 0.0;
};

struct ScenarioResult {
  TimeSeries series;
  MetricsReport metrics;
  Vector initial_state;
};

/// Optional hook called after every integration step with the state.
using StepHook = std::function<void(double t, const Vector& x, const System& sys, const SystemInputs& in)>;

/// Initializes, integrates to t_end applying events, samples channels and
/// computes metrics. Throws on configuration or initialization errors;
/// numerical blow-up is reported through MetricsReport::aborted and the
/// stability classification.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const StepHook& hook = {});

/// Applies one event to the run-time inputs. Load steps scale the load
/// admittance at the bus so it draws dp more at nominal voltage; machine
/// trips open the unit's transformer and freeze its states.
void apply_event(const Event& e, const System& sys, SystemInputs& in, Vector& x);

}  // namespace gridforge
