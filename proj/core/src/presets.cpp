#include "gridforge/presets.hpp"

#include <stdexcept>

namespace gridforge {

namespace {

struct Mix {
  bool gfc[3];
};

std::vector<DeviceConfig> make_devices(const Mix& mix, const std::string& strategy, const double p[3]) {
  const bool all_sm = strategy == "all-sm";
  const auto s = all_sm ? controllers::Strategy::kDroop : controllers::strategy_from_string(strategy);
  std::vector<DeviceConfig> out;
  for (int b = 1; b <= 3; ++b) {
    DeviceConfig d;
    d.bus = b;
    d.kind = (mix.gfc[b - 1] && !all_sm) ? DeviceKind::kConverter : DeviceKind::kMachine;
    d.strategy = s;
    d.p_star = p[b - 1];
    d.v_star = 1.0;
    out.push_back(d);
  }
  return out;
}

}  // namespace

std::vector<std::string> preset_names() { return {"sweep-9bus", "large-disturbance", "loss-of-sm", "all-gfc"}; }

ScenarioConfig make_preset(const std::string& name, const PresetOptions& opts) {
  ScenarioConfig c;
  c.name = name;
  Mix mix{{false, true, true}};
  double load = 2.0;
  double dp = 0.5;
  double t_end = kEventTime + 3.0;
  bool trip = false;
  double p[3];

  if (name == "sweep-9bus") {
  } else if (name == "large-disturbance") {
    load = 2.25;
    dp = 0.75;
    t_end = 10.0;
  } else if (name == "loss-of-sm") {
    load = 2.1;
    trip = true;
    t_end = 10.0;
  } else if (name == "all-gfc") {
    mix = {{true, true, true}};
    load = 2.25;
    dp = 0.9;
    t_end = 10.0;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  if (opts.base_load) {
    if (!(*opts.base_load >= 0.0)) throw std::invalid_argument("base_load must be >= 0");
    const double scale = load > 0.0 ? *opts.base_load / load : 0.0;
    load = *opts.base_load;
    if (trip) {
      p[0] = 0.6 * scale;
      p[1] = p[2] = 0.75 * scale;
    } else {
      p[0] = p[1] = p[2] = load / 3.0;
    }
  } else if (trip) {
    p[0] = 0.6;
    p[1] = p[2] = 0.75;
  } else {
    p[0] = p[1] = p[2] = load / 3.0;
  }
  if (opts.dp) dp = *opts.dp;
  if (opts.t_end) t_end = *opts.t_end;

  c.base_load = load;
  c.system.network = network::build_nine_bus(load);
  c.system.devices = make_devices(mix, opts.strategy, p);
  c.system.slack_bus = 1;
  c.t_end = t_end;
  if (trip) {
    c.events.push_back({kEventTime, EventKind::kMachineTrip, 1, 0.0});
  } else {
    c.events.push_back({kEventTime, EventKind::kLoadStep, 7, dp});
  }
  return c;
}

}  // namespace gridforge
