#include "gridforge/network.hpp"

namespace gridforge::network {

NetworkCase build_nine_bus(double base_load) {
  NetworkCase c;
  c.base = PerUnitBase{};

  for (int id = 1; id <= 3; ++id) c.buses.push_back({id, 13.8, kGeneratorBusShuntB, 0.0});
  for (int id = 4; id <= 9; ++id) c.buses.push_back({id, 230.0, 0.0, 0.0});

  // Canonical branch data (r, x, total charging b) on 100 MVA / 230 kV.
  struct Row {
    int from, to;
    double r, x, b;
  };
  constexpr Row kLines[] = {
      {4, 5, 0.0170, 0.0920, 0.1580}, {5, 6, 0.0390, 0.1700, 0.3580},
      {6, 7, 0.0119, 0.1008, 0.2090}, {7, 8, 0.0085, 0.0720, 0.1490},
      {8, 9, 0.0320, 0.1610, 0.3060}, {9, 4, 0.0100, 0.0850, 0.1760},
  };
  for (const auto& r : kLines) c.lines.push_back({r.from, r.to, r.r, r.x, 0.5 * r.b});

  // MV/HV step-up units: generator 1 -> 4, 2 -> 8, 3 -> 6.
  for (auto [lv, hv] : {std::pair{1, 4}, std::pair{2, 8}, std::pair{3, 6}}) {
    LinearTransformer t;
    t.from = lv;
    t.to = hv;
    c.transformers.push_back(t);
  }

  // Reactive/active ratios of the canonical load data (90+j30, 100+j35, 125+j50 MVA).
  const double p_each = base_load / 3.0;
  c.loads.push_back({5, p_each, p_each * 30.0 / 90.0});
  c.loads.push_back({7, p_each, p_each * 35.0 / 100.0});
  c.loads.push_back({9, p_each, p_each * 50.0 / 125.0});

  for (int id = 1; id <= 3; ++id) c.devices.push_back({id, DeviceKind::kMachine});
  return c;
}

}  // namespace gridforge::network
