#pragma once

#include "gridforge/network.hpp"

#include <stdexcept>
#include <vector>

namespace gridforge::network {

enum class BusType { kSlack, kPV, kPQ };

/// Power-flow specification of one node. PQ nodes have no device injection
/// (loads and shunts live in the admittance matrix).
struct PowerFlowNode {
  BusType type = BusType::kPQ;
  double p = 0.0;      // injected active power (PV)
  double v = 1.0;      // voltage magnitude (PV, slack)
  double angle = 0.0;  // slack angle, rad
};

struct PowerFlowResult {
  std::vector<Complex> voltages;
  /// Complex power injected by the device at each node (zero on PQ nodes).
  std::vector<Complex> injections;
  double mismatch = 0.0;
};

class PowerFlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton power flow in polar coordinates. Throws PowerFlowError when the
/// iteration diverges or lands on a non-physical voltage profile.
PowerFlowResult solve_power_flow(const std::vector<std::vector<Complex>>& y,
                                 const std::vector<PowerFlowNode>& nodes, double tol = 1e-12,
                                 int max_iter = 40);

}  // namespace gridforge::network
