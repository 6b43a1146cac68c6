#pragma once

#include "gridforge/power_flow.hpp"
#include "gridforge/system.hpp"

#include <stdexcept>
#include <vector>

namespace gridforge {

/// Device back-solve failure (operating point outside a device's limits) or
/// a residual that could not be driven below tolerance.
class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitOptions {
  double pf_tol = 1e-13;
  double residual_tol = 1e-8;
  /// Newton polish of the full state when the back-solved residual exceeds
  /// polish_tol.
  bool polish = true;
  double polish_tol = 1e-11;
};

struct InitResult {
  Vector x;
  network::PowerFlowResult power_flow;  // indexed by network node
  double residual = 0.0;                // ||x'||_inf at x
  bool polished = false;
};

/// Power flow, device back-solve and optional polish. Stores the resulting
/// operating-point set-points in `sys`. Requires frame_speed = 1.
InitResult initialize_steady_state(System& sys, const InitOptions& opts = {});

/// ||x'||_inf with default inputs.
double derivative_residual(const System& sys, const Vector& x);

}  // namespace gridforge
