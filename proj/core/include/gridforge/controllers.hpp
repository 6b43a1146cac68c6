#pragma once

// Converter control: cascaded AC voltage/current loops in the controller dq
// frame, modulation, DC-link voltage control and the four grid-forming
// reference models. All quantities are per unit unless noted; frequencies in
// rad/s.

#include "gridforge/network.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace gridforge::controllers {

using network::Complex;

enum class Strategy { kDroop, kVsm, kMatching, kDvoc };

std::string to_string(Strategy s);
/// Accepts droop | vsm | matching | dvoc; throws std::invalid_argument.
Strategy strategy_from_string(const std::string& name);

/// Raised when the dVOC oscillator state collapses to the origin.
class OscillatorCollapse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Common steady-state droop slope, pu frequency per pu power (0.1 %).
inline constexpr double kDefaultSlope = 0.001;

struct InnerLoopGains {
  double k_pv = 2.0, k_iv = 232.2;
  double k_pi = 0.73, k_ii = 0.0059;
  void validate() const;
};

struct VoltageLoopOutput {
  Complex i_s_ref;
  Complex dx_v;
};

/// dx_v = v_hat - v; i_s* = i + j b w v + k_pv (v_hat - v) + k_iv x_v, where
/// b is the filter susceptance and w the controller frequency in pu.
VoltageLoopOutput voltage_loop(Complex v_hat, Complex v, Complex i, double omega_pu, double b_f, Complex x_v,
                               const InnerLoopGains& g);

struct CurrentLoopOutput {
  Complex v_s_ref;
  Complex dx_i;
};

/// dx_i = i_s* - i_s; v_s* = v + (r + j x w) i_s + k_pi (i_s* - i_s) + k_ii x_i.
CurrentLoopOutput current_loop(Complex i_s_ref, Complex i_s, Complex v, double omega_pu, double r_f, double x_f,
                               Complex x_i, const InnerLoopGains& g);

/// m = (2 / v_dc*) v_s* rotated from the dq frame at angle theta.
Complex modulation(Complex v_s_ref_dq, double theta, double v_dc_star = 1.0);

struct DcControlParams {
  double k_dc = 1.0 / kDefaultSlope;
  double g_dc = 0.01;
  double v_dc_star = 1.0;
  double p_star = 0.0;
};

/// i_dc* = k_dc (v_dc* - v_dc) + G_dc v_dc + p*/v_dc* + (v_dc i_x - p)/v_dc*.
double dc_voltage_control(double v_dc, double i_x, double p, const DcControlParams& c);

struct DroopParams {
  double d_omega = 2.0 * std::numbers::pi * 50.0 * kDefaultSlope;  // rad/s per pu
  double omega_star = 2.0 * std::numbers::pi * 50.0;
  double k_p = 0.001, k_i = 0.5;
  double v_star = 1.0;
  double p_star = 0.0;
};

struct DroopOutput {
  double omega = 0.0;  // rad/s
  double v_hat_d = 0.0;
  double dx = 0.0;     // voltage integrator derivative
};

/// w = w* + d_w (p* - p); v_hat_d = k_p (v* - |v|) + k_i x.
DroopOutput droop_reference(double p, double v_mag, double x, const DroopParams& c);

struct VsmParams {
  double d_p = 1.0 / (std::numbers::pi * 100.0 * std::numbers::pi * 100.0 * kDefaultSlope);
  double j = 0.02 * d_p;
  double omega_star = 2.0 * std::numbers::pi * 50.0;
  double k_p = 0.001, k_i = 0.0021;
  double v_star = 1.0;
  double p_star = 0.0;
};

struct VsmOutput {
  double dtheta = 0.0;  // = omega, rad/s
  double domega = 0.0;  // rad/s^2
  double v_hat_mag = 0.0;
  double dx_if = 0.0;   // excitation integrator derivative
};

/// J dw/dt = D_p (w* - w) + (p* - p)/w*; |v_hat| = w M_f i_f with
/// M_f i_f = k_p (v* - |v|) + k_i x.
VsmOutput vsm_reference(double p, double v_mag, double omega, double x_if, const VsmParams& c);

struct MatchingParams {
  double k_theta = 2.0 * std::numbers::pi * 50.0;  // w* / v_dc*, rad/s per unit of v_dc
  double k_p = 0.001, k_i = 0.5;
  double v_star = 1.0;
};

struct MatchingOutput {
  double omega = 0.0;  // rad/s
  double mu = 0.0;
  double dx = 0.0;
};

/// w = k_theta v_dc; mu = k_p (v* - |v|) + k_i x.
MatchingOutput matching_reference(double v_dc, double v_mag, double x, const MatchingParams& c);

struct DvocParams {
  double eta = 2.0 * std::numbers::pi * 50.0 * kDefaultSlope;  // rad/s per pu
  double alpha = 0.021 * 6.66e4 / eta;
  double kappa = std::numbers::pi / 2.0;
  double omega_star = 2.0 * std::numbers::pi * 50.0;
  double v_star = 1.0;
  double p_star = 0.0;
  double q_star = 0.0;
};

/// dv_hat/dt = (w* - w_frame) J v_hat + eta (K v_hat - R(kappa) i
///             + alpha/v*^2 (v*^2 - |v_hat|^2) v_hat),
/// K = R(kappa) [[p*, q*], [-q*, p*]] / v*^2. `omega_frame` is the speed of
/// the coordinate frame in rad/s (0 for stationary alpha-beta). Throws
/// OscillatorCollapse when |v_hat| vanishes.
Complex dvoc_reference(Complex i, Complex v_hat, const DvocParams& c, double omega_frame = 0.0);

struct DvocPolar {
  double theta_dot = 0.0;  // rad/s, stationary frame
  double r_dot = 0.0;
};

/// Polar form for kappa = pi/2 in terms of the oscillator-side power
/// p + jq = v_hat conj(i):
///   theta_dot = w* + eta (p*/v*^2 - p/r^2)
///   r_dot = eta r (q*/v*^2 - q/r^2 + alpha/v*^2 (v*^2 - r^2)).
DvocPolar dvoc_polar(double p, double q, double r, const DvocParams& c);

/// Gains of all strategies derived from one common steady-state droop slope
/// `slope` (pu frequency per pu power), so that every strategy and a governor
/// with gain 1/slope share load identically.
struct ControllerGains {
  InnerLoopGains inner;
  double k_dc = 1.0 / kDefaultSlope;
  DroopParams droop;
  VsmParams vsm;
  MatchingParams matching;
  DvocParams dvoc;
};

ControllerGains derive_gains(double slope = kDefaultSlope, double omega_star = 2.0 * std::numbers::pi * 50.0);

/// The table values taken literally as per-unit numbers.
ControllerGains literal_gains(double omega_star = 2.0 * std::numbers::pi * 50.0);

}  // namespace gridforge::controllers
