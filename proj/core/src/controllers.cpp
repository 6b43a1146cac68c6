#include "gridforge/controllers.hpp"

#include <cmath>

namespace gridforge::controllers {

namespace {
constexpr Complex kJ{0.0, 1.0};
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kDroop: return "droop";
    case Strategy::kVsm: return "vsm";
    case Strategy::kMatching: return "matching";
    case Strategy::kDvoc: return "dvoc";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "droop") return Strategy::kDroop;
  if (name == "vsm") return Strategy::kVsm;
  if (name == "matching") return Strategy::kMatching;
  if (name == "dvoc") return Strategy::kDvoc;
  throw std::invalid_argument("unknown strategy '" + name + "' (expected droop, vsm, matching or dvoc)");
}

void InnerLoopGains::validate() const {
  if (k_pv < 0.0 || k_iv < 0.0 || k_pi < 0.0 || k_ii < 0.0) {
    throw std::invalid_argument("inner-loop gains must be >= 0");
  }
}

VoltageLoopOutput voltage_loop(Complex v_hat, Complex v, Complex i, double omega_pu, double b_f, Complex x_v,
                               const InnerLoopGains& g) {
  const Complex e = v_hat - v;
  return {i + kJ * (b_f * omega_pu) * v + g.k_pv * e + g.k_iv * x_v, e};
}

CurrentLoopOutput current_loop(Complex i_s_ref, Complex i_s, Complex v, double omega_pu, double r_f, double x_f,
                               Complex x_i, const InnerLoopGains& g) {
  const Complex e = i_s_ref - i_s;
  return {v + Complex{r_f, x_f * omega_pu} * i_s + g.k_pi * e + g.k_ii * x_i, e};
}

Complex modulation(Complex v_s_ref_dq, double theta, double v_dc_star) {
  return (2.0 / v_dc_star) * v_s_ref_dq * std::polar(1.0, theta);
}

double dc_voltage_control(double v_dc, double i_x, double p, const DcControlParams& c) {
  return c.k_dc * (c.v_dc_star - v_dc) + c.g_dc * v_dc + c.p_star / c.v_dc_star + (v_dc * i_x - p) / c.v_dc_star;
}

DroopOutput droop_reference(double p, double v_mag, double x, const DroopParams& c) {
  const double e = c.v_star - v_mag;
  return {c.omega_star + c.d_omega * (c.p_star - p), c.k_p * e + c.k_i * x, e};
}

VsmOutput vsm_reference(double p, double v_mag, double omega, double x_if, const VsmParams& c) {
  const double e = c.v_star - v_mag;
  VsmOutput out;
  out.dtheta = omega;
  out.domega = (c.d_p * (c.omega_star - omega) + (c.p_star - p) / c.omega_star) / c.j;
  out.v_hat_mag = omega * (c.k_p * e + c.k_i * x_if);
  out.dx_if = e;
  return out;
}

MatchingOutput matching_reference(double v_dc, double v_mag, double x, const MatchingParams& c) {
  const double e = c.v_star - v_mag;
  return {c.k_theta * v_dc, c.k_p * e + c.k_i * x, e};
}

Complex dvoc_reference(Complex i, Complex v_hat, const DvocParams& c, double omega_frame) {
  const double r2 = std::norm(v_hat);
  if (!(r2 > 1e-24)) throw OscillatorCollapse("dVOC oscillator state collapsed to zero");
  const double vs2 = c.v_star * c.v_star;
  const Complex rot = std::polar(1.0, c.kappa);
  // [[p, q], [-q, p]] acting on (a, b) is multiplication by p - jq.
  const Complex k_v = rot * Complex{c.p_star, -c.q_star} * v_hat / vs2;
  const Complex amp = (c.alpha / vs2) * (vs2 - r2) * v_hat;
  return kJ * (c.omega_star - omega_frame) * v_hat + c.eta * (k_v - rot * i + amp);
}

DvocPolar dvoc_polar(double p, double q, double r, const DvocParams& c) {
  const double vs2 = c.v_star * c.v_star;
  const double r2 = r * r;
  return {c.omega_star + c.eta * (c.p_star / vs2 - p / r2),
          c.eta * r * (c.q_star / vs2 - q / r2 + (c.alpha / vs2) * (vs2 - r2))};
}

ControllerGains derive_gains(double slope, double omega_star) {
  if (!(slope > 0.0)) throw std::invalid_argument("droop slope must be > 0");
  if (!(omega_star > 0.0)) throw std::invalid_argument("omega_star must be > 0");
  ControllerGains g;
  g.k_dc = 1.0 / slope;

  g.droop.omega_star = omega_star;
  g.droop.d_omega = omega_star * slope;

  g.vsm.omega_star = omega_star;
  g.vsm.d_p = 1.0 / (omega_star * omega_star * slope);
  g.vsm.j = 0.02 * g.vsm.d_p;  // 20 ms inertial time constant

  g.matching.k_theta = omega_star;  // v_dc in pu

  g.dvoc.omega_star = omega_star;
  g.dvoc.eta = omega_star * slope;
  // Keeps the amplitude-restoring rate 2 eta alpha of the reference tuning.
  g.dvoc.alpha = 0.021 * 6.66e4 / g.dvoc.eta;
  return g;
}

ControllerGains literal_gains(double omega_star) {
  ControllerGains g;
  g.k_dc = 1.6e3;
  g.droop.omega_star = omega_star;
  g.droop.d_omega = 2.0 * std::numbers::pi * 0.05;
  g.vsm.omega_star = omega_star;
  g.vsm.d_p = 1e5;
  g.vsm.j = 2e3;
  g.matching.k_theta = 0.12 * 2440.0;  // rad/(V s) applied to a 2.44 kV link
  g.dvoc.omega_star = omega_star;
  g.dvoc.eta = 0.021;
  g.dvoc.alpha = 6.66e4;
  return g;
}

}  // namespace gridforge::controllers
