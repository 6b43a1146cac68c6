#pragma once

// Synchronous machine: flux-linkage Park model with stator transients, one
// field and three damper windings, swing dynamics, plus speed-droop governor
// with first-order turbine, ST1A-style static exciter and a washout +
// two-stage lead-lag stabilizer.

#include "gridforge/network.hpp"

#include <array>
#include <numbers>
#include <span>
#include <stdexcept>

namespace gridforge::machine {

using network::Complex;

/// Standard (operational) parameters, pu on the machine rating.
struct SmElectrical {
  double x_d = 1.8, x_q = 1.7;
  double x_dp = 0.3, x_qp = 0.55;     // transient
  double x_dpp = 0.25, x_qpp = 0.25;  // subtransient
  double x_l = 0.15;
  double r_s = 0.0025;
  double t_d0p = 8.0, t_q0p = 0.4;     // s
  double t_d0pp = 0.03, t_q0pp = 0.05;  // s
};

struct SmParams {
  double s_r = 100e6;  // VA
  double v_r = 13.8e3;  // V
  double omega_b = 2.0 * std::numbers::pi * 50.0;
  double h = 3.7;        // inertia constant, s
  double d_p = 100.0;    // governor gain, pu power per pu frequency (1 % droop)
  double tau_g = 5.0;    // turbine time constant, s
  SmElectrical el;

  void validate() const;
};

/// ST1A-type static exciter with its built-in voltage regulator.
struct ExciterParams {
  double k_a = 200.0;
  double t_a = 0.01;  // s, sensed-voltage lag
  double e_f_min = -6.4;
  double e_f_max = 7.3;

  void validate() const;
};

struct PssParams {
  double k_s = 20.0;
  double t_w = 10.0;
  double t_1 = 0.05, t_2 = 0.02;
  double t_3 = 3.0, t_4 = 5.4;
  double v_max = 0.1;  // output limit, pu

  void validate() const;
};

/// Equivalent-circuit (fundamental) parameters derived from SmElectrical.
struct FundamentalParams {
  double x_ad, x_aq;
  double x_fd, x_1d;
  double x_1q, x_2q;
  double r_fd, r_1d;
  double r_1q, r_2q;
};

FundamentalParams to_fundamental(const SmElectrical& el, double omega_b);

/// Layout of the machine state block.
enum SmIndex : std::size_t {
  kPsiD = 0,
  kPsiQ,
  kPsiFd,
  kPsi1d,
  kPsi1q,
  kPsi2q,
  kDelta,   // rotor d-axis angle relative to the simulation frame, rad
  kOmega,   // rotor speed, pu
  kPTau,    // turbine power, pu
  kVSensed,
  kPssWashout,
  kPssLeadLag1,
  kPssLeadLag2,
  kSmStateCount
};

using SmStateSpan = std::span<const double, kSmStateCount>;
using SmDerivSpan = std::span<double, kSmStateCount>;

/// Governor set-point and exciter reference, fixed at initialization.
struct SmSetpoints {
  double p_ref = 0.0;  // governor p*
  double v_ref = 1.0;  // terminal voltage reference
  double e_f0 = 0.0;   // field-voltage bias at the operating point
};

struct GovernorOutput {
  double p = 0.0;      // governor output
  double dp_tau = 0.0;  // turbine state derivative
};

/// p = p* + d_p (w* - w); tau_g dp_tau/dt = p - p_tau.
GovernorOutput governor_turbine(double omega, double p_ref, double p_tau, const SmParams& params,
                                double omega_ref = 1.0);

struct ExciterOutput {
  double e_f = 0.0;
  double dv_sensed = 0.0;
};

/// First-order sensed voltage; e_f = clamp(e_f0 + k_a (v_ref - v_sensed + pss)).
ExciterOutput exciter_avr(double v_terminal_mag, double v_ref, double pss_out, double v_sensed,
                          double e_f0, const ExciterParams& params);

struct PssOutput {
  double signal = 0.0;
  std::array<double, 3> derivatives{};  // washout, lead-lag 1, lead-lag 2
};

/// Washout of the speed deviation cascaded with two lead-lag stages.
PssOutput pss(double omega, std::span<const double, 3> state, const PssParams& params);

struct SmOutputs {
  Complex i_terminal;  // injected into the network, system base
  double p_e = 0.0;    // terminal electrical power, system base
  double t_e = 0.0;    // air-gap torque, machine base
  double e_f = 0.0;
  double pss = 0.0;
  double p_gov = 0.0;
};

/// A machine with its control stack. Immutable after construction.
class SynchronousMachine {
 public:
  SynchronousMachine(SmParams params, ExciterParams exciter, PssParams pss, double s_base);

  const SmParams& params() const { return params_; }
  const ExciterParams& exciter() const { return exciter_; }
  const PssParams& pss_params() const { return pss_; }
  const FundamentalParams& fundamental() const { return fp_; }
  /// Machine rating over system power base.
  double rating_ratio() const { return ratio_; }

  /// Stator currents (d, q) in machine pu from the flux state.
  Complex stator_current_dq(SmStateSpan x) const;

  /// Time derivatives and terminal current for terminal voltage `v_t`
  /// (simulation frame, system base). `frame_speed` is the frame speed in pu.
  SmOutputs derivatives(SmStateSpan x, Complex v_t, const SmSetpoints& sp, SmDerivSpan dx,
                        double frame_speed = 1.0) const;

  /// Back-solves the steady state that delivers current `i_t` (system base)
  /// at terminal voltage `v_t`. Throws std::runtime_error when the required
  /// field voltage is outside the exciter limits.
  SmSetpoints initialize(Complex v_t, Complex i_t, std::span<double, kSmStateCount> x) const;

 private:
  SmParams params_;
  ExciterParams exciter_;
  PssParams pss_;
  FundamentalParams fp_;
  double ratio_;
  std::array<double, 9> inv_ld_{};  // row-major inverse of the d-axis inductance matrix
  std::array<double, 9> inv_lq_{};
};

}  // namespace gridforge::machine
