#include "gridforge/machine.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gridforge::machine {

void SmParams::validate() const {
  if (!(s_r > 0.0 && v_r > 0.0 && omega_b > 0.0)) throw std::invalid_argument("machine ratings must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("machine H must be > 0");
  if (!(tau_g > 0.0)) throw std::invalid_argument("machine tau_g must be > 0");
  if (d_p < 0.0) throw std::invalid_argument("machine d_p must be >= 0");
  const auto& e = el;
  if (!(e.x_d >= e.x_dp && e.x_dp >= e.x_dpp && e.x_dpp > e.x_l && e.x_l >= 0.0)) {
    throw std::invalid_argument("machine d-axis reactances must satisfy x_d >= x_d' >= x_d'' > x_l >= 0");
  }
  if (!(e.x_q >= e.x_qp && e.x_qp >= e.x_qpp && e.x_qpp > e.x_l)) {
    throw std::invalid_argument("machine q-axis reactances must satisfy x_q >= x_q' >= x_q'' > x_l");
  }
  if (!(e.t_d0p > 0.0 && e.t_q0p > 0.0 && e.t_d0pp > 0.0 && e.t_q0pp > 0.0)) {
    throw std::invalid_argument("machine time constants must be > 0");
  }
  if (e.r_s < 0.0) throw std::invalid_argument("machine r_s must be >= 0");
}

void ExciterParams::validate() const {
  if (!(k_a > 0.0)) throw std::invalid_argument("exciter k_a must be > 0");
  if (!(t_a > 0.0)) throw std::invalid_argument("exciter t_a must be > 0");
  if (!(e_f_min < e_f_max)) throw std::invalid_argument("exciter limits must satisfy e_f_min < e_f_max");
}

void PssParams::validate() const {
  if (!(t_w > 0.0 && t_1 > 0.0 && t_2 > 0.0 && t_3 > 0.0 && t_4 > 0.0)) {
    throw std::invalid_argument("PSS time constants must be > 0");
  }
  if (!(v_max > 0.0)) throw std::invalid_argument("PSS output limit must be > 0");
}

FundamentalParams to_fundamental(const SmElectrical& e, double omega_b) {
  FundamentalParams f{};
  f.x_ad = e.x_d - e.x_l;
  f.x_aq = e.x_q - e.x_l;
  f.x_fd = f.x_ad * (e.x_dp - e.x_l) / (f.x_ad - (e.x_dp - e.x_l));
  f.x_1d = 1.0 / (1.0 / (e.x_dpp - e.x_l) - 1.0 / f.x_ad - 1.0 / f.x_fd);
  f.x_1q = f.x_aq * (e.x_qp - e.x_l) / (f.x_aq - (e.x_qp - e.x_l));
  f.x_2q = 1.0 / (1.0 / (e.x_qpp - e.x_l) - 1.0 / f.x_aq - 1.0 / f.x_1q);

  f.r_fd = (f.x_ad + f.x_fd) / (omega_b * e.t_d0p);
  f.r_1d = (f.x_1d + f.x_ad * f.x_fd / (f.x_ad + f.x_fd)) / (omega_b * e.t_d0pp);
  f.r_1q = (f.x_aq + f.x_1q) / (omega_b * e.t_q0p);
  f.r_2q = (f.x_2q + f.x_aq * f.x_1q / (f.x_aq + f.x_1q)) / (omega_b * e.t_q0pp);

  for (double v : {f.x_fd, f.x_1d, f.x_1q, f.x_2q}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("machine reactances yield a non-physical equivalent circuit");
    }
  }
  return f;
}

GovernorOutput governor_turbine(double omega, double p_ref, double p_tau, const SmParams& params,
                                double omega_ref) {
  GovernorOutput out;
  out.p = p_ref + params.d_p * (omega_ref - omega);
  out.dp_tau = (out.p - p_tau) / params.tau_g;
  return out;
}

ExciterOutput exciter_avr(double v_terminal_mag, double v_ref, double pss_out, double v_sensed,
                          double e_f0, const ExciterParams& params) {
  ExciterOutput out;
  out.dv_sensed = (v_terminal_mag - v_sensed) / params.t_a;
  out.e_f = std::clamp(e_f0 + params.k_a * (v_ref - v_sensed + pss_out), params.e_f_min, params.e_f_max);
  return out;
}

PssOutput pss(double omega, std::span<const double, 3> state, const PssParams& p) {
  PssOutput out;
  const double dw = omega - 1.0;
  const double washout = p.k_s * (dw - state[0]);
  const double stage1 = state[1] + (p.t_1 / p.t_2) * (washout - state[1]);
  const double stage2 = state[2] + (p.t_3 / p.t_4) * (stage1 - state[2]);
  out.derivatives = {(dw - state[0]) / p.t_w, (washout - state[1]) / p.t_2, (stage1 - state[2]) / p.t_4};
  out.signal = std::clamp(stage2, -p.v_max, p.v_max);
  return out;
}

SynchronousMachine::SynchronousMachine(SmParams params, ExciterParams exciter, PssParams pss,
                                       double s_base)
    : params_(params), exciter_(exciter), pss_(pss) {
  params_.validate();
  exciter_.validate();
  pss_.validate();
  if (!(s_base > 0.0)) throw std::invalid_argument("system power base must be > 0");
  fp_ = to_fundamental(params_.el, params_.omega_b);
  ratio_ = params_.s_r / s_base;

  const double xl = params_.el.x_l;
  Eigen::Matrix3d ld;
  ld << -(xl + fp_.x_ad), fp_.x_ad, fp_.x_ad,
        -fp_.x_ad, fp_.x_ad + fp_.x_fd, fp_.x_ad,
        -fp_.x_ad, fp_.x_ad, fp_.x_ad + fp_.x_1d;
  Eigen::Matrix3d lq;
  lq << -(xl + fp_.x_aq), fp_.x_aq, fp_.x_aq,
        -fp_.x_aq, fp_.x_aq + fp_.x_1q, fp_.x_aq,
        -fp_.x_aq, fp_.x_aq, fp_.x_aq + fp_.x_2q;
  const Eigen::Matrix3d ild = ld.inverse();
  const Eigen::Matrix3d ilq = lq.inverse();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      inv_ld_[r * 3 + c] = ild(r, c);
      inv_lq_[r * 3 + c] = ilq(r, c);
    }
  }
}

Complex SynchronousMachine::stator_current_dq(SmStateSpan x) const {
  const double i_d = inv_ld_[0] * x[kPsiD] + inv_ld_[1] * x[kPsiFd] + inv_ld_[2] * x[kPsi1d];
  const double i_q = inv_lq_[0] * x[kPsiQ] + inv_lq_[1] * x[kPsi1q] + inv_lq_[2] * x[kPsi2q];
  return {i_d, i_q};
}

SmOutputs SynchronousMachine::derivatives(SmStateSpan x, Complex v_t, const SmSetpoints& sp,
                                          SmDerivSpan dx, double frame_speed) const {
  const double wb = params_.omega_b;
  const auto& f = fp_;

  const double psi_d = x[kPsiD], psi_fd = x[kPsiFd], psi_1d = x[kPsi1d];
  const double psi_q = x[kPsiQ], psi_1q = x[kPsi1q], psi_2q = x[kPsi2q];
  const double i_d = inv_ld_[0] * psi_d + inv_ld_[1] * psi_fd + inv_ld_[2] * psi_1d;
  const double i_fd = inv_ld_[3] * psi_d + inv_ld_[4] * psi_fd + inv_ld_[5] * psi_1d;
  const double i_1d = inv_ld_[6] * psi_d + inv_ld_[7] * psi_fd + inv_ld_[8] * psi_1d;
  const double i_q = inv_lq_[0] * psi_q + inv_lq_[1] * psi_1q + inv_lq_[2] * psi_2q;
  const double i_1q = inv_lq_[3] * psi_q + inv_lq_[4] * psi_1q + inv_lq_[5] * psi_2q;
  const double i_2q = inv_lq_[6] * psi_q + inv_lq_[7] * psi_1q + inv_lq_[8] * psi_2q;

  const double omega = x[kOmega];
  const Complex to_rotor = std::polar(1.0, -x[kDelta]);
  const Complex v_dq = v_t * to_rotor;
  const double v_d = v_dq.real(), v_q = v_dq.imag();

  const PssOutput stab = pss(omega, std::span<const double, 3>(x.data() + kPssWashout, 3), pss_);
  const ExciterOutput exc = exciter_avr(std::abs(v_t), sp.v_ref, stab.signal, x[kVSensed], sp.e_f0, exciter_);
  const GovernorOutput gov = governor_turbine(omega, sp.p_ref, x[kPTau], params_);

  const double r_s = params_.el.r_s;
  dx[kPsiD] = wb * (v_d + r_s * i_d + omega * psi_q);
  dx[kPsiQ] = wb * (v_q + r_s * i_q - omega * psi_d);
  dx[kPsiFd] = wb * f.r_fd * (exc.e_f / f.x_ad - i_fd);
  dx[kPsi1d] = -wb * f.r_1d * i_1d;
  dx[kPsi1q] = -wb * f.r_1q * i_1q;
  dx[kPsi2q] = -wb * f.r_2q * i_2q;

  const double t_e = psi_d * i_q - psi_q * i_d;
  const double t_m = x[kPTau] / omega;
  dx[kDelta] = wb * (omega - frame_speed);
  dx[kOmega] = (t_m - t_e) / (2.0 * params_.h);
  dx[kPTau] = gov.dp_tau;
  dx[kVSensed] = exc.dv_sensed;
  dx[kPssWashout] = stab.derivatives[0];
  dx[kPssLeadLag1] = stab.derivatives[1];
  dx[kPssLeadLag2] = stab.derivatives[2];

  SmOutputs out;
  out.i_terminal = Complex{i_d, i_q} * std::conj(to_rotor) * ratio_;
  out.p_e = (v_t * std::conj(out.i_terminal)).real();
  out.t_e = t_e;
  out.e_f = exc.e_f;
  out.pss = stab.signal;
  out.p_gov = gov.p;
  return out;
}

SmSetpoints SynchronousMachine::initialize(Complex v_t, Complex i_t,
                                           std::span<double, kSmStateCount> x) const {
  const auto& f = fp_;
  const double r_s = params_.el.r_s;
  const double xl = params_.el.x_l;
  const Complex i_m = i_t / ratio_;
  const Complex e_q = v_t + Complex{r_s, params_.el.x_q} * i_m;
  const double delta = std::arg(e_q) - std::numbers::pi / 2.0;
  const Complex rot = std::polar(1.0, -delta);
  const Complex v_dq = v_t * rot;
  const Complex i_dq = i_m * rot;
  const double v_d = v_dq.real(), v_q = v_dq.imag();
  const double i_d = i_dq.real(), i_q = i_dq.imag();

  const double psi_d = v_q + r_s * i_q;
  const double psi_q = -(v_d + r_s * i_d);
  const double i_fd = (psi_d + (xl + f.x_ad) * i_d) / f.x_ad;
  const double e_fd = f.x_ad * i_fd;
  if (e_fd < exciter_.e_f_min || e_fd > exciter_.e_f_max) {
    std::ostringstream msg;
    msg << "machine back-solve needs field voltage " << e_fd << " pu outside [" << exciter_.e_f_min
        << ", " << exciter_.e_f_max << "]";
    throw std::runtime_error(msg.str());
  }

  x[kPsiD] = psi_d;
  x[kPsiQ] = psi_q;
  x[kPsiFd] = -f.x_ad * i_d + (f.x_ad + f.x_fd) * i_fd;
  x[kPsi1d] = -f.x_ad * i_d + f.x_ad * i_fd;
  x[kPsi1q] = -f.x_aq * i_q;
  x[kPsi2q] = -f.x_aq * i_q;
  x[kDelta] = delta;
  x[kOmega] = 1.0;
  const double t_e = psi_d * i_q - psi_q * i_d;
  x[kPTau] = t_e;
  x[kVSensed] = std::abs(v_t);
  x[kPssWashout] = 0.0;
  x[kPssLeadLag1] = 0.0;
  x[kPssLeadLag2] = 0.0;

  return {t_e, std::abs(v_t), e_fd};
}

}  // namespace gridforge::machine
