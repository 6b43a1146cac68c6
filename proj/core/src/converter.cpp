#include "gridforge/converter.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridforge::converter {

double ModuleParams::effective_g_dc() const {
  if (g_dc > 0.0) return g_dc;
  if (literal_g_dc) return kLiteralGdc;
  return 0.01 * s_r / (v_dc_star * v_dc_star);
}

void ModuleParams::validate() const {
  if (!(s_r > 0.0 && v_ac > 0.0 && v_dc_star > 0.0)) {
    throw std::invalid_argument("converter ratings and v_dc_star must be > 0");
  }
  if (g_dc < 0.0) throw std::invalid_argument("converter g_dc must be >= 0");
  if (!(c_dc > 0.0 && l > 0.0 && c > 0.0)) throw std::invalid_argument("converter c_dc, l, c must be > 0");
  if (r < 0.0) throw std::invalid_argument("converter r must be >= 0");
}

AggregateParams scale_module_params(const ModuleParams& m, int n, double module_transformer_s_r) {
  if (n < 1) throw std::invalid_argument("module count n must be >= 1");
  m.validate();
  const double k = 2.0 * n;
  AggregateParams a;
  a.s_r = k * m.s_r;
  a.g_dc = k * m.effective_g_dc();
  a.c_dc = k * m.c_dc;
  a.r = m.r / k;
  a.l = m.l / k;
  a.c = k * m.c;
  a.transformer_s_r = k * module_transformer_s_r;
  return a;
}

void ConverterParams::validate() const {
  if (!(tau_c > 0.0)) throw std::invalid_argument("converter DC time constant must be > 0");
  if (!(tau_dc > 0.0)) throw std::invalid_argument("converter tau_dc must be > 0");
  if (!(i_max > 0.0)) throw std::invalid_argument("converter i_max must be > 0");
  if (!(x > 0.0 && b > 0.0)) throw std::invalid_argument("converter filter x, b must be > 0");
  if (r < 0.0 || g_dc < 0.0) throw std::invalid_argument("converter losses must be >= 0");
  if (!(rating > 0.0 && omega_b > 0.0)) throw std::invalid_argument("converter rating must be > 0");
}

ConverterParams to_per_unit(const ModuleParams& m, int n, double s_b, double omega_b) {
  const AggregateParams a = scale_module_params(m, n);
  const double z_b = m.v_ac * m.v_ac / s_b;
  const double dc = m.v_dc_star * m.v_dc_star / s_b;
  ConverterParams p;
  p.g_dc = a.g_dc * dc;
  p.tau_c = a.c_dc * dc;
  p.r = a.r / z_b;
  p.x = omega_b * a.l / z_b;
  p.b = omega_b * a.c * z_b;
  p.rating = a.s_r / s_b;
  p.omega_b = omega_b;
  p.validate();
  return p;
}

network::LinearTransformer lv_mv_transformer(int lv_bus, int mv_bus, const AggregateParams& agg,
                                             double v_lv, double v_mv) {
  network::LinearTransformer t;
  t.from = lv_bus;
  t.to = mv_bus;
  t.s_r = agg.transformer_s_r;
  t.v1 = v_lv;
  t.v2 = v_mv;
  t.r1 = t.r2 = 0.0073;
  t.l1 = t.l2 = 0.018;
  t.rm = 347.0;
  t.lm = 156.0;
  return t;
}

DcSourceOutput dc_source(double i_dc_star, double i_tau, double tau_dc, double i_max) {
  return {std::clamp(i_tau, -i_max, i_max), (i_dc_star - i_tau) / tau_dc};
}

ConverterOutputs converter_derivatives(const ConverterParams& p, std::span<const double> x, Complex m,
                                       Complex i_out, double i_dc, std::span<double> dx,
                                       double frame_speed) {
  const double v_dc = x[kVdc];
  const Complex i_s{x[kIsRe], x[kIsIm]};
  const Complex v{x[kVRe], x[kVIm]};
  if (p.clamp_modulation) {
    const double mag = std::abs(m);
    if (mag > 1.0) m /= mag;
  }
  ConverterOutputs out;
  out.v_s = 0.5 * m * v_dc;
  out.i_x = 0.5 * (m.real() * i_s.real() + m.imag() * i_s.imag());

  const Complex rot{0.0, frame_speed};
  dx[kVdc] = (i_dc - p.g_dc * v_dc - out.i_x) / p.tau_c;
  const Complex di = (p.omega_b / p.x) * (out.v_s - p.r * i_s - v - rot * p.x * i_s);
  const Complex dv = (p.omega_b / p.b) * (i_s - i_out - rot * p.b * v);
  dx[kIsRe] = di.real();
  dx[kIsIm] = di.imag();
  dx[kVRe] = dv.real();
  dx[kVIm] = dv.imag();
  return out;
}

}  // namespace gridforge::converter
