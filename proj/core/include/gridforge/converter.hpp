#pragma once

// Average model of the aggregated two-level voltage source converter: DC-link
// capacitor, first-order DC source with current limit, LC output filter.

#include "gridforge/network.hpp"

#include <span>

namespace gridforge::converter {

using network::Complex;

/// Values of one converter module, SI units.
struct ModuleParams {
  double s_r = 500e3;        // VA
  double v_ac = 1e3;         // V, line-line RMS at the filter terminal
  double v_dc_star = 2440.0;  // V
  double g_dc = 0.0;         // S; 0 selects the 1 % rated-loss default
  double c_dc = 0.008;       // F
  double r = 0.001;          // Ohm
  double l = 200e-6;         // H
  double c = 300e-6;         // F
  bool literal_g_dc = false;  // use the published 0.83 S instead of the loss-based default

  /// g_dc actually used: explicit value, literal table value, or the
  /// conductance dissipating 1 % of s_r at v_dc_star.
  double effective_g_dc() const;
  void validate() const;
};

inline constexpr double kLiteralGdc = 0.83;
/// LV/MV transformer rating per module, VA.
inline constexpr double kModuleTransformerRating = 1.6e6;

/// Aggregate of n modules, SI units. Each "module count" n represents 2n
/// paralleled modules.
struct AggregateParams {
  double s_r = 0.0;
  double g_dc = 0.0, c_dc = 0.0;
  double r = 0.0, l = 0.0, c = 0.0;
  double transformer_s_r = 0.0;
};

/// G_dc = 2n g_dc, C_dc = 2n c_dc, R = r/2n, L = l/2n, C = 2n c; transformer
/// rating 2n times the per-module value. Throws std::invalid_argument for n < 1.
AggregateParams scale_module_params(const ModuleParams& m, int n,
                                    double module_transformer_s_r = kModuleTransformerRating);

/// Converter parameters in per unit of the system base. AC quantities use the
/// LV line-line voltage as base, DC quantities use v_dc_star and s_b; the DC
/// capacitance becomes a time constant.
struct ConverterParams {
  double g_dc = 0.01;     // pu
  double tau_c = 0.0953;  // s, C_dc v_dc*^2 / s_b
  double r = 5e-4;        // pu
  double x = 0.0314;      // pu reactance at omega_b
  double b = 0.1885;      // pu susceptance at omega_b
  double tau_dc = 0.05;   // s
  double i_max = 1.2;     // pu of the aggregate rating
  double rating = 1.0;    // aggregate rating / s_b
  double omega_b = 2.0 * std::numbers::pi * 50.0;
  bool clamp_modulation = false;

  /// DC current limit on the system base.
  double i_limit() const { return i_max * rating; }
  void validate() const;
};

ConverterParams to_per_unit(const ModuleParams& m, int n, double s_b, double omega_b);

/// Converter-side LV/MV transformer between the filter node and the MV bus.
network::LinearTransformer lv_mv_transformer(int lv_bus, int mv_bus, const AggregateParams& agg,
                                             double v_lv = 1e3, double v_mv = 13.8e3);

enum ConverterIndex : std::size_t {
  kVdc = 0,
  kIsRe,
  kIsIm,
  kVRe,
  kVIm,
  kITau,
  kConverterStateCount
};

struct DcSourceOutput {
  double i_dc = 0.0;
  double di_tau = 0.0;
};

/// tau_dc di_tau/dt = i_dc* - i_tau; i_dc = clamp(i_tau, -i_max, i_max).
DcSourceOutput dc_source(double i_dc_star, double i_tau, double tau_dc, double i_max);

struct ConverterOutputs {
  Complex v_s;     // switching-node voltage, 0.5 m v_dc
  double i_x = 0;  // 0.5 m^T i_s
};

/// Physical converter dynamics (v_dc, i_s, v). The i_tau derivative is left
/// to dc_source. `frame_speed` as in the network module.
ConverterOutputs converter_derivatives(const ConverterParams& p, std::span<const double> x, Complex m,
                                       Complex i_out, double i_dc, std::span<double> dx,
                                       double frame_speed = 1.0);

}  // namespace gridforge::converter
