#include "gridforge/controllers.hpp"
#include "gridforge/converter.hpp"
#include "gridforge/numerics.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace gridforge;
using namespace gridforge::controllers;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kWs = 2.0 * std::numbers::pi * 50.0;
const Complex kJ(0.0, 1.0);

InnerLoopGains table_inner() { return {0.52, 232.2, 0.73, 0.0059}; }
}  // namespace

TEST_CASE("voltage loop") {
  const auto g = table_inner();
  const double b = 0.1885;
  const Complex v(0.98, 0.1), i(0.6, -0.2);
  const auto ff = voltage_loop(v, v, i, 1.0, b, Complex{}, g);
  CHECK_THAT(ff.i_s_ref.real(), WithinAbs((i + kJ * b * v).real(), 1e-15));
  CHECK_THAT(ff.i_s_ref.imag(), WithinAbs((i + kJ * b * v).imag(), 1e-15));
  CHECK(ff.dx_v == Complex{});

  const auto zero = voltage_loop({1.0, 0.0}, {1.0, 0.0}, Complex{}, 0.0, b, Complex{}, g);
  CHECK(zero.i_s_ref == Complex{});

  const auto prop = voltage_loop({1.1, 0.0}, {1.0, 0.0}, Complex{}, 0.0, b, Complex{}, g);
  CHECK_THAT(prop.i_s_ref.real(), WithinAbs(0.052, 1e-12));
  CHECK_THAT(prop.i_s_ref.imag(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("current loop") {
  const auto g = table_inner();
  const double r = 5e-4, x = 0.0314;
  const Complex v(1.0, 0.05), is(0.7, 0.1);
  const auto ff = current_loop(is, is, v, 1.0, r, x, Complex{}, g);
  const Complex expect = v + Complex(r, x) * is;
  CHECK_THAT(ff.v_s_ref.real(), WithinAbs(expect.real(), 1e-15));
  CHECK_THAT(ff.v_s_ref.imag(), WithinAbs(expect.imag(), 1e-15));

  const auto prop = current_loop({0.1, 0.0}, Complex{}, Complex{}, 0.0, 0.0, x, Complex{}, g);
  CHECK_THAT(prop.v_s_ref.real(), WithinAbs(0.073, 1e-12));

  const auto pass = current_loop(Complex{}, Complex{}, v, 0.0, 0.0, x, Complex{}, g);
  CHECK(pass.v_s_ref == v);
}

TEST_CASE("modulation") {
  const Complex m = modulation({0.5, 0.0}, 0.0);
  CHECK(m == Complex(1.0, 0.0));
  const Complex rotated = modulation({0.5, 0.0}, std::numbers::pi / 2.0);
  CHECK_THAT(rotated.real(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(rotated.imag(), WithinAbs(1.0, 1e-15));

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Complex v{u(rng), u(rng)};
    const double th = u(rng);
    CHECK_THAT(std::abs(modulation(v, th)), WithinRel(std::abs(modulation(v, 0.0)), 1e-14));
    const Complex a = modulation(v * std::polar(1.0, th), 0.0), b = modulation(v, th);
    CHECK_THAT(a.real(), WithinAbs(b.real(), 1e-13));
    CHECK_THAT(a.imag(), WithinAbs(b.imag(), 1e-13));
  }
}

TEST_CASE("DC voltage control") {
  DcControlParams c;
  c.p_star = 0.7;
  // v_dc at its reference and converter power balanced
  const double p = 0.65, i_x = p / 1.0;
  CHECK_THAT(dc_voltage_control(1.0, i_x, p, c), WithinAbs(c.g_dc + c.p_star, 1e-15));

  // the error term is linear in the deficit; 1 V on a 2.44 kV link
  const auto lit = literal_gains();
  c.k_dc = lit.k_dc;
  const double one_volt = 1.0 / 2440.0;
  const double base = dc_voltage_control(1.0, i_x, p, c);
  const double low = dc_voltage_control(1.0 - one_volt, i_x / (1.0 - one_volt), p, c);
  CHECK_THAT(low - base - c.g_dc * (-one_volt), WithinAbs(lit.k_dc * one_volt, 1e-12));
}

TEST_CASE("droop reference") {
  DroopParams c;
  c.p_star = 0.6;
  CHECK(droop_reference(0.6, 1.0, 0.0, c).omega == kWs);
  c.d_omega = 2.0 * std::numbers::pi * 0.05;
  CHECK_THAT(droop_reference(0.3, 1.0, 0.0, c).omega - kWs, WithinAbs(2.0 * std::numbers::pi * 0.015, 1e-12));
  const auto settled = droop_reference(0.6, 1.0, 2.0, c);
  CHECK(settled.dx == 0.0);
  CHECK(settled.v_hat_d == c.k_i * 2.0);
}

TEST_CASE("virtual synchronous machine reference") {
  VsmParams c;
  c.p_star = 0.6;
  const double p = 0.75;
  const double w_ss = kWs + (c.p_star - p) / (c.d_p * kWs);
  CHECK_THAT(vsm_reference(p, 1.0, w_ss, 0.0, c).domega, WithinAbs(0.0, 1e-9));

  CHECK_THAT(c.j / c.d_p, WithinRel(0.02, 1e-12));
  const auto lit = literal_gains();
  CHECK_THAT(lit.vsm.j / lit.vsm.d_p, WithinRel(0.02, 1e-12));

  const auto out = vsm_reference(c.p_star, c.v_star, kWs, c.v_star / kWs / c.k_i, c);
  CHECK_THAT(out.v_hat_mag, WithinAbs(c.v_star, 1e-14));
  CHECK(out.dtheta == kWs);
}

TEST_CASE("matching reference") {
  MatchingParams c;
  CHECK(matching_reference(1.0, 1.0, 0.0, c).omega == kWs);
  CHECK_THAT(matching_reference(0.98, 1.0, 0.0, c).omega, WithinRel(0.98 * kWs, 1e-15));
  const double k_theta_si = kWs / 2440.0;
  CHECK_THAT(k_theta_si, WithinAbs(0.1288, 5e-5));
  CHECK_THAT(k_theta_si * 2440.0, WithinRel(c.k_theta, 1e-15));
}

TEST_CASE("dVOC is a harmonic oscillator at its set-point") {
  DvocParams c;
  c.p_star = 0.6;
  c.q_star = -0.1;
  const Complex v = std::polar(c.v_star, 0.4);
  // current that cancels K v_hat: R(kappa) i = K v_hat
  const Complex rot = std::polar(1.0, c.kappa);
  const Complex i = Complex(c.p_star, -c.q_star) * v / (c.v_star * c.v_star);
  const Complex d = dvoc_reference(i, v, c);
  const Complex expect = kJ * c.omega_star * v;
  CHECK_THAT(d.real(), WithinAbs(expect.real(), 1e-9));
  CHECK_THAT(d.imag(), WithinAbs(expect.imag(), 1e-9));
  (void)rot;

  DvocParams z;
  const Complex d0 = dvoc_reference(Complex{}, v, z);
  CHECK_THAT(d0.real(), WithinAbs(expect.real(), 1e-9));
  CHECK_THAT(d0.imag(), WithinAbs(expect.imag(), 1e-9));

  CHECK_THROWS_AS(dvoc_reference(Complex{}, Complex{}, z), OscillatorCollapse);
}

TEST_CASE("dVOC vector form agrees with its polar form") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DvocParams c;
  for (int k = 0; k < 1000; ++k) {
    c.p_star = u(rng);
    c.q_star = u(rng);
    const double r = 1.0 + 0.5 * u(rng);
    const Complex v = std::polar(r, 3.2 * u(rng));
    const Complex i{1.5 * u(rng), 1.5 * u(rng)};
    const Complex d = dvoc_reference(i, v, c);
    const double theta_dot = (std::conj(v) * d).imag() / std::norm(v);
    const double r_dot = (std::conj(v) * d).real() / r;
    const Complex s = v * std::conj(i);
    const auto polar = dvoc_polar(s.real(), s.imag(), r, c);
    CHECK_THAT(theta_dot, WithinAbs(polar.theta_dot, 1e-10));
    CHECK_THAT(r_dot, WithinAbs(polar.r_dot, 1e-10));
  }
}

TEST_CASE("dVOC amplitude converges monotonically to the set-point") {
  DvocParams c;
  c.p_star = 0.6;
  for (double r0 : {0.02, 0.5, 1.4, 1.98}) {
    numerics::Vector x(2);
    x << r0, 0.0;
    numerics::DerivativeFn f = [&](double, const numerics::Vector& xx, numerics::Vector& dx) {
      const Complex d = dvoc_reference(Complex{}, Complex(xx[0], xx[1]), c, c.omega_star);
      dx[0] = d.real();
      dx[1] = d.imag();
    };
    numerics::IntegratorConfig cfg;
    cfg.dt = 1e-5;
    numerics::Stepper s(cfg);
    double prev = std::abs(r0 - c.v_star);
    bool monotone = true;
    for (int k = 0; k < 20000; ++k) {
      s.step(k * cfg.dt, x, f);
      const double gap = std::abs(std::hypot(x[0], x[1]) - c.v_star);
      if (gap > prev + 1e-14) monotone = false;
      prev = gap;
    }
    CHECK(monotone);
    CHECK(prev < 1e-6);
  }
}

TEST_CASE("derived gains share one droop slope") {
  const double s = 0.001;
  const auto g = derive_gains(s);
  CHECK_THAT(g.droop.d_omega / kWs, WithinRel(s, 1e-12));
  CHECK_THAT(1.0 / (g.vsm.d_p * kWs) / kWs, WithinRel(s, 1e-12));
  CHECK_THAT(g.dvoc.eta / kWs, WithinRel(s, 1e-12));
  CHECK_THAT(1.0 / g.k_dc, WithinRel(s, 1e-12));
  CHECK_THAT(g.matching.k_theta, WithinRel(kWs, 1e-15));
  // default slope is the 2 pi 0.05 rad/s per pu of the published droop gain
  CHECK_THAT(derive_gains().droop.d_omega, WithinRel(2.0 * std::numbers::pi * 0.05, 1e-12));
  CHECK_THROWS_AS(derive_gains(0.0), std::invalid_argument);
}

TEST_CASE("strategy names") {
  for (auto s : {Strategy::kDroop, Strategy::kVsm, Strategy::kMatching, Strategy::kDvoc}) {
    CHECK(strategy_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(strategy_from_string("pll"), std::invalid_argument);
}

TEST_CASE("inner loops track a constant reference with zero error") {
  // converter filter feeding a resistive-inductive load in the controller frame
  converter::ConverterParams p;
  const InnerLoopGains g;
  const Complex v_hat(1.0, 0.0);
  const Complex z_load(1.2, 0.4);
  numerics::Vector x = numerics::Vector::Zero(converter::kConverterStateCount + 4);
  x[converter::kVdc] = 1.0;
  numerics::DerivativeFn f = [&](double, const numerics::Vector& xx, numerics::Vector& dx) {
    const Complex i_s(xx[converter::kIsRe], xx[converter::kIsIm]);
    const Complex v(xx[converter::kVRe], xx[converter::kVIm]);
    const Complex i_out = v / z_load;
    const Complex x_v(xx[6], xx[7]), x_i(xx[8], xx[9]);
    const auto vl = voltage_loop(v_hat, v, i_out, 1.0, p.b, x_v, g);
    const auto cl = current_loop(vl.i_s_ref, i_s, v, 1.0, p.r, p.x, x_i, g);
    const Complex m = modulation(cl.v_s_ref, 0.0);
    std::array<double, converter::kConverterStateCount> xs{}, d{};
    std::copy(xx.data(), xx.data() + converter::kConverterStateCount, xs.begin());
    converter::converter_derivatives(p, xs, m, i_out, 0.0, d);
    for (std::size_t k = 0; k < d.size(); ++k) dx[static_cast<Eigen::Index>(k)] = d[k];
    dx[converter::kVdc] = 0.0;  // stiff DC link
    dx[6] = vl.dx_v.real();
    dx[7] = vl.dx_v.imag();
    dx[8] = cl.dx_i.real();
    dx[9] = cl.dx_i.imag();
  };
  numerics::IntegratorConfig cfg;
  cfg.dt = 1e-5;
  numerics::Stepper s(cfg);
  for (int k = 0; k < 100000; ++k) s.step(k * cfg.dt, x, f);
  const Complex v(x[converter::kVRe], x[converter::kVIm]);
  CHECK(std::abs(v - v_hat) <= 1e-6);
}
