#include "gridforge/network.hpp"
#include "gridforge/numerics.hpp"
#include "gridforge/power_flow.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace gridforge;
using namespace gridforge::network;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Eval {
  std::vector<double> dx;
  std::vector<Complex> v, i_dev;
};

Eval evaluate(const NetworkModel& m, const std::vector<double>& x, const std::vector<Complex>& inj,
              const std::vector<Complex>& dev_v, const NetworkInputs& in) {
  Eval e;
  e.dx.assign(m.state_dim(), 0.0);
  e.v.assign(m.node_count(), {});
  e.i_dev.assign(m.node_count(), {});
  m.derivatives(x, inj, dev_v, in, e.dx, e.v, e.i_dev);
  return e;
}

NetworkCase two_bus(double r, double x) {
  NetworkCase c;
  c.buses = {{1, 230.0, 0.0, 0.0}, {2, 230.0, 0.0, 0.0}};
  c.lines = {{1, 2, r, x, 0.0}};
  return c;
}

}  // namespace

TEST_CASE("unexcited network has zero derivatives") {
  const NetworkCase c = build_nine_bus(2.0);
  const NetworkModel m(c, {});
  const std::vector<double> x(m.state_dim(), 0.0);
  const std::vector<Complex> zero(m.node_count());
  const Eval e = evaluate(m, x, zero, zero, m.default_inputs());
  for (double d : e.dx) CHECK(d == 0.0);
}

TEST_CASE("line current in sinusoidal steady state obeys the phasor relation") {
  const double r = 0.01, xl = 0.085;
  const NetworkModel rot(two_bus(r, xl), {1, 2}, 1.0);
  const NetworkModel stat(two_bus(r, xl), {1, 2}, 0.0);
  const Complex v1 = std::polar(1.02, 0.1), v2 = std::polar(0.98, -0.05);
  const Complex i = (v1 - v2) / Complex(r, xl);
  const std::vector<Complex> dev = {v1, v2};
  const std::vector<Complex> inj(2);

  std::vector<double> x(rot.state_dim(), 0.0);
  store_pair(x, rot.branch_state(0), i);
  const Eval e = evaluate(rot, x, inj, dev, rot.default_inputs());
  CHECK_THAT(e.dx[rot.branch_state(0)], WithinAbs(0.0, 1e-10));
  CHECK_THAT(e.dx[rot.branch_state(0) + 1], WithinAbs(0.0, 1e-10));

  // stationary frame: the phasor rotates, di/dt = j w_b i
  const Eval s = evaluate(stat, x, inj, dev, stat.default_inputs());
  const Complex di = load_pair(s.dx, stat.branch_state(0));
  const Complex expect = Complex(0.0, stat.omega_b()) * i;
  CHECK_THAT(di.real(), WithinAbs(expect.real(), 1e-9));
  CHECK_THAT(di.imag(), WithinAbs(expect.imag(), 1e-9));
}

TEST_CASE("load at 1 pu voltage draws its nominal power") {
  const ConstantImpedanceLoad load{5, 0.75, 0.3};
  const Complex v = std::polar(1.0, 0.7);
  const auto pq = instantaneous_power(v, load.admittance() * v);
  CHECK_THAT(pq.p, WithinAbs(0.75, 1e-14));
  CHECK_THAT(pq.q, WithinAbs(0.3, 1e-14));

  NetworkCase c;
  c.buses = {{1, 230.0, 0.0, 0.0}};
  c.loads = {load};
  c.loads[0].bus = 1;
  const NetworkModel m(c, {1});
  const Eval e = evaluate(m, std::vector<double>(m.state_dim(), 0.0), {Complex{}}, {Complex(1.0, 0.0)},
                          m.default_inputs());
  const auto drawn = instantaneous_power(Complex(1.0, 0.0), e.i_dev[0]);
  CHECK_THAT(drawn.p, WithinAbs(0.75, 1e-14));
  CHECK_THAT(drawn.q, WithinAbs(0.3, 1e-14));
}

TEST_CASE("instantaneous power examples and rotation invariance") {
  auto a = instantaneous_power({1.0, 0.0}, {1.0, 0.0});
  CHECK(a.p == 1.0);
  CHECK(a.q == 0.0);
  auto b = instantaneous_power({1.0, 0.0}, {0.0, -1.0});
  CHECK(b.p == 0.0);
  CHECK(b.q == 1.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Complex v{u(rng), u(rng)}, i{u(rng), u(rng)};
    const Complex rot = std::polar(1.0, u(rng) * 3.0);
    const Complex vd = v * rot, id = i * rot;
    const auto s = instantaneous_power(v, i);
    CHECK_THAT(s.p, WithinAbs(vd.real() * id.real() + vd.imag() * id.imag(), 1e-12));
    CHECK_THAT(s.q, WithinAbs(vd.imag() * id.real() - vd.real() * id.imag(), 1e-12));
  }
}

TEST_CASE("nine-bus case matches the published topology and data") {
  const NetworkCase c = build_nine_bus(2.0);
  CHECK(c.buses.size() == 9);
  CHECK(c.lines.size() == 6);
  CHECK(c.transformers.size() == 3);
  CHECK(c.loads.size() == 3);
  for (const auto& t : c.transformers) {
    CHECK(t.s_r == 210e6);
    CHECK(t.r1 == 0.0027);
    CHECK(t.r2 == 0.0027);
    CHECK(t.l1 == 0.08);
    CHECK(t.l2 == 0.08);
    CHECK(t.rm == 500.0);
    CHECK(t.lm == 500.0);
  }
  std::vector<int> load_buses;
  for (const auto& l : c.loads) {
    load_buses.push_back(l.bus);
    CHECK_THAT(l.p_nom, WithinAbs(2.0 / 3.0, 1e-15));
  }
  CHECK(load_buses == std::vector<int>{5, 7, 9});
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("stored energy changes at injected minus dissipated power") {
  const NetworkCase c = build_nine_bus(2.0);
  const NetworkModel m(c, {});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto in = m.default_inputs();
  in.load_scale[1] = 1.4;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(m.state_dim());
    for (auto& v : x) v = u(rng);
    std::vector<Complex> inj(m.node_count());
    for (auto& i : inj) i = {u(rng), u(rng)};
    const std::vector<Complex> none(m.node_count());
    const Eval e = evaluate(m, x, inj, none, in);

    // E is quadratic, so the central difference along dx is exact up to rounding
    const double h = 1e-4;
    std::vector<double> xp(x), xm(x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      xp[k] += h * e.dx[k];
      xm[k] -= h * e.dx[k];
    }
    const double de = (m.stored_energy(xp, none) - m.stored_energy(xm, none)) / (2 * h);
    double p_in = 0.0;
    for (std::size_t n = 0; n < m.node_count(); ++n) p_in += instantaneous_power(e.v[n], inj[n]).p;
    const double balance = p_in - m.dissipated_power(x, none, in);
    CHECK_THAT(de, WithinAbs(balance, 1e-8 * (1.0 + std::abs(balance))));
  }
}

TEST_CASE("network response is linear in the injected currents") {
  NetworkCase c = two_bus(0.02, 0.1);
  c.buses[0].shunt_b = 0.05;
  c.buses[1].shunt_b = 0.08;
  c.loads = {{2, 0.5, 0.1}};
  const NetworkModel m(c, {});
  const auto in = m.default_inputs();

  auto simulate = [&](double ka, double kb) {
    numerics::DerivativeFn f = [&](double t, const numerics::Vector& x, numerics::Vector& dx) {
      std::vector<Complex> inj = {ka * Complex(std::sin(40.0 * t), 0.3), kb * Complex(0.0, std::cos(90.0 * t))};
      std::vector<double> xs(x.data(), x.data() + x.size()), d(m.state_dim());
      std::vector<Complex> v(m.node_count()), idev(m.node_count());
      m.derivatives(xs, inj, std::vector<Complex>(m.node_count()), in, d, v, idev);
      for (std::size_t k = 0; k < d.size(); ++k) dx[static_cast<Eigen::Index>(k)] = d[k];
    };
    numerics::IntegratorConfig cfg;
    cfg.dt = 1e-4;
    numerics::Stepper s(cfg);
    numerics::Vector x = numerics::Vector::Zero(static_cast<Eigen::Index>(m.state_dim()));
    for (int k = 0; k < 500; ++k) s.step(k * cfg.dt, x, f);
    return x;
  };
  const auto a = simulate(1.0, 0.0), b = simulate(0.0, 1.0), ab = simulate(1.0, 1.0);
  CHECK((a + b - ab).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ab.cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("power flow of an unloaded network is flat") {
  const NetworkModel m(two_bus(0.01, 0.1), {1, 2});
  const auto y = m.admittance_matrix(m.default_inputs());
  std::vector<PowerFlowNode> nodes(2);
  nodes[0].type = BusType::kSlack;
  nodes[1].type = BusType::kPV;
  nodes[1].p = 0.0;
  const auto pf = solve_power_flow(y, nodes);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK_THAT(std::abs(pf.voltages[k]), WithinAbs(1.0, 1e-12));
    CHECK_THAT(std::arg(pf.voltages[k]), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(pf.injections[k]), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("invalid cases are rejected") {
  NetworkCase c = two_bus(0.01, 0.1);
  c.lines[0].to = 42;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  NetworkCase d = two_bus(-0.01, 0.1);
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}
