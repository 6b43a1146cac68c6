#include "gridforge/initialization.hpp"

#include <cmath>
#include <sstream>

namespace gridforge {

namespace {

using controllers::Strategy;

void back_solve_converter(const System& sys, std::size_t k, Complex v, Complex i_out, Vector& x,
                          DeviceSetpoints& sp) {
  const auto& cp = sys.converter_params();
  const auto& gains = sys.config().gains;
  const Slice s = sys.device_states(k);
  double* xs = x.data() + s.offset;

  const Complex j{0.0, 1.0};
  const Complex i_s = i_out + j * cp.b * v;
  const Complex v_s = v + Complex{cp.r, cp.x} * i_s;
  const double i_x = (v_s * std::conj(i_s)).real();
  const double i_tau = cp.g_dc + i_x;
  if (std::abs(i_tau) >= cp.i_limit()) {
    std::ostringstream msg;
    msg << "converter " << sys.device(k).name() << " needs DC current " << i_tau
        << " pu at the operating point, limit is " << cp.i_limit();
    throw InitializationError(msg.str());
  }
  const auto pq = network::instantaneous_power(v, i_out);
  const double v_mag = std::abs(v);
  sp.p_star = pq.p;
  sp.q_star = pq.q;
  sp.v_star = v_mag;

  xs[converter::kVdc] = 1.0;
  xs[converter::kIsRe] = i_s.real();
  xs[converter::kIsIm] = i_s.imag();
  xs[converter::kVRe] = v.real();
  xs[converter::kVIm] = v.imag();
  xs[converter::kITau] = i_tau;
  for (std::size_t q = kConvXv; q < kConvControl; ++q) xs[q] = 0.0;

  double* c = xs + kConvControl;
  switch (sys.device(k).strategy) {
    case Strategy::kDroop:
      c[0] = std::arg(v);
      c[1] = v_mag / gains.droop.k_i;
      break;
    case Strategy::kVsm:
      c[0] = std::arg(v);
      c[1] = gains.vsm.omega_star;
      c[2] = v_mag / (gains.vsm.omega_star * gains.vsm.k_i);
      break;
    case Strategy::kMatching:
      c[0] = std::arg(v);
      c[1] = v_mag / gains.matching.k_i;
      break;
    case Strategy::kDvoc:
      c[0] = v.real();
      c[1] = v.imag();
      break;
  }
}

}  // namespace

double derivative_residual(const System& sys, const Vector& x) {
  auto ws = sys.make_workspace();
  const auto in = sys.default_inputs();
  Vector dx(x.size());
  sys.derivatives(x, in, ws, dx);
  return numerics::inf_norm(dx);
}

InitResult initialize_steady_state(System& sys, const InitOptions& opts) {
  if (sys.config().frame_speed != 1.0) {
    throw InitializationError("steady-state initialization requires the synchronous frame (frame_speed = 1)");
  }
  const auto& net = sys.network();
  const auto in = sys.default_inputs();
  const auto y = net.admittance_matrix(in.net);
  const std::size_t nn = net.node_count();

  std::vector<network::PowerFlowNode> nodes(nn);
  for (std::size_t k = 0; k < sys.device_count(); ++k) {
    const auto& d = sys.device(k);
    auto& pf = nodes[sys.device_node(k)];
    pf.type = d.bus == sys.config().slack_bus ? network::BusType::kSlack : network::BusType::kPV;
    pf.p = d.p_star;
    pf.v = d.v_star;
    pf.angle = 0.0;
  }

  InitResult res;
  res.power_flow = network::solve_power_flow(y, nodes, opts.pf_tol);
  const auto& v = res.power_flow.voltages;

  res.x = Vector::Zero(static_cast<Eigen::Index>(sys.dim()));
  net.steady_state(v, std::span<double>(res.x.data(), net.state_dim()));

  for (std::size_t k = 0; k < sys.device_count(); ++k) {
    const std::size_t n = sys.device_node(k);
    Complex i_inj{};
    for (std::size_t m = 0; m < nn; ++m) i_inj += y[n][m] * v[m];
    DeviceSetpoints sp = sys.setpoints(k);
    if (sys.device(k).kind == DeviceKind::kMachine) {
      const Slice s = sys.device_states(k);
      try {
        sp.sm = sys.machine().initialize(
            v[n], i_inj, std::span<double, machine::kSmStateCount>(res.x.data() + s.offset, machine::kSmStateCount));
      } catch (const std::runtime_error& e) {
        throw InitializationError(sys.device(k).name() + ": " + e.what());
      }
      const auto pq = network::instantaneous_power(v[n], i_inj);
      sp.p_star = pq.p;
      sp.q_star = pq.q;
      sp.v_star = std::abs(v[n]);
    } else {
      back_solve_converter(sys, k, v[n], i_inj, res.x, sp);
    }
    sys.set_setpoints(k, sp);
  }

  res.residual = derivative_residual(sys, res.x);
  if (opts.polish && res.residual > opts.polish_tol) {
    auto ws = sys.make_workspace();
    numerics::ResidualFn f = [&](const Vector& x, Vector& r) {
      r.resize(x.size());
      sys.derivatives(x, in, ws, r);
    };
    numerics::EquilibriumOptions eo;
    eo.tol = opts.polish_tol;
    eo.max_iter = 20;
    try {
      res.x = numerics::solve_equilibrium(f, res.x, eo);
    } catch (const numerics::NonConvergence& e) {
      if (e.residual_norm() < res.residual) res.x = e.best_iterate();
    }
    res.residual = derivative_residual(sys, res.x);
    res.polished = true;
  }
  if (!(res.residual <= opts.residual_tol)) {
    std::ostringstream msg;
    msg << "steady-state residual " << res.residual << " exceeds " << opts.residual_tol;
    throw InitializationError(msg.str());
  }
  return res;
}

}  // namespace gridforge
