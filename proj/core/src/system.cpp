#include "gridforge/system.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gridforge {

namespace {

using controllers::Strategy;

network::NetworkCase augmented_case(const SystemConfig& cfg) {
  network::NetworkCase c = cfg.network;
  c.devices.clear();
  const auto agg = converter::scale_module_params(cfg.converter.module, cfg.converter.n);
  for (const auto& d : cfg.devices) {
    c.devices.push_back({d.bus, d.kind});
    if (d.kind == DeviceKind::kConverter) {
      const int lv = converter_terminal_bus(d.bus);
      c.buses.push_back({lv, cfg.converter.module.v_ac / 1e3, 0.0, 0.0});
      c.transformers.push_back(converter::lv_mv_transformer(lv, d.bus, agg));
    }
  }
  return c;
}

std::vector<int> device_owned_buses(const SystemConfig& cfg) {
  std::vector<int> out;
  for (const auto& d : cfg.devices) {
    if (d.kind == DeviceKind::kConverter) out.push_back(converter_terminal_bus(d.bus));
  }
  return out;
}

converter::ConverterParams converter_pu(const SystemConfig& cfg) {
  auto p = converter::to_per_unit(cfg.converter.module, cfg.converter.n, cfg.network.base.s_b,
                                  cfg.network.base.omega_b);
  p.tau_dc = cfg.converter.tau_dc;
  p.i_max = cfg.converter.i_max;
  p.clamp_modulation = cfg.converter.clamp_modulation;
  p.validate();
  return p;
}

machine::SmParams machine_params(const SystemConfig& cfg) {
  auto p = cfg.machine;
  p.omega_b = cfg.network.base.omega_b;
  return p;
}

}  // namespace

std::string DeviceConfig::name() const {
  return (kind == DeviceKind::kMachine ? "sm" : "gfc") + std::to_string(bus);
}

std::size_t control_state_count(Strategy s) {
  switch (s) {
    case Strategy::kDroop: return 2;
    case Strategy::kVsm: return 3;
    case Strategy::kMatching: return 2;
    case Strategy::kDvoc: return 2;
  }
  return 0;
}

void SystemConfig::validate() const {
  network.validate();
  if (devices.empty()) throw std::invalid_argument("system has no generating units");
  std::set<int> seen;
  bool has_slack = false;
  for (const auto& d : devices) {
    if (!network.has_bus(d.bus)) throw std::invalid_argument("device at unknown bus " + std::to_string(d.bus));
    if (!seen.insert(d.bus).second) throw std::invalid_argument("two devices at bus " + std::to_string(d.bus));
    if (!(d.v_star > 0.5 && d.v_star < 1.5)) {
      throw std::invalid_argument("device " + d.name() + ": v_star must be within (0.5, 1.5) pu");
    }
    if (network.has_bus(converter_terminal_bus(d.bus)) && d.kind == DeviceKind::kConverter) {
      throw std::invalid_argument("bus id " + std::to_string(converter_terminal_bus(d.bus)) +
                                  " is reserved for the converter terminal");
    }
    has_slack = has_slack || d.bus == slack_bus;
  }
  if (!has_slack) throw std::invalid_argument("no device at slack bus " + std::to_string(slack_bus));
  if (!(frame_speed >= 0.0)) throw std::invalid_argument("frame_speed must be >= 0");
  if (!(converter.tau_dc > 0.0)) throw std::invalid_argument("converter tau_dc must be > 0");
  if (!(converter.i_max > 0.0)) throw std::invalid_argument("converter i_max must be > 0");
  gains.inner.validate();
  if (!(gains.k_dc > 0.0)) throw std::invalid_argument("k_dc must be > 0");
  if (!(gains.droop.d_omega > 0.0)) throw std::invalid_argument("droop d_omega must be > 0");
  if (!(gains.vsm.d_p > 0.0 && gains.vsm.j > 0.0)) throw std::invalid_argument("VSM D_p and J must be > 0");
  if (!(gains.matching.k_theta > 0.0)) throw std::invalid_argument("matching k_theta must be > 0");
  if (!(gains.dvoc.eta > 0.0 && gains.dvoc.alpha > 0.0)) throw std::invalid_argument("dVOC eta and alpha must be > 0");
}

System::System(SystemConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      case_(augmented_case(cfg_)),
      net_(case_, device_owned_buses(cfg_), cfg_.frame_speed),
      machine_(machine_params(cfg_), cfg_.exciter, cfg_.pss, cfg_.network.base.s_b),
      conv_(converter_pu(cfg_)) {
  for (const auto& blk : net_.state_blocks()) {
    const Slice s = layout_.add(blk.device, blk.name, blk.size);
    if (s.offset != blk.offset) throw std::logic_error("network state layout is not contiguous");
  }

  const std::size_t n_lines = case_.lines.size();
  for (const auto& d : cfg_.devices) {
    Device dev;
    dev.cfg = d;
    const std::string name = d.name();
    const int terminal = d.kind == DeviceKind::kConverter ? converter_terminal_bus(d.bus) : d.bus;
    dev.node = net_.node_index(terminal);
    bool found = false;
    for (std::size_t t = 0; t < case_.transformers.size(); ++t) {
      if (case_.transformers[t].from == terminal) {
        dev.branch = n_lines + t;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("device " + name + " has no connecting transformer");

    if (d.kind == DeviceKind::kMachine) {
      dev.states = layout_.add(name, "machine", machine::kSmStateCount);
    } else {
      const Slice first = layout_.add(name, "physical", converter::kConverterStateCount);
      layout_.add(name, "x_v", 2);
      layout_.add(name, "x_i", 2);
      const Slice last = layout_.add(name, "control", control_state_count(d.strategy));
      dev.states = {first.offset, last.end() - first.offset};
    }
    dev.sp.v_star = d.v_star;
    dev.sp.p_star = d.p_star;
    devices_.push_back(dev);
  }
}

std::size_t System::device_at_bus(int bus) const {
  for (std::size_t k = 0; k < devices_.size(); ++k) {
    if (devices_[k].cfg.bus == bus) return k;
  }
  throw std::out_of_range("no device at bus " + std::to_string(bus));
}

SystemInputs System::default_inputs() const {
  return {net_.default_inputs(), std::vector<bool>(devices_.size(), false)};
}

System::Workspace System::make_workspace() const {
  const std::size_t nn = net_.node_count();
  Workspace ws;
  ws.injections.assign(nn, 0.0);
  ws.device_voltages.assign(nn, 0.0);
  ws.node_voltages.assign(nn, 0.0);
  ws.device_currents.assign(nn, 0.0);
  return ws;
}

void System::derivatives(const Vector& x, const SystemInputs& in, Workspace& ws, Vector& dx) const {
  eval(x, in, ws, dx, nullptr);
}

void System::observe(const Vector& x, const SystemInputs& in, Workspace& ws, Vector& dx,
                     std::vector<DeviceObservation>& out) const {
  out.resize(devices_.size());
  eval(x, in, ws, dx, &out);
}

void System::eval(const Vector& x, const SystemInputs& in, Workspace& ws, Vector& dx,
                  std::vector<DeviceObservation>* obs) const {
  const double wb = case_.base.omega_b;
  const double fs = cfg_.frame_speed;
  const double w_frame = wb * fs;
  const double ratio = machine_.rating_ratio();
  const auto& gains = cfg_.gains;

  std::fill(ws.injections.begin(), ws.injections.end(), Complex{});
  for (const auto& dev : devices_) {
    const std::size_t k = static_cast<std::size_t>(&dev - devices_.data());
    const double* xs = x.data() + dev.states.offset;
    if (dev.cfg.kind == DeviceKind::kConverter) {
      ws.device_voltages[dev.node] = {xs[converter::kVRe], xs[converter::kVIm]};
    } else if (!in.tripped[k]) {
      const Complex i_dq = machine_.stator_current_dq(machine::SmStateSpan(xs, machine::kSmStateCount));
      ws.injections[dev.node] += i_dq * std::polar(ratio, xs[machine::kDelta]);
    }
  }

  const std::size_t nd = net_.state_dim();
  net_.derivatives(std::span<const double>(x.data(), nd), ws.injections, ws.device_voltages, in.net,
                   std::span<double>(dx.data(), nd), ws.node_voltages, ws.device_currents);

  for (std::size_t k = 0; k < devices_.size(); ++k) {
    const Device& dev = devices_[k];
    const double* xs = x.data() + dev.states.offset;
    double* d = dx.data() + dev.states.offset;

    if (in.tripped[k]) {
      std::fill(d, d + dev.states.size, 0.0);
      if (obs) {
        auto& o = (*obs)[k];
        o = DeviceObservation{};
        o.omega = dev.cfg.kind == DeviceKind::kMachine ? xs[machine::kOmega] : 1.0;
        o.v_mag = std::abs(ws.node_voltages[dev.node]);
      }
      continue;
    }

    if (dev.cfg.kind == DeviceKind::kMachine) {
      const Complex v_t = ws.node_voltages[dev.node];
      const auto out = machine_.derivatives(machine::SmStateSpan(xs, machine::kSmStateCount), v_t, dev.sp.sm,
                                            machine::SmDerivSpan(d, machine::kSmStateCount), fs);
      if (obs) {
        auto& o = (*obs)[k];
        const auto pq = network::instantaneous_power(v_t, out.i_terminal);
        o = DeviceObservation{};
        o.omega = xs[machine::kOmega];
        o.p = pq.p;
        o.q = pq.q;
        o.v_mag = std::abs(v_t);
      }
      continue;
    }

    // Grid-forming converter.
    const Complex v{xs[converter::kVRe], xs[converter::kVIm]};
    const Complex i_s{xs[converter::kIsRe], xs[converter::kIsIm]};
    const double v_dc = xs[converter::kVdc];
    const Complex i_out = ws.device_currents[dev.node];
    const auto pq = network::instantaneous_power(v, i_out);
    const double v_mag = std::abs(v);

    const double* c = xs + kConvControl;
    double* dc = d + kConvControl;
    double theta = 0.0, omega = w_frame, v_hat_dq = 0.0;
    switch (dev.cfg.strategy) {
      case Strategy::kDroop: {
        auto prm = gains.droop;
        prm.p_star = dev.sp.p_star;
        prm.v_star = dev.sp.v_star;
        const auto o = controllers::droop_reference(pq.p, v_mag, c[1], prm);
        theta = c[0];
        omega = o.omega;
        dc[0] = omega - w_frame;
        dc[1] = o.dx;
        v_hat_dq = o.v_hat_d;
        break;
      }
      case Strategy::kVsm: {
        auto prm = gains.vsm;
        prm.p_star = dev.sp.p_star;
        prm.v_star = dev.sp.v_star;
        const auto o = controllers::vsm_reference(pq.p, v_mag, c[1], c[2], prm);
        theta = c[0];
        omega = c[1];
        dc[0] = omega - w_frame;
        dc[1] = o.domega;
        dc[2] = o.dx_if;
        v_hat_dq = o.v_hat_mag;
        break;
      }
      case Strategy::kMatching: {
        auto prm = gains.matching;
        prm.v_star = dev.sp.v_star;
        const auto o = controllers::matching_reference(v_dc, v_mag, c[1], prm);
        theta = c[0];
        omega = o.omega;
        dc[0] = omega - w_frame;
        dc[1] = o.dx;
        v_hat_dq = o.mu;
        break;
      }
      case Strategy::kDvoc: {
        auto prm = gains.dvoc;
        prm.p_star = dev.sp.p_star;
        prm.q_star = dev.sp.q_star;
        prm.v_star = dev.sp.v_star;
        const Complex vh{c[0], c[1]};
        const Complex dvh = controllers::dvoc_reference(i_out, vh, prm, w_frame);
        dc[0] = dvh.real();
        dc[1] = dvh.imag();
        theta = std::arg(vh);
        omega = w_frame + (dvh * std::conj(vh)).imag() / std::norm(vh);
        v_hat_dq = std::abs(vh);
        break;
      }
    }

    const double w_pu = omega / wb;
    const Complex to_dq = std::polar(1.0, -theta);
    const Complex v_dq = v * to_dq;
    const Complex x_v{xs[kConvXv], xs[kConvXv + 1]};
    const Complex x_i{xs[kConvXi], xs[kConvXi + 1]};
    const auto vl = controllers::voltage_loop(v_hat_dq, v_dq, i_out * to_dq, w_pu, conv_.b, x_v, gains.inner);
    const auto cl = controllers::current_loop(vl.i_s_ref, i_s * to_dq, v_dq, w_pu, conv_.r, conv_.x, x_i,
                                              gains.inner);
    const Complex m = controllers::modulation(cl.v_s_ref, theta);

    const double i_tau = xs[converter::kITau];
    const double i_dc = std::clamp(i_tau, -conv_.i_limit(), conv_.i_limit());
    const auto phys = converter::converter_derivatives(
        conv_, std::span<const double>(xs, converter::kConverterStateCount), m, i_out, i_dc,
        std::span<double>(d, converter::kConverterStateCount), fs);
    const double i_dc_star =
        controllers::dc_voltage_control(v_dc, phys.i_x, pq.p, {gains.k_dc, conv_.g_dc, 1.0, dev.sp.p_star});
    const auto src = converter::dc_source(i_dc_star, i_tau, conv_.tau_dc, conv_.i_limit());
    d[converter::kITau] = src.di_tau;
    d[kConvXv] = vl.dx_v.real();
    d[kConvXv + 1] = vl.dx_v.imag();
    d[kConvXi] = cl.dx_i.real();
    d[kConvXi + 1] = cl.dx_i.imag();

    if (obs) {
      auto& o = (*obs)[k];
      o.omega = w_pu;
      o.p = pq.p;
      o.q = pq.q;
      o.v_mag = v_mag;
      o.v_dc = v_dc;
      o.i_tau = i_tau;
      o.i_dc = src.i_dc;
      o.i_x = phys.i_x;
      o.v_s = phys.v_s;
      o.i_s = i_s;
    }
  }
}

}  // namespace gridforge
