#include "gridforge/network.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace gridforge::network {

namespace {
constexpr Complex kJ{0.0, 1.0};
}

void PerUnitBase::validate() const {
  if (!(s_b > 0.0) || !(v_b > 0.0) || !(omega_b > 0.0)) {
    throw std::invalid_argument("per-unit base values must be strictly positive");
  }
}

PowerPair instantaneous_power(Complex v, Complex i) {
  return {v.real() * i.real() + v.imag() * i.imag(), v.imag() * i.real() - v.real() * i.imag()};
}

std::size_t NetworkCase::bus_index(int id) const {
  for (std::size_t k = 0; k < buses.size(); ++k) {
    if (buses[k].id == id) return k;
  }
  throw std::out_of_range("unknown bus " + std::to_string(id));
}

bool NetworkCase::has_bus(int id) const {
  return std::any_of(buses.begin(), buses.end(), [id](const Bus& b) { return b.id == id; });
}

void NetworkCase::validate() const {
  base.validate();
  if (buses.empty()) throw std::invalid_argument("network has no buses");
  for (std::size_t a = 0; a < buses.size(); ++a) {
    for (std::size_t b = a + 1; b < buses.size(); ++b) {
      if (buses[a].id == buses[b].id) {
        throw std::invalid_argument("duplicate bus id " + std::to_string(buses[a].id));
      }
    }
    if (buses[a].shunt_b < 0.0 || buses[a].shunt_g < 0.0) {
      throw std::invalid_argument("bus " + std::to_string(buses[a].id) + " has a negative shunt");
    }
  }
  auto check_bus = [&](int id, const std::string& what) {
    if (!has_bus(id)) throw std::invalid_argument(what + " references unknown bus " + std::to_string(id));
  };
  for (const auto& l : lines) {
    const std::string what = "line " + std::to_string(l.from) + "-" + std::to_string(l.to);
    check_bus(l.from, what);
    check_bus(l.to, what);
    if (l.r < 0.0) throw std::invalid_argument(what + ": r must be >= 0");
    if (!(l.l > 0.0)) throw std::invalid_argument(what + ": l must be > 0");
    if (l.c_half < 0.0) throw std::invalid_argument(what + ": c_half must be >= 0");
  }
  for (const auto& t : transformers) {
    const std::string what = "transformer " + std::to_string(t.from) + "-" + std::to_string(t.to);
    check_bus(t.from, what);
    check_bus(t.to, what);
    if (!(t.s_r > 0.0)) throw std::invalid_argument(what + ": s_r must be > 0");
    if (!(t.r1 > 0.0 && t.r2 > 0.0 && t.l1 > 0.0 && t.l2 > 0.0 && t.rm > 0.0 && t.lm > 0.0)) {
      throw std::invalid_argument(what + ": winding and magnetizing parameters must be > 0");
    }
  }
  for (const auto& ld : loads) {
    check_bus(ld.bus, "load");
    if (ld.g() < 0.0) throw std::invalid_argument("load at bus " + std::to_string(ld.bus) + ": p_nom must be >= 0");
  }
  for (const auto& d : devices) check_bus(d.bus, "device");

  // Connectivity over series elements.
  std::vector<std::vector<std::size_t>> adj(buses.size());
  auto link = [&](int a, int b) {
    const auto ia = bus_index(a), ib = bus_index(b);
    adj[ia].push_back(ib);
    adj[ib].push_back(ia);
  };
  for (const auto& l : lines) link(l.from, l.to);
  for (const auto& t : transformers) link(t.from, t.to);
  std::vector<bool> seen(buses.size(), false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  while (!q.empty()) {
    const auto k = q.front();
    q.pop();
    for (auto m : adj[k]) {
      if (!seen[m]) {
        seen[m] = true;
        q.push(m);
      }
    }
  }
  for (std::size_t k = 0; k < buses.size(); ++k) {
    if (!seen[k]) throw std::invalid_argument("bus " + std::to_string(buses[k].id) + " is not connected");
  }
}

NetworkModel::NetworkModel(const NetworkCase& c, std::vector<int> device_voltage_buses,
                           double frame_speed)
    : omega_b_(c.base.omega_b), frame_speed_(frame_speed) {
  c.validate();
  const double s_b = c.base.s_b;

  nodes_.reserve(c.buses.size());
  for (const auto& b : c.buses) nodes_.push_back({b.id, 0, b.shunt_b, b.shunt_g});
  for (const auto& l : c.lines) {
    nodes_[c.bus_index(l.from)].b += l.c_half;
    nodes_[c.bus_index(l.to)].b += l.c_half;
  }

  std::vector<bool> device_owned(nodes_.size(), false);
  for (int id : device_voltage_buses) device_owned[c.bus_index(id)] = true;

  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    if (device_owned[n]) {
      if (nodes_[n].b != 0.0) {
        throw std::invalid_argument("device-owned bus " + std::to_string(nodes_[n].bus_id) +
                                    " must not carry shunt capacitance");
      }
      nodes_[n].state = -1;
    } else {
      if (!(nodes_[n].b > 0.0)) {
        throw std::invalid_argument("bus " + std::to_string(nodes_[n].bus_id) +
                                    " has no shunt capacitance and no device-imposed voltage");
      }
      nodes_[n].state = static_cast<long>(dim_);
      dim_ += 2;
    }
  }
  for (const auto& l : c.lines) {
    branches_.push_back({c.bus_index(l.from), c.bus_index(l.to), l.r, l.l, dim_});
    branch_names_.push_back("line" + std::to_string(l.from) + "-" + std::to_string(l.to));
    dim_ += 2;
  }
  for (const auto& t : c.transformers) {
    branches_.push_back({c.bus_index(t.from), c.bus_index(t.to), t.series_r(s_b), t.series_l(s_b), dim_});
    branch_names_.push_back("xfmr" + std::to_string(t.from) + "-" + std::to_string(t.to));
    dim_ += 2;
  }
  for (const auto& t : c.transformers) {
    mags_.push_back({c.bus_index(t.from), t.mag_r(s_b), t.mag_l(s_b), dim_});
    dim_ += 2;
  }
  for (const auto& ld : c.loads) loads_.push_back({c.bus_index(ld.bus), ld.admittance()});
}

std::size_t NetworkModel::node_index(int bus_id) const {
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    if (nodes_[n].bus_id == bus_id) return n;
  }
  throw std::out_of_range("unknown bus " + std::to_string(bus_id));
}

std::vector<NetworkModel::StateBlock> NetworkModel::state_blocks() const {
  std::vector<StateBlock> out;
  for (const auto& n : nodes_) {
    if (n.state >= 0) out.push_back({"bus" + std::to_string(n.bus_id), "v", static_cast<std::size_t>(n.state), 2});
  }
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    out.push_back({branch_names_[k], "i", branches_[k].state, 2});
  }
  for (std::size_t k = 0; k < mags_.size(); ++k) {
    out.push_back({branch_names_[branches_.size() - mags_.size() + k], "psi_m", mags_[k].state, 2});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.offset < b.offset; });
  return out;
}

NetworkInputs NetworkModel::default_inputs() const {
  return {std::vector<double>(loads_.size(), 1.0), std::vector<bool>(branches_.size(), true)};
}

Complex NetworkModel::node_voltage(std::size_t n, std::span<const double> x,
                                   std::span<const Complex> device_voltages) const {
  const auto& node = nodes_[n];
  if (node.state < 0) return device_voltages[n];
  return load_pair(x, static_cast<std::size_t>(node.state));
}

void NetworkModel::derivatives(std::span<const double> x, std::span<const Complex> injections,
                               std::span<const Complex> device_voltages, const NetworkInputs& in,
                               std::span<double> dx, std::span<Complex> node_voltages,
                               std::span<Complex> device_currents) const {
  const std::size_t nn = nodes_.size();
  // Net current leaving each node into network elements; reuse the output
  // buffer to avoid allocation.
  std::span<Complex> net = device_currents;
  for (std::size_t n = 0; n < nn; ++n) {
    node_voltages[n] = node_voltage(n, x, device_voltages);
    net[n] = nodes_[n].g * node_voltages[n];
  }
  const Complex rot{0.0, frame_speed_};
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    const auto& br = branches_[k];
    if (!in.branch_closed[k]) {
      store_pair(dx, br.state, 0.0);
      continue;
    }
    const Complex i = load_pair(x, br.state);
    const Complex di = (omega_b_ / br.l) *
                       (node_voltages[br.from] - node_voltages[br.to] - br.r * i - rot * br.l * i);
    store_pair(dx, br.state, di);
    net[br.from] += i;
    net[br.to] -= i;
  }
  for (const auto& m : mags_) {
    const Complex v = node_voltages[m.node];
    const Complex psi = load_pair(x, m.state);
    store_pair(dx, m.state, omega_b_ * (v - rot * psi));
    net[m.node] += v / m.rm + psi / m.lm;
  }
  for (std::size_t k = 0; k < loads_.size(); ++k) {
    const auto& ld = loads_[k];
    net[ld.node] += in.load_scale[k] * ld.y * node_voltages[ld.node];
  }
  for (std::size_t n = 0; n < nn; ++n) {
    const auto& node = nodes_[n];
    if (node.state < 0) continue;  // net[n] stays as the device current
    const Complex v = node_voltages[n];
    const Complex dv = (omega_b_ / node.b) * (injections[n] - net[n] - rot * node.b * v);
    store_pair(dx, static_cast<std::size_t>(node.state), dv);
    net[n] = 0.0;
  }
}

double NetworkModel::stored_energy(std::span<const double> x,
                                   std::span<const Complex> device_voltages) const {
  double e = 0.0;
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    e += 0.5 * nodes_[n].b * std::norm(node_voltage(n, x, device_voltages));
  }
  for (const auto& br : branches_) e += 0.5 * br.l * std::norm(load_pair(x, br.state));
  for (const auto& m : mags_) e += 0.5 * std::norm(load_pair(x, m.state)) / m.lm;
  return e / omega_b_;
}

double NetworkModel::dissipated_power(std::span<const double> x,
                                      std::span<const Complex> device_voltages,
                                      const NetworkInputs& in) const {
  double p = 0.0;
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    p += nodes_[n].g * std::norm(node_voltage(n, x, device_voltages));
  }
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    if (in.branch_closed[k]) p += branches_[k].r * std::norm(load_pair(x, branches_[k].state));
  }
  for (const auto& m : mags_) p += std::norm(node_voltage(m.node, x, device_voltages)) / m.rm;
  for (std::size_t k = 0; k < loads_.size(); ++k) {
    p += in.load_scale[k] * loads_[k].y.real() * std::norm(node_voltage(loads_[k].node, x, device_voltages));
  }
  return p;
}

std::vector<std::vector<Complex>> NetworkModel::admittance_matrix(const NetworkInputs& in) const {
  const std::size_t nn = nodes_.size();
  std::vector<std::vector<Complex>> y(nn, std::vector<Complex>(nn, 0.0));
  for (std::size_t n = 0; n < nn; ++n) y[n][n] += Complex{nodes_[n].g, nodes_[n].b};
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    if (!in.branch_closed[k]) continue;
    const auto& br = branches_[k];
    const Complex ys = 1.0 / Complex{br.r, br.l};
    y[br.from][br.from] += ys;
    y[br.to][br.to] += ys;
    y[br.from][br.to] -= ys;
    y[br.to][br.from] -= ys;
  }
  for (const auto& m : mags_) y[m.node][m.node] += 1.0 / m.rm + 1.0 / (kJ * m.lm);
  for (std::size_t k = 0; k < loads_.size(); ++k) {
    y[loads_[k].node][loads_[k].node] += in.load_scale[k] * loads_[k].y;
  }
  return y;
}

void NetworkModel::steady_state(std::span<const Complex> node_voltages, std::span<double> x) const {
  for (const auto& node : nodes_) {
    if (node.state >= 0) {
      const auto n = static_cast<std::size_t>(&node - nodes_.data());
      store_pair(x, static_cast<std::size_t>(node.state), node_voltages[n]);
    }
  }
  for (const auto& br : branches_) {
    store_pair(x, br.state, (node_voltages[br.from] - node_voltages[br.to]) / Complex{br.r, br.l});
  }
  // d(psi)/dt = 0 in the synchronous frame: psi = -j v.
  for (const auto& m : mags_) store_pair(x, m.state, -kJ * node_voltages[m.node]);
}

}  // namespace gridforge::network
