#pragma once

// Electrical network: per-unit bases, case description, and the linear RLC
// dynamics of lines, transformers, shunts and constant-impedance loads.
//
// Three-phase balanced quantities are carried as one complex number per
// quantity (real part = alpha or D, imaginary part = beta or Q) in a frame
// rotating at `frame_speed` times the base frequency. frame_speed = 0 is the
// stationary alpha-beta frame; the simulator runs with frame_speed = 1, which
// turns the nominal sinusoidal steady state into a fixed point.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace gridforge::network {

using Complex = std::complex<double>;

struct PerUnitBase {
  double s_b = 100e6;                          // VA
  double v_b = 230e3;                          // V, line-line RMS
  double omega_b = 2.0 * std::numbers::pi * 50.0;  // rad/s

  double z_b() const { return v_b * v_b / s_b; }
  double i_b() const { return s_b / (std::sqrt(3.0) * v_b); }
  void validate() const;
};

struct Bus {
  int id = 0;
  double v_base_kv = 230.0;
  /// Extra shunt susceptance / conductance at the node (pu), on top of line
  /// charging. Generator-side buses carry a small parasitic capacitance so
  /// that every network-owned node has a voltage state.
  double shunt_b = 0.0;
  double shunt_g = 0.0;
};

/// Nominal pi section. r, l in pu on the system base (l is the reactance at
/// the base frequency); c_half is the shunt susceptance lumped at each end.
struct PiLine {
  int from = 0;
  int to = 0;
  double r = 0.0;
  double l = 0.0;
  double c_half = 0.0;
};

/// Two-winding linear transformer, parameters in pu of its own rating.
/// Modeled as the series winding impedance plus a magnetizing branch
/// (rm parallel lm) at the primary terminal.
struct LinearTransformer {
  int from = 0;  // primary
  int to = 0;    // secondary
  double s_r = 210e6;
  double v1 = 13.8e3;
  double v2 = 230e3;
  double r1 = 0.0027, l1 = 0.08;
  double r2 = 0.0027, l2 = 0.08;
  double rm = 500.0, lm = 500.0;

  /// Series and magnetizing values converted to a system power base.
  double series_r(double s_b) const { return (r1 + r2) * s_b / s_r; }
  double series_l(double s_b) const { return (l1 + l2) * s_b / s_r; }
  double mag_r(double s_b) const { return rm * s_b / s_r; }
  double mag_l(double s_b) const { return lm * s_b / s_r; }
};

/// Constant-impedance load. The admittance is fixed at construction so that
/// the load draws (p_nom, q_nom) at 1 pu voltage; `scale` multiplies it at
/// run time to realize load steps.
struct ConstantImpedanceLoad {
  int bus = 0;
  double p_nom = 0.0;
  double q_nom = 0.0;

  double g() const { return p_nom; }
  double b() const { return -q_nom; }
  Complex admittance() const { return {g(), b()}; }
};

enum class DeviceKind { kMachine, kConverter };

struct Attachment {
  int bus = 0;
  DeviceKind kind = DeviceKind::kMachine;
};

struct NetworkCase {
  PerUnitBase base;
  std::vector<Bus> buses;
  std::vector<PiLine> lines;
  std::vector<LinearTransformer> transformers;
  std::vector<ConstantImpedanceLoad> loads;
  std::vector<Attachment> devices;

  /// Index of bus `id` in `buses`; throws std::out_of_range.
  std::size_t bus_index(int id) const;
  bool has_bus(int id) const;
  /// Checks parameter signs, bus references and connectivity. Throws
  /// std::invalid_argument with a description of the first violation.
  void validate() const;
};

/// The standard IEEE 9-bus topology: three generator buses (1-3, 13.8 kV)
/// behind step-up transformers, a six-bus 230 kV ring, loads at 5, 7 and 9.
/// The base load is split evenly across the three load buses with the
/// canonical reactive/active ratios.
NetworkCase build_nine_bus(double base_load = 2.0);

/// Parasitic shunt susceptance placed on generator-side buses.
inline constexpr double kGeneratorBusShuntB = 0.01;

/// Run-time inputs that change with events.
struct NetworkInputs {
  std::vector<double> load_scale;   // per load, default 1
  std::vector<bool> branch_closed;  // per series branch (lines then transformers)
};

/// p = v_a i_a + v_b i_b and q = v_b i_a - v_a i_b in per unit (the 3/2
/// factor of the amplitude-invariant transform is absorbed by the base).
struct PowerPair {
  double p = 0.0;
  double q = 0.0;
};
PowerPair instantaneous_power(Complex v, Complex i);

/// Compiled network ready for derivative evaluation. Nodes whose voltage is
/// imposed by a device (converter filter capacitors) are listed in
/// `device_voltage_buses`; every other node must have shunt capacitance.
class NetworkModel {
 public:
  NetworkModel(const NetworkCase& c, std::vector<int> device_voltage_buses,
               double frame_speed = 1.0);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t node_index(int bus_id) const;
  int node_bus_id(std::size_t node) const { return nodes_[node].bus_id; }
  bool node_has_state(std::size_t node) const { return nodes_[node].state >= 0; }
  std::size_t branch_count() const { return branches_.size(); }
  std::size_t load_count() const { return loads_.size(); }
  std::size_t state_dim() const { return dim_; }
  double omega_b() const { return omega_b_; }
  double frame_speed() const { return frame_speed_; }

  /// State offset of series branch k's current (two doubles).
  std::size_t branch_state(std::size_t k) const { return branches_[k].state; }
  /// State offset of node voltage; only valid when node_has_state().
  std::size_t node_state(std::size_t node) const { return static_cast<std::size_t>(nodes_[node].state); }
  std::size_t magnetizing_count() const { return mags_.size(); }
  std::size_t magnetizing_state(std::size_t k) const { return mags_[k].state; }
  /// Human-readable state labels (device, name, size) in layout order.
  struct StateBlock {
    std::string device;
    std::string name;
    std::size_t offset;
    std::size_t size;
  };
  std::vector<StateBlock> state_blocks() const;

  NetworkInputs default_inputs() const;

  /// Evaluates the network dynamics.
  ///   x, dx:            network state and derivative (state_dim() doubles)
  ///   injections:       device current into each node (node_count())
  ///   device_voltages:  voltage of device-owned nodes (others ignored)
  ///   node_voltages:    output, voltage of every node
  ///   device_currents:  output, net current drawn by the network out of
  ///                     each device-owned node (zero elsewhere)
  void derivatives(std::span<const double> x, std::span<const Complex> injections,
                   std::span<const Complex> device_voltages, const NetworkInputs& in,
                   std::span<double> dx, std::span<Complex> node_voltages,
                   std::span<Complex> device_currents) const;

  /// Stored magnetic + electric energy, pu * seconds.
  double stored_energy(std::span<const double> x, std::span<const Complex> device_voltages) const;
  /// Power dissipated in series resistance, shunt conductance, magnetizing
  /// resistance and loads.
  double dissipated_power(std::span<const double> x, std::span<const Complex> device_voltages,
                          const NetworkInputs& in) const;

  /// Nodal admittance matrix at the base frequency (phasor domain),
  /// including loads at the given scale, shunts and magnetizing branches.
  std::vector<std::vector<Complex>> admittance_matrix(const NetworkInputs& in) const;

  /// Steady-state network states for given node phasors (frame_speed = 1).
  void steady_state(std::span<const Complex> node_voltages, std::span<double> x) const;

 private:
  struct Node {
    int bus_id;
    long state;  // -1 when the voltage is device-owned
    double b;    // total shunt susceptance
    double g;
  };
  struct Branch {
    std::size_t from, to;
    double r, l;
    std::size_t state;
  };
  struct Magnetizing {
    std::size_t node;
    double rm, lm;
    std::size_t state;
  };
  struct Load {
    std::size_t node;
    Complex y;
  };

  Complex node_voltage(std::size_t n, std::span<const double> x,
                       std::span<const Complex> device_voltages) const;

  std::vector<Node> nodes_;
  std::vector<Branch> branches_;
  std::vector<Magnetizing> mags_;
  std::vector<Load> loads_;
  std::vector<std::string> branch_names_;
  std::size_t dim_ = 0;
  double omega_b_;
  double frame_speed_;
};

/// Reads/writes the complex pair stored at x[offset], x[offset+1].
inline Complex load_pair(std::span<const double> x, std::size_t offset) {
  return {x[offset], x[offset + 1]};
}
inline void store_pair(std::span<double> x, std::size_t offset, Complex v) {
  x[offset] = v.real();
  x[offset + 1] = v.imag();
}

}  // namespace gridforge::network
