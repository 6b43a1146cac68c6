#pragma once

// Assembly of network, machines and converters into one ODE on a flat state
// vector.

#include "gridforge/controllers.hpp"
#include "gridforge/converter.hpp"
#include "gridforge/machine.hpp"
#include "gridforge/network.hpp"
#include "gridforge/numerics.hpp"
#include "gridforge/state_layout.hpp"

#include <string>
#include <vector>

namespace gridforge {

using network::Complex;
using network::DeviceKind;
using numerics::Vector;

/// One generating unit attached to a generator bus.
struct DeviceConfig {
  int bus = 0;
  DeviceKind kind = DeviceKind::kMachine;
  controllers::Strategy strategy = controllers::Strategy::kDroop;
  double p_star = 0.0;  // active-power dispatch, pu (ignored for the slack unit)
  double v_star = 1.0;  // terminal voltage set-point, pu

  /// "sm1", "gfc2", ...
  std::string name() const;
};

struct ConverterConfig {
  converter::ModuleParams module;
  int n = 100;
  double tau_dc = 0.05;
  double i_max = 1.2;
  bool clamp_modulation = false;
};

/// Machine defaults with the governor on the same slope as the converters,
/// so that all units share load alike.
inline machine::SmParams default_machine() {
  machine::SmParams m;
  m.d_p = 1.0 / controllers::kDefaultSlope;
  return m;
}

struct SystemConfig {
  /// Network without converter terminals; its `devices` list is ignored.
  network::NetworkCase network = network::build_nine_bus();
  std::vector<DeviceConfig> devices;
  int slack_bus = 1;
  machine::SmParams machine = default_machine();
  machine::ExciterParams exciter;
  machine::PssParams pss;
  ConverterConfig converter;
  controllers::ControllerGains gains = controllers::derive_gains();
  double frame_speed = 1.0;

  void validate() const;
};

/// Bus id of the converter filter node for a converter at `bus`.
inline int converter_terminal_bus(int bus) { return 100 + bus; }

/// Operating-point quantities fixed at initialization.
struct DeviceSetpoints {
  machine::SmSetpoints sm;
  double p_star = 0.0;
  double q_star = 0.0;
  double v_star = 1.0;
};

/// Run-time inputs changed by events.
struct SystemInputs {
  network::NetworkInputs net;
  std::vector<bool> tripped;  // per device
};

/// Instantaneous observables of one device.
struct DeviceObservation {
  double omega = 1.0;  // pu
  double p = 0.0;      // terminal active power, system base
  double q = 0.0;
  double v_mag = 0.0;  // terminal voltage magnitude
  double v_dc = 0.0;   // converters only, pu
  double i_tau = 0.0;
  double i_dc = 0.0;
  double i_x = 0.0;
  Complex v_s;         // converters only
  Complex i_s;
};

class System {
 public:
  explicit System(SystemConfig cfg);

  const SystemConfig& config() const { return cfg_; }
  const network::NetworkCase& network_case() const { return case_; }
  const network::NetworkModel& network() const { return net_; }
  const StateLayout& layout() const { return layout_; }
  std::size_t dim() const { return layout_.total_dim(); }
  std::size_t device_count() const { return devices_.size(); }
  const DeviceConfig& device(std::size_t k) const { return devices_[k].cfg; }
  /// Index of the device attached to `bus`; throws std::out_of_range.
  std::size_t device_at_bus(int bus) const;
  /// Network node whose voltage is the device terminal voltage.
  std::size_t device_node(std::size_t k) const { return devices_[k].node; }
  /// Series branch connecting the device to the grid.
  std::size_t device_branch(std::size_t k) const { return devices_[k].branch; }
  Slice device_states(std::size_t k) const { return devices_[k].states; }

  const machine::SynchronousMachine& machine() const { return machine_; }
  const converter::ConverterParams& converter_params() const { return conv_; }

  const DeviceSetpoints& setpoints(std::size_t k) const { return devices_[k].sp; }
  /// Used by initialization; the system is treated as immutable afterwards.
  void set_setpoints(std::size_t k, const DeviceSetpoints& sp) { devices_[k].sp = sp; }

  SystemInputs default_inputs() const;

  /// Scratch buffers for derivative evaluation; one per concurrent caller.
  struct Workspace {
    std::vector<Complex> injections, device_voltages, node_voltages, device_currents;
  };
  Workspace make_workspace() const;

  void derivatives(const Vector& x, const SystemInputs& in, Workspace& ws, Vector& dx) const;

  /// Evaluates derivatives and returns per-device observables.
  void observe(const Vector& x, const SystemInputs& in, Workspace& ws, Vector& dx,
               std::vector<DeviceObservation>& out) const;

 private:
  struct Device {
    DeviceConfig cfg;
    std::size_t node = 0;
    std::size_t branch = 0;
    Slice states;
    DeviceSetpoints sp;
  };

  void eval(const Vector& x, const SystemInputs& in, Workspace& ws, Vector& dx,
            std::vector<DeviceObservation>* obs) const;

  SystemConfig cfg_;
  network::NetworkCase case_;
  std::vector<Device> devices_;
  network::NetworkModel net_;
  StateLayout layout_;
  machine::SynchronousMachine machine_;
  converter::ConverterParams conv_;
};

/// Converter state sub-layout inside a device slice.
enum ConverterBlock : std::size_t {
  kConvPhysical = 0,                                   // v_dc, i_s, v, i_tau
  kConvXv = converter::kConverterStateCount,           // voltage-loop integrator (2)
  kConvXi = kConvXv + 2,                               // current-loop integrator (2)
  kConvControl = kConvXi + 2,                          // strategy states
};

/// Number of strategy states: droop [theta, x], vsm [theta, omega, x_if],
/// matching [theta, x], dvoc [v_hat (2)].
std::size_t control_state_count(controllers::Strategy s);

}  // namespace gridforge
