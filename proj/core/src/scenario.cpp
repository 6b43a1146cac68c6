#include "gridforge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gridforge {

std::string to_string(EventKind k) {
  return k == EventKind::kLoadStep ? "load-step" : "machine-trip";
}

void ScenarioConfig::validate() const {
  system.validate();
  integrator.validate();
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be > 0");
  if (!(rocof_window > 0.0)) throw std::invalid_argument("rocof_window must be > 0");
  if (!(1.0 / sample_rate >= integrator.dt * (1.0 - 1e-9))) {
    throw std::invalid_argument("sample period must not be shorter than dt");
  }
  for (const auto& e : events) {
    if (!(e.time >= 0.0)) throw std::invalid_argument("event time must be >= 0");
    if (!system.network.has_bus(e.bus)) {
      throw std::invalid_argument(to_string(e.kind) + " event targets unknown bus " + std::to_string(e.bus));
    }
    if (e.kind == EventKind::kLoadStep) {
      const bool has_load = std::any_of(system.network.loads.begin(), system.network.loads.end(),
                                        [&](const auto& l) { return l.bus == e.bus; });
      if (!has_load) throw std::invalid_argument("load-step event at bus " + std::to_string(e.bus) + " without a load");
    } else {
      const bool has_dev = std::any_of(system.devices.begin(), system.devices.end(),
                                       [&](const auto& d) { return d.bus == e.bus; });
      if (!has_dev) throw std::invalid_argument("machine-trip event at bus " + std::to_string(e.bus) + " without a unit");
    }
  }
}

void apply_event(const Event& e, const System& sys, SystemInputs& in, Vector& x) {
  if (e.kind == EventKind::kLoadStep) {
    const auto& loads = sys.network_case().loads;
    for (std::size_t k = 0; k < loads.size(); ++k) {
      if (loads[k].bus == e.bus) {
        if (!(loads[k].p_nom > 0.0)) throw std::invalid_argument("cannot step a load with p_nom = 0");
        in.net.load_scale[k] += e.dp / loads[k].p_nom;
        return;
      }
    }
    throw std::invalid_argument("no load at bus " + std::to_string(e.bus));
  }
  const std::size_t k = sys.device_at_bus(e.bus);
  in.tripped[k] = true;
  const std::size_t br = sys.device_branch(k);
  in.net.branch_closed[br] = false;
  network::store_pair(std::span<double>(x.data(), static_cast<std::size_t>(x.size())),
                      sys.network().branch_state(br), 0.0);
}

namespace {

struct Recorder {
  TimeSeries ts;
  struct Source {
    std::size_t channel;
    std::size_t device;  // or bus node when `bus` is true
    int what;
    bool bus;
  };
  std::vector<Source> sources;
};

enum What { kOmega, kP, kQ, kV, kVdc, kITau, kIdc };

bool wanted(const std::vector<std::string>& outputs, const std::string& name) {
  if (outputs.empty()) return true;
  if (name.rfind("omega_", 0) == 0 || name.rfind("vdc_", 0) == 0 || name.rfind("itau_", 0) == 0) return true;
  return std::find(outputs.begin(), outputs.end(), name) != outputs.end();
}

Recorder make_recorder(const System& sys, const std::vector<std::string>& outputs, const SystemConfig& cfg) {
  Recorder r;
  auto add = [&](const std::string& name, std::size_t idx, int what, bool bus) {
    if (!wanted(outputs, name)) return;
    r.sources.push_back({r.ts.add_channel(name), idx, what, bus});
  };
  for (std::size_t k = 0; k < sys.device_count(); ++k) {
    const std::string n = sys.device(k).name();
    add("omega_" + n, k, kOmega, false);
    add("p_" + n, k, kP, false);
    add("q_" + n, k, kQ, false);
    add("v_" + n, k, kV, false);
    if (sys.device(k).kind == DeviceKind::kConverter) {
      add("vdc_" + n, k, kVdc, false);
      add("itau_" + n, k, kITau, false);
      add("idc_" + n, k, kIdc, false);
    }
  }
  for (const auto& b : cfg.network.buses) {
    add("vbus" + std::to_string(b.id), sys.network().node_index(b.id), kV, true);
  }
  for (const auto& o : outputs) {
    if (!r.ts.has(o)) throw std::invalid_argument("unknown output channel '" + o + "'");
  }
  return r;
}

void record(Recorder& r, double t, const System::Workspace& ws, const std::vector<DeviceObservation>& obs) {
  r.ts.time.push_back(t);
  for (const auto& s : r.sources) {
    double v = 0.0;
    if (s.bus) {
      v = std::abs(ws.node_voltages[s.device]);
    } else {
      const auto& o = obs[s.device];
      switch (s.what) {
        case kOmega: v = o.omega; break;
        case kP: v = o.p; break;
        case kQ: v = o.q; break;
        case kV: v = o.v_mag; break;
        case kVdc: v = o.v_dc; break;
        case kITau: v = o.i_tau; break;
        case kIdc: v = o.i_dc; break;
      }
    }
    r.ts.data[s.channel].push_back(v);
  }
}

std::string metrics_channel(const System& sys, const std::vector<Event>& events) {
  auto tripped = [&](int bus) {
    return std::any_of(events.begin(), events.end(),
                       [&](const Event& e) { return e.kind == EventKind::kMachineTrip && e.bus == bus; });
  };
  for (std::size_t k = 0; k < sys.device_count(); ++k) {
    const auto& d = sys.device(k);
    if (d.kind == DeviceKind::kMachine && !tripped(d.bus)) return "omega_" + d.name();
  }
  for (std::size_t k = 0; k < sys.device_count(); ++k) {
    const auto& d = sys.device(k);
    if (d.kind == DeviceKind::kConverter && d.bus == 2 && !tripped(d.bus)) return "omega_" + d.name();
  }
  for (std::size_t k = 0; k < sys.device_count(); ++k) {
    const auto& d = sys.device(k);
    if (!tripped(d.bus)) return "omega_" + d.name();
  }
  return "omega_" + sys.device(0).name();
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, const StepHook& hook) {
  cfg.validate();
  System sys(cfg.system);
  const InitResult init = initialize_steady_state(sys);

  ScenarioResult res;
  res.initial_state = init.x;
  Vector x = init.x;
  SystemInputs in = sys.default_inputs();
  auto ws = sys.make_workspace();
  Vector dx(x.size());
  std::vector<DeviceObservation> obs;

  auto events = cfg.events;
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });

  const double dt = cfg.integrator.dt;
  const auto n_steps = static_cast<long>(std::llround(cfg.t_end / dt));
  const long decim = std::max(1L, static_cast<long>(std::llround(1.0 / (cfg.sample_rate * dt))));

  Recorder rec = make_recorder(sys, cfg.outputs, cfg.system);
  rec.ts.time.reserve(static_cast<std::size_t>(n_steps / decim + 2));

  numerics::DerivativeFn f = [&](double, const Vector& xx, Vector& d) { sys.derivatives(xx, in, ws, d); };
  numerics::Stepper stepper(cfg.integrator);

  MetricsReport& m = res.metrics;
  m.init_residual = init.residual;
  m.window = cfg.rocof_window;

  sys.observe(x, in, ws, dx, obs);
  record(rec, 0.0, ws, obs);

  std::size_t next_event = 0;
  for (long s = 0; s < n_steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    while (next_event < events.size() && events[next_event].time <= t + 0.5 * dt) {
      apply_event(events[next_event], sys, in, x);
      ++next_event;
    }
    try {
      stepper.step(t, x, f);
    } catch (const std::exception& e) {
      m.aborted = true;
      m.abort_reason = e.what();
      break;
    }
    const double t1 = static_cast<double>(s + 1) * dt;
    if (hook) hook(t1, x, sys, in);
    if ((s + 1) % decim == 0) {
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e6) {
        m.aborted = true;
        m.abort_reason = "state diverged at t = " + std::to_string(t1) + " s";
        break;
      }
      try {
        sys.observe(x, in, ws, dx, obs);
      } catch (const std::exception& e) {
        m.aborted = true;
        m.abort_reason = e.what();
        break;
      }
      record(rec, t1, ws, obs);
    }
  }
  res.series = std::move(rec.ts);
  const TimeSeries& ts = res.series;

  std::vector<std::string> ignore;
  for (const auto& e : events) {
    if (e.kind == EventKind::kMachineTrip) ignore.push_back("omega_" + sys.device(sys.device_at_bus(e.bus)).name());
    if (e.kind == EventKind::kLoadStep) m.dp += std::abs(e.dp);
  }
  m.t0 = events.empty() ? 0.0 : events.front().time;
  m.frequency_channel = metrics_channel(sys, events);

  const double wb = cfg.system.network.base.omega_b;
  const auto& w = ts.channel(m.frequency_channel);
  std::vector<double> w_rad(w.size());
  std::transform(w.begin(), w.end(), w_rad.begin(), [wb](double v) { return v * wb; });
  try {
    const auto fm = frequency_metrics(ts.time, w_rad, wb, m.t0, m.window);
    m.nadir = fm.nadir;
    m.rocof = fm.rocof;
  } catch (const std::invalid_argument&) {
    m.nadir = m.rocof = std::numeric_limits<double>::quiet_NaN();
  }
  if (m.dp > 0.0) {
    m.nadir_norm = m.nadir / m.dp;
    m.rocof_norm = m.rocof / m.dp;
  }

  const auto cls = classify_stability(ts, sys.converter_params().i_limit(), cfg.thresholds, ignore);
  m.stability = cls.stability;
  m.saturation = cls.saturation;
  m.total_saturation = cls.total_saturation;
  if (m.aborted && m.stability == Stability::kStable) {
    bool low_dc = false;
    for (std::size_t ch = 0; ch < ts.names.size(); ++ch) {
      if (ts.names[ch].rfind("vdc_", 0) == 0 && !ts.data[ch].empty() &&
          !(ts.data[ch].back() >= cfg.thresholds.v_dc_min)) {
        low_dc = true;
      }
    }
    m.stability = low_dc ? Stability::kDcCollapse : Stability::kNonSynchronized;
  }
  return res;
}

}  // namespace gridforge
