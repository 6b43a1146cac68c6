// Acceptance suite: one PASS/FAIL line per criterion on stdout, details on
// stderr. Exit status is nonzero when any criterion fails.

#include "gridforge/presets.hpp"
#include "gridforge/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>

using namespace gridforge;

namespace {

// tolerances
constexpr double kRunTimeLimit = 300.0;       // s of wall time per 10 s run
constexpr double kSatOnset[2] = {0.3, 0.8};   // s after the event
constexpr double kSatRelease[2] = {2.5, 5.0};
constexpr double kTrackGap = 2e-3;            // pu
constexpr double kTrackSettle = 0.1;          // s ignored after saturation onset
constexpr double kDcIdentity = 1e-6;
constexpr double kAllGfcSaturation = 0.5;     // s
constexpr double kLossSaturation = 0.150;     // s
constexpr double kMedianAgreement = 0.10;
constexpr double kSyncTol = 1e-4;             // pu
constexpr double kResidual = 1e-8;
constexpr double kDrift = 1e-6;
constexpr double kEnergyIdentity = 1e-12;
constexpr double kPolarAgreement = 1e-10;
constexpr double kSlopeAgreement = 0.05;

const std::vector<std::string> kGfc{"droop", "vsm", "matching", "dvoc"};

struct Run {
  ScenarioResult result;
  double wall = 0.0;
};

std::map<std::string, Run> cache;

const Run& run(const std::string& preset, const std::string& strategy, std::optional<double> dp = {}) {
  std::ostringstream key;
  key << preset << "/" << strategy << "/" << (dp ? *dp : -1.0);
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;
  PresetOptions o;
  o.strategy = strategy;
  o.dp = dp;
  const auto t0 = std::chrono::steady_clock::now();
  Run r{run_scenario(make_preset(preset, o)), 0.0};
  r.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& m = r.result.metrics;
  std::fprintf(stderr, "  %s %s dp=%.2f: %s, saturation %.3f s%s%s, %.1f s wall\n", preset.c_str(), strategy.c_str(),
               m.dp, to_string(m.stability).c_str(), m.total_saturation, m.aborted ? ", aborted: " : "",
               m.aborted ? m.abort_reason.c_str() : "", r.wall);
  return cache.emplace(key.str(), std::move(r)).first->second;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::vector<Interval> all_saturation(const MetricsReport& m) {
  std::vector<Interval> out;
  for (const auto& ch : m.saturation) out.insert(out.end(), ch.intervals.begin(), ch.intervals.end());
  return out;
}

// Last sample time at which |a - b| > tol; -inf when they always agree.
double last_disagreement(const TimeSeries& ts, const std::string& a, const std::string& b, double tol) {
  const auto& x = ts.channel(a);
  const auto& y = ts.channel(b);
  for (std::size_t k = ts.size(); k-- > 0;) {
    if (!(std::abs(x[k] - y[k]) <= tol)) return ts.time[k];
  }
  return -INFINITY;
}

void criterion1() {
  bool ok = true;
  std::string detail;
  for (double dp : {0.75, 0.9}) {
    for (const auto& s : kGfc) {
      const auto& r = run("large-disturbance", s, dp);
      const bool stable = is_stable(r.result.metrics.stability);
      const bool expect = dp < 0.8 || s == "matching";
      if (stable != expect || r.wall > kRunTimeLimit) ok = false;
      detail += s + "@" + fmt("%.2f", dp) + "=" + to_string(r.result.metrics.stability) + " ";
    }
  }
  verdict(1, ok, detail);
}

void criterion2() {
  const auto& r = run("large-disturbance", "matching", 0.9);
  const auto& m = r.result.metrics;
  const auto& ts = r.result.series;
  auto sat = all_saturation(m);
  bool ok = !m.aborted && !sat.empty();
  std::string detail;
  if (sat.empty()) {
    detail = "no saturation";
  } else {
    double onset = INFINITY, release = -INFINITY;
    for (const auto& i : sat) {
      onset = std::min(onset, i.start);
      release = std::max(release, i.end);
    }
    onset -= m.t0;
    release -= m.t0;
    const bool run_ended_saturated = release + m.t0 >= ts.time.back() - 1e-9;
    ok = ok && onset >= kSatOnset[0] && onset <= kSatOnset[1];
    ok = ok && !run_ended_saturated && release >= kSatRelease[0] && release <= kSatRelease[1];
    detail += "onset " + fmt("%.3f", onset) + " s, release " +
              (run_ended_saturated ? std::string("not reached") : fmt("%.3f", release) + " s");

    double gap = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double t = ts.time[k] - m.t0;
      if (t < onset + kTrackSettle || t > release) continue;
      for (const char* g : {"omega_gfc2", "omega_gfc3"}) {
        gap = std::max(gap, std::abs(ts.channel(g)[k] - ts.channel("omega_sm1")[k]));
      }
    }
    ok = ok && gap <= kTrackGap;
    detail += ", tracking gap " + fmt("%.2e", gap);
  }
  double identity = 0.0;
  for (const char* g : {"gfc2", "gfc3"}) {
    const auto& v = ts.channel(std::string("vdc_") + g);
    const auto& w = ts.channel(std::string("omega_") + g);
    for (std::size_t k = 0; k < v.size(); ++k) identity = std::max(identity, std::abs(v[k] - w[k]));
  }
  ok = ok && identity <= kDcIdentity;
  detail += ", |v_dc - w| " + fmt("%.1e", identity);
  if (m.aborted) detail += ", run aborted (" + to_string(m.stability) + ")";
  verdict(2, ok, detail);
}

void saturation_criterion(int n, const std::string& preset, double limit) {
  bool ok = true;
  std::string detail;
  for (const auto& s : kGfc) {
    const auto& m = run(preset, s).result.metrics;
    const double measure = m.total_saturation;
    if (!is_stable(m.stability) || measure > limit) ok = false;
    detail += s + "=" + to_string(m.stability) + "/" + fmt("%.3f", measure) + "s ";
  }
  verdict(n, ok, detail);
}

void criterion5() {
  PresetOptions o;
  const auto grid = sweep_grid();
  std::map<std::string, std::pair<double, double>> med;
  std::size_t errors = 0;
  for (const auto& s : {"all-sm", "droop", "vsm", "matching", "dvoc"}) {
    o.strategy = s;
    const auto t0 = std::chrono::steady_clock::now();
    const auto entries = sweep_disturbances(make_preset("sweep-9bus", o), grid);
    std::vector<double> nadir, rocof;
    for (const auto& e : entries) {
      if (!e.error.empty() || e.metrics.aborted || !std::isfinite(e.metrics.nadir_norm)) {
        ++errors;
        continue;
      }
      nadir.push_back(e.metrics.nadir_norm);
      rocof.push_back(e.metrics.rocof_norm);
    }
    auto median = [](std::vector<double> v) {
      if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
      std::sort(v.begin(), v.end());
      const std::size_t h = v.size() / 2;
      return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    med[s] = {median(nadir), median(rocof)};
    std::fprintf(stderr, "  sweep %s: median nadir/dp %.4f, rocof/dp %.4f (%.0f s wall)\n", s, med[s].first,
                 med[s].second, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  bool ok = errors == 0;
  std::string detail;
  for (const auto& s : kGfc) {
    ok = ok && med[s].first < med["all-sm"].first && med[s].second < med["all-sm"].second;
  }
  const auto& d = med["droop"];
  const auto& v = med["dvoc"];
  const double nadir_gap = std::abs(d.first - v.first) / d.first;
  const double rocof_gap = std::abs(d.second - v.second) / d.second;
  ok = ok && nadir_gap <= kMedianAgreement && rocof_gap <= kMedianAgreement;
  for (const auto& s : {"droop", "vsm", "dvoc"}) ok = ok && med["matching"].second > med[s].second;
  detail = "all-sm " + fmt("%.4f", med["all-sm"].first) + "/" + fmt("%.4f", med["all-sm"].second);
  for (const auto& s : kGfc) detail += ", " + s + " " + fmt("%.4f", med[s].first) + "/" + fmt("%.4f", med[s].second);
  detail += " (median nadir/RoCoF per pu), droop-dvoc gap " + fmt("%.1f%%", 100.0 * std::max(nadir_gap, rocof_gap));
  if (errors) detail += ", " + std::to_string(errors) + " failed runs";
  verdict(5, ok, detail);
}

void criterion6() {
  const auto& ts = run("large-disturbance", "vsm", 0.75).result.series;
  const double conv = last_disagreement(ts, "omega_gfc2", "omega_gfc3", kSyncTol);
  const double sm2 = last_disagreement(ts, "omega_gfc2", "omega_sm1", kSyncTol);
  const double sm3 = last_disagreement(ts, "omega_gfc3", "omega_sm1", kSyncTol);
  const double first_sm = std::min(sm2, sm3);
  const bool ok = std::isfinite(first_sm) && conv < first_sm;
  auto show = [](double t) { return std::isfinite(t) ? fmt("%.3f s", t) : std::string("never"); };
  verdict(6, ok, "last disagreement: converters " + show(conv) + ", converters with the machine " + show(sm2) + " / " +
                     show(sm3));
}

// (a) equilibrium residuals and null-run drift
bool property_equilibrium(std::string& detail) {
  double worst_res = 0.0, worst_drift = 0.0;
  for (const auto& preset : preset_names()) {
    for (const auto& s : {"droop", "vsm", "matching", "dvoc", "all-sm"}) {
      PresetOptions o;
      o.strategy = s;
      o.t_end = 5.0;
      auto cfg = make_preset(preset, o);
      cfg.events.clear();
      // initialization is deterministic, so this is the state the run starts from
      System sys(cfg.system);
      const Vector x0 = initialize_steady_state(sys).x;
      double drift = 0.0;
      const auto r = run_scenario(cfg, [&](double, const Vector& x, const System&, const SystemInputs&) {
        drift = std::max(drift, (x - x0).cwiseAbs().maxCoeff());
      });
      drift = std::max(drift, (r.initial_state - x0).cwiseAbs().maxCoeff());
      worst_res = std::max(worst_res, r.metrics.init_residual);
      worst_drift = std::max(worst_drift, drift);
    }
  }
  detail += "residual " + fmt("%.1e", worst_res) + ", drift " + fmt("%.1e", worst_drift);
  return worst_res <= kResidual && worst_drift <= kDrift;
}

// (b) power identity across the modulation stage and (c) the DC clamp,
// checked after every step of a saturating run
bool property_converter(std::string& detail) {
  PresetOptions o;
  o.strategy = "droop";
  o.t_end = 1.5;
  const auto cfg = make_preset("all-gfc", o);
  double identity = 0.0, excess = -INFINITY;
  std::vector<DeviceObservation> obs;
  System::Workspace ws;
  Vector dx;
  run_scenario(cfg, [&](double, const Vector& x, const System& sys, const SystemInputs& in) {
    if (ws.injections.empty()) ws = sys.make_workspace();
    dx.resize(x.size());
    sys.observe(x, in, ws, dx, obs);
    const double lim = sys.converter_params().i_limit();
    for (std::size_t k = 0; k < obs.size(); ++k) {
      if (sys.device(k).kind != DeviceKind::kConverter) continue;
      const auto& o = obs[k];
      const double p_dc = o.v_dc * o.i_x;
      const double p_ac = (o.v_s * std::conj(o.i_s)).real();
      identity = std::max(identity, std::abs(p_dc - p_ac) / std::max(1.0, std::abs(p_ac)));
      excess = std::max(excess, std::abs(o.i_dc) - lim);
    }
  });
  detail += ", identity " + fmt("%.1e", identity) + ", clamp excess " + fmt("%.1e", std::max(0.0, excess));
  return identity <= kEnergyIdentity && excess <= 0.0;
}

// (d) vector and polar oscillator forms
bool property_oscillator(std::string& detail) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto c = controllers::derive_gains().dvoc;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    c.p_star = u(rng);
    c.q_star = u(rng);
    const double r = 1.0 + 0.5 * u(rng);
    const Complex v = std::polar(r, 3.2 * u(rng));
    const Complex i{1.5 * u(rng), 1.5 * u(rng)};
    const Complex d = controllers::dvoc_reference(i, v, c);
    const Complex s = v * std::conj(i);
    const auto polar = controllers::dvoc_polar(s.real(), s.imag(), r, c);
    worst = std::max({worst, std::abs((std::conj(v) * d).imag() / std::norm(v) - polar.theta_dot),
                      std::abs((std::conj(v) * d).real() / r - polar.r_dot)});
  }
  detail += ", polar " + fmt("%.1e", worst);
  return worst <= kPolarAgreement;
}

// (e) RK4 on x' = A x against the matrix exponential
bool property_order(std::string& detail) {
  Eigen::Matrix3d a;
  a << -1.0, 4.0, 0.0, -4.0, -1.0, 0.0, 0.0, 0.0, -3.0;
  numerics::DerivativeFn f = [&](double, const Vector& x, Vector& dx) { dx = a * x; };
  // exact solution through the eigen decomposition of the block structure
  auto exact = [](double t) {
    Vector x(3);
    x << std::exp(-t) * (std::cos(4.0 * t) + std::sin(4.0 * t)), std::exp(-t) * (std::cos(4.0 * t) - std::sin(4.0 * t)),
        std::exp(-3.0 * t);
    return x;
  };
  auto error = [&](double dt) {
    numerics::IntegratorConfig cfg;
    cfg.dt = dt;
    numerics::Stepper st(cfg);
    Vector x = exact(0.0);
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < n; ++k) st.step(k * dt, x, f);
    return (x - exact(1.0)).cwiseAbs().maxCoeff();
  };
  const double e1 = error(0.02), e2 = error(0.01);
  const double order = std::log2(e1 / e2);
  detail += ", order " + fmt("%.2f", order);
  return order >= 3.85 && order <= 4.15;
}

// (f) steady-state frequency shift per unit of picked-up load
bool property_slope(std::string& detail) {
  double worst = 0.0;
  for (const auto& s : kGfc) {
    PresetOptions o;
    o.strategy = s;
    o.t_end = 8.0;
    o.dp = 0.2;
    auto cfg = make_preset("sweep-9bus", o);
    cfg.system.machine.tau_g = 0.5;  // settle the governor within the run
    const auto r = run_scenario(cfg);
    if (r.metrics.aborted) return false;
    for (const char* dev : {"sm1", "gfc2", "gfc3"}) {
      const auto& w = r.series.channel(std::string("omega_") + dev);
      const auto& p = r.series.channel(std::string("p_") + dev);
      const double slope = -(w.back() - w.front()) / (p.back() - p.front());
      worst = std::max(worst, std::abs(slope / controllers::kDefaultSlope - 1.0));
    }
  }
  detail += ", slope spread " + fmt("%.1f%%", 100.0 * worst);
  return worst <= kSlopeAgreement;
}

// (g) nadir and RoCoF scale with the frequency deviation
bool property_linearity(std::string& detail) {
  const auto& ts = run("large-disturbance", "droop", 0.75).result.series;
  const double wb = 2.0 * std::numbers::pi * 50.0;
  std::vector<double> w;
  for (double v : ts.channel("omega_sm1")) w.push_back(v * wb);
  const auto base = frequency_metrics(ts.time, w, wb, kEventTime, 0.25);
  double worst = 0.0;
  for (double k : {-2.0, 0.1, 3.0, 10.0}) {
    std::vector<double> scaled;
    for (double v : w) scaled.push_back(wb + k * (v - wb));
    const auto m = frequency_metrics(ts.time, scaled, wb, kEventTime, 0.25);
    worst = std::max({worst, std::abs(m.nadir - std::abs(k) * base.nadir) / base.nadir,
                      std::abs(m.rocof - std::abs(k) * base.rocof) / base.rocof});
  }
  detail += ", linearity " + fmt("%.1e", worst);
  return worst <= 1e-9;
}

void criterion7() {
  std::string detail;
  bool ok = true;
  const std::pair<const char*, bool (*)(std::string&)> parts[] = {
      {"a", property_equilibrium}, {"b,c", property_converter}, {"d", property_oscillator},
      {"e", property_order},       {"f", property_slope},       {"g", property_linearity}};
  std::string failed;
  for (const auto& [name, fn] : parts) {
    if (!fn(detail)) {
      ok = false;
      failed += std::string(" ") + name;
    }
  }
  if (!failed.empty()) detail += "; failed:" + failed;
  verdict(7, ok, detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  saturation_criterion(3, "all-gfc", kAllGfcSaturation);
  saturation_criterion(4, "loss-of-sm", kLossSaturation);
  criterion5();
  criterion6();
  criterion7();
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
