#include "cli_output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace gridforge::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

void write_timeseries_csv(const fs::path& path, const TimeSeries& ts) {
  auto out = open_out(path);
  std::string line = "time";
  for (const auto& n : ts.names) line += "," + n;
  out << line << '\n';
  for (std::size_t k = 0; k < ts.size(); ++k) {
    line = format_number(ts.time[k]);
    for (const auto& ch : ts.data) {
      line += ',';
      line += format_number(ch[k]);
    }
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ordered_json metrics_to_json(const MetricsReport& m) {
  ordered_json sat = ordered_json::array();
  for (const auto& c : m.saturation) {
    ordered_json iv = ordered_json::array();
    for (const auto& i : c.intervals) iv.push_back({{"start", i.start}, {"end", i.end}});
    sat.push_back({{"channel", c.channel}, {"intervals", iv}});
  }
  ordered_json j;
  j["stability"] = to_string(m.stability);
  j["frequency_channel"] = m.frequency_channel;
  j["t0"] = m.t0;
  j["window"] = m.window;
  j["dp"] = m.dp;
  j["nadir"] = number(m.nadir);
  j["rocof"] = number(m.rocof);
  j["nadir_norm"] = number(m.nadir_norm);
  j["rocof_norm"] = number(m.rocof_norm);
  j["total_saturation"] = m.total_saturation;
  j["saturation"] = sat;
  j["aborted"] = m.aborted;
  if (m.aborted) j["abort_reason"] = m.abort_reason;
  j["init_residual"] = m.init_residual;
  return j;
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepEntry>& entries) {
  auto out = open_out(path);
  out << "dp,nadir,rocof,nadir_norm,rocof_norm,stability\n";
  for (const auto& e : entries) {
    out << format_number(e.dp);
    if (!e.error.empty()) {
      out << ",,,,,error\n";
      continue;
    }
    const auto& m = e.metrics;
    out << ',' << format_number(m.nadir) << ',' << format_number(m.rocof) << ',' << format_number(m.nadir_norm)
        << ',' << format_number(m.rocof_norm) << ',' << to_string(m.stability) << '\n';
  }
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_comparison_csv(const fs::path& path, const std::vector<StrategySummary>& rows) {
  auto out = open_out(path);
  out << "strategy,file,runs,stable,median_nadir_norm,median_rocof_norm\n";
  for (const auto& r : rows) {
    std::vector<double> nadir, rocof;
    int stable = 0;
    for (const auto& e : r.entries) {
      if (!e.error.empty()) continue;
      nadir.push_back(e.metrics.nadir_norm);
      rocof.push_back(e.metrics.rocof_norm);
      if (is_stable(e.metrics.stability)) ++stable;
    }
    out << r.strategy << ',' << r.file << ',' << r.entries.size() << ',' << stable << ','
        << format_number(median(nadir)) << ',' << format_number(median(rocof)) << '\n';
  }
}

ordered_json equilibrium_to_json(const System& sys, const InitResult& init) {
  ordered_json buses = ordered_json::array();
  const auto& net = sys.network();
  for (std::size_t k = 0; k < net.node_count(); ++k) {
    const Complex v = init.power_flow.voltages[k];
    const Complex s = init.power_flow.injections[k];
    buses.push_back({{"bus", net.node_bus_id(k)},
                     {"v", std::abs(v)},
                     {"angle", std::arg(v)},
                     {"p", s.real()},
                     {"q", s.imag()}});
  }
  ordered_json states = ordered_json::array();
  for (Eigen::Index i = 0; i < init.x.size(); ++i) {
    states.push_back({{"label", sys.layout().label(static_cast<std::size_t>(i))}, {"value", init.x[i]}});
  }
  ordered_json j;
  j["residual"] = init.residual;
  j["polished"] = init.polished;
  j["power_flow"] = {{"mismatch", init.power_flow.mismatch}, {"buses", buses}};
  j["state"] = states;
  return j;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    auto out = open_out(tmp);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const ordered_json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

}  // namespace gridforge::cli
