#include "gridforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridforge {

std::size_t TimeSeries::index(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return k;
  }
  throw std::out_of_range("no channel '" + name + "'");
}

bool TimeSeries::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const { return data[index(name)]; }

std::size_t TimeSeries::add_channel(const std::string& name) {
  if (has(name)) throw std::invalid_argument("duplicate channel '" + name + "'");
  names.push_back(name);
  data.emplace_back();
  return names.size() - 1;
}

FrequencyMetrics frequency_metrics(const std::vector<double>& t, const std::vector<double>& omega,
                                   double omega_star, double t0, double window) {
  if (t.size() != omega.size()) throw std::invalid_argument("time and frequency lengths differ");
  if (!(window > 0.0)) throw std::invalid_argument("RoCoF window must be > 0");
  if (t.size() < 2) throw std::invalid_argument("signal needs at least two samples");
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (t.back() - t0 < window - 0.5 * h) {
    throw std::invalid_argument("RoCoF window longer than the signal after t0");
  }
  const auto first = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), t0 - 0.5 * h) - t.begin());
  const auto lag = static_cast<std::size_t>(std::llround(window / h));

  FrequencyMetrics m;
  for (std::size_t k = first; k < t.size(); ++k) {
    m.nadir = std::max(m.nadir, std::abs(omega_star - omega[k]));
    if (k + lag < t.size()) {
      m.rocof = std::max(m.rocof, std::abs(omega[k + lag] - omega[k]) / window);
    }
  }
  return m;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kDcCollapse: return "dc-collapse";
    case Stability::kNonSynchronized: return "non-synchronized";
  }
  return "?";
}

std::vector<Interval> threshold_intervals(const std::vector<double>& t, const std::vector<double>& x,
                                          double level) {
  std::vector<Interval> out;
  bool inside = false;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const bool above = std::abs(x[k]) >= level;
    if (above && !inside) {
      out.push_back({t[k], t[k]});
      inside = true;
    } else if (!above && inside) {
      out.back().end = t[k];
      inside = false;
    }
    if (inside) out.back().end = t[k];
  }
  return out;
}

Classification classify_stability(const TimeSeries& ts, double i_max, const ClassifierThresholds& th,
                                  const std::vector<std::string>& ignore) {
  Classification c;
  const auto& t = ts.time;
  auto starts_with = [](const std::string& s, const char* p) { return s.rfind(p, 0) == 0; };

  for (std::size_t ch = 0; ch < ts.names.size(); ++ch) {
    if (starts_with(ts.names[ch], "itau_")) {
      auto iv = threshold_intervals(t, ts.data[ch], i_max);
      for (const auto& i : iv) c.total_saturation += i.duration();
      c.saturation.push_back({ts.names[ch], std::move(iv)});
    }
  }

  for (std::size_t ch = 0; ch < ts.names.size(); ++ch) {
    if (!starts_with(ts.names[ch], "vdc_")) continue;
    double low_since = -1.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double v = ts.data[ch][k];
      if (!(v >= th.v_dc_min)) {
        if (low_since < 0.0) low_since = t[k];
        if (t[k] - low_since >= th.v_dc_duration - 1e-12) {
          c.stability = Stability::kDcCollapse;
          return c;
        }
      } else {
        low_since = -1.0;
      }
    }
  }

  std::vector<std::size_t> freq;
  for (std::size_t ch = 0; ch < ts.names.size(); ++ch) {
    if (starts_with(ts.names[ch], "omega_") &&
        std::find(ignore.begin(), ignore.end(), ts.names[ch]) == ignore.end()) {
      freq.push_back(ch);
    }
  }
  if (t.empty()) return c;
  const double tail_start = t.back() - th.tail_fraction * (t.back() - t.front());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < tail_start) continue;
    for (std::size_t a = 0; a < freq.size(); ++a) {
      for (std::size_t b = a + 1; b < freq.size(); ++b) {
        const double gap = std::abs(ts.data[freq[a]][k] - ts.data[freq[b]][k]);
        if (!(gap <= th.sync_tol)) {
          c.stability = Stability::kNonSynchronized;
          return c;
        }
      }
    }
  }
  return c;
}

}  // namespace gridforge
