#pragma once

// Frequency performance metrics and post-run stability classification.

#include <string>
#include <vector>

namespace gridforge {

/// Uniformly sampled named channels sharing one time axis.
struct TimeSeries {
  std::vector<double> time;
  std::vector<std::string> names;
  std::vector<std::vector<double>> data;  // data[channel][sample]

  /// Index of a channel; throws std::out_of_range.
  std::size_t index(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<double>& channel(const std::string& name) const;
  std::size_t add_channel(const std::string& name);
  std::size_t size() const { return time.size(); }
};

struct FrequencyMetrics {
  double nadir = 0.0;  // max |w* - w(t)| for t >= t0
  double rocof = 0.0;  // max |w(t + T) - w(t)| / T for t >= t0
};

/// Requires uniformly sampled `t`. Throws std::invalid_argument when the
/// window does not fit between t0 and the end of the signal.
FrequencyMetrics frequency_metrics(const std::vector<double>& t, const std::vector<double>& omega,
                                   double omega_star, double t0, double window);

enum class Stability { kStable, kDcCollapse, kNonSynchronized };
std::string to_string(Stability s);
inline bool is_stable(Stability s) { return s == Stability::kStable; }

struct ClassifierThresholds {
  double v_dc_min = 0.6;        // pu of v_dc*
  double v_dc_duration = 0.01;  // s
  double sync_tol = 1e-3;       // pu
  double tail_fraction = 0.1;   // of the run length
};

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double duration() const { return end - start; }
};

struct ChannelIntervals {
  std::string channel;
  std::vector<Interval> intervals;
};

struct Classification {
  Stability stability = Stability::kStable;
  std::vector<ChannelIntervals> saturation;  // one entry per "itau_*" channel
  double total_saturation = 0.0;             // summed over channels, s
};

/// Channels are recognized by prefix: "vdc_" (pu), "omega_" (pu) and
/// "itau_" (pu). Frequency channels listed in `ignore` are skipped in the
/// synchronization test (tripped units).
Classification classify_stability(const TimeSeries& ts, double i_max, const ClassifierThresholds& th = {},
                                  const std::vector<std::string>& ignore = {});

/// Maximal spans where |x| >= level.
std::vector<Interval> threshold_intervals(const std::vector<double>& t, const std::vector<double>& x,
                                          double level);

}  // namespace gridforge
