#include "gridforge/metrics.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace gridforge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> time_axis(double t_end, double h) {
  std::vector<double> t;
  const auto n = static_cast<std::size_t>(std::llround(t_end / h));
  for (std::size_t k = 0; k <= n; ++k) t.push_back(static_cast<double>(k) * h);
  return t;
}

template <class F>
std::vector<double> sample(const std::vector<double>& t, F f) {
  std::vector<double> x;
  for (double v : t) x.push_back(f(v));
  return x;
}

}  // namespace

TEST_CASE("constant frequency has no nadir and no RoCoF") {
  const auto t = time_axis(2.0, 1e-3);
  const auto m = frequency_metrics(t, sample(t, [](double) { return 314.0; }), 314.0, 0.1, 0.25);
  CHECK(m.nadir == 0.0);
  CHECK(m.rocof == 0.0);
}

TEST_CASE("ramp metrics") {
  // w = w* - 0.1 (t - t0) for t in [t0, t0 + 1], flat afterwards
  const auto t = time_axis(3.0, 1e-3);
  const double ws = 100.0, t0 = 0.1;
  const auto w = sample(t, [&](double s) { return ws - 0.1 * std::clamp(s - t0, 0.0, 1.0); });
  const auto m = frequency_metrics(t, w, ws, t0, 0.25);
  CHECK_THAT(m.nadir, WithinAbs(0.1, 1e-12));
  CHECK_THAT(m.rocof, WithinAbs(0.1, 1e-9));
}

TEST_CASE("sinusoid nadir") {
  const auto t = time_axis(4.0, 1e-3);
  const double ws = 50.0;
  const auto w = sample(t, [&](double s) { return ws - 0.3 * std::sin(2.0 * std::numbers::pi * s); });
  const auto m = frequency_metrics(t, w, ws, 0.0, 0.25);
  CHECK_THAT(m.nadir, WithinAbs(0.3, 1e-9));
  // largest 0.25 s chord of a 1 Hz sine: 2 * 0.3 * sin(pi/4) / 0.25
  CHECK_THAT(m.rocof, WithinRel(2.0 * 0.3 * std::sin(std::numbers::pi / 4.0) / 0.25, 1e-6));
}

TEST_CASE("metrics scale linearly with the deviation") {
  const auto t = time_axis(3.0, 1e-3);
  const double ws = 314.159;
  auto dev = [](double s) { return s < 0.1 ? 0.0 : -(1.0 - std::exp(-(s - 0.1) / 0.3)) + 0.2 * std::sin(9.0 * s); };
  const auto base = frequency_metrics(t, sample(t, [&](double s) { return ws + dev(s); }), ws, 0.1, 0.25);
  for (double k : {0.5, 2.0, 7.5}) {
    const auto m = frequency_metrics(t, sample(t, [&](double s) { return ws + k * dev(s); }), ws, 0.1, 0.25);
    CHECK_THAT(m.nadir, WithinRel(k * base.nadir, 1e-9));
    CHECK_THAT(m.rocof, WithinRel(k * base.rocof, 1e-9));
  }
}

TEST_CASE("metric argument errors") {
  const auto t = time_axis(0.3, 1e-3);
  const auto w = sample(t, [](double) { return 1.0; });
  CHECK_THROWS_AS(frequency_metrics(t, w, 1.0, 0.1, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(frequency_metrics(t, w, 1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(frequency_metrics(t, {1.0}, 1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_NOTHROW(frequency_metrics(t, w, 1.0, 0.05, 0.25));
}

TEST_CASE("threshold intervals") {
  const auto t = time_axis(1.0, 0.1);
  const std::vector<double> x{0, 0, 1.3, 1.4, 0.5, -1.25, -1.3, 0, 0, 2.0, 2.0};
  const auto iv = threshold_intervals(t, x, 1.2);
  REQUIRE(iv.size() == 3);
  CHECK_THAT(iv[0].start, WithinAbs(0.2, 1e-12));
  CHECK_THAT(iv[0].end, WithinAbs(0.4, 1e-12));
  CHECK_THAT(iv[1].start, WithinAbs(0.5, 1e-12));
  CHECK_THAT(iv[1].end, WithinAbs(0.7, 1e-12));
  CHECK_THAT(iv[2].start, WithinAbs(0.9, 1e-12));
  CHECK_THAT(iv[2].end, WithinAbs(1.0, 1e-12));
  CHECK(threshold_intervals(t, std::vector<double>(t.size(), 0.1), 1.2).empty());
}

TEST_CASE("classifier") {
  const auto t = time_axis(10.0, 1e-3);
  TimeSeries ts;
  ts.time = t;
  const auto a = ts.add_channel("omega_sm1");
  const auto b = ts.add_channel("omega_gfc2");
  const auto v = ts.add_channel("vdc_gfc2");
  const auto i = ts.add_channel("itau_gfc2");
  ts.data[a] = sample(t, [](double s) { return 1.0 + 0.01 * std::exp(-s) * std::sin(6.0 * s); });
  ts.data[b] = sample(t, [](double s) { return 1.0 - 0.01 * std::exp(-s) * std::sin(6.0 * s); });
  ts.data[v] = sample(t, [](double) { return 1.0; });
  ts.data[i] = sample(t, [](double s) { return s > 1.0 && s < 1.3 ? 1.25 : 0.7; });

  SECTION("decaying oscillation is stable") {
    const auto c = classify_stability(ts, 1.2);
    CHECK(c.stability == Stability::kStable);
    REQUIRE(c.saturation.size() == 1);
    CHECK(c.saturation[0].channel == "itau_gfc2");
    CHECK_THAT(c.total_saturation, WithinAbs(0.298, 2e-3));
  }
  SECTION("DC voltage ramping to 0.4 collapses") {
    ts.data[v] = sample(t, [](double s) { return s < 2.0 ? 1.0 : std::max(0.4, 1.0 - 0.5 * (s - 2.0)); });
    CHECK(classify_stability(ts, 1.2).stability == Stability::kDcCollapse);
  }
  SECTION("brief dip below the threshold is tolerated") {
    ts.data[v] = sample(t, [](double s) { return s > 2.0 && s < 2.005 ? 0.5 : 1.0; });
    CHECK(classify_stability(ts, 1.2).stability == Stability::kStable);
  }
  SECTION("persistent frequency gap is non-synchronized") {
    ts.data[b] = sample(t, [](double) { return 1.002; });
    CHECK(classify_stability(ts, 1.2).stability == Stability::kNonSynchronized);
    CHECK(classify_stability(ts, 1.2, {}, {"omega_gfc2"}).stability == Stability::kStable);
  }
}

TEST_CASE("time series channels") {
  TimeSeries ts;
  ts.add_channel("x");
  CHECK_THROWS_AS(ts.add_channel("x"), std::invalid_argument);
  CHECK_THROWS_AS(ts.index("y"), std::out_of_range);
  CHECK(ts.has("x"));
  CHECK(to_string(Stability::kDcCollapse) == "dc-collapse");
}
