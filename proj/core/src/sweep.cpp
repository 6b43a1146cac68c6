#include "gridforge/sweep.hpp"

#include "gridforge/presets.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace gridforge {

std::vector<double> sweep_grid(double first, double step, int count) {
  if (count < 1) throw std::invalid_argument("sweep needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = first + step * i;
  return out;
}

int sweep_threads(std::size_t jobs) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("GRIDFORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = cap;
  }
  return std::max(1, std::min(n, static_cast<int>(jobs)));
}

std::vector<SweepEntry> sweep_disturbances(const ScenarioConfig& base, const std::vector<double>& dps,
                                           int threads) {
  if (dps.empty()) throw std::invalid_argument("disturbance list is empty");
  base.validate();

  std::vector<SweepEntry> out(dps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < dps.size(); k = next++) {
      ScenarioConfig cfg = base;
      auto it = std::find_if(cfg.events.begin(), cfg.events.end(),
                             [](const Event& e) { return e.kind == EventKind::kLoadStep; });
      if (it == cfg.events.end()) {
        cfg.events.push_back({kEventTime, EventKind::kLoadStep, 7, dps[k]});
      } else {
        it->dp = dps[k];
      }
      out[k].dp = dps[k];
      try {
        out[k].metrics = run_scenario(cfg).metrics;
      } catch (const std::exception& e) {
        out[k].error = e.what();
      }
    }
  };

  const int n = threads > 0 ? std::min<int>(threads, static_cast<int>(dps.size())) : sweep_threads(dps.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

}  // namespace gridforge
