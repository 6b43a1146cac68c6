#include "commands.hpp"

#include "cli_config.hpp"
#include "cli_output.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#ifndef GRIDFORGE_VERSION
#define GRIDFORGE_VERSION "unknown"
#endif

namespace gridforge::cli {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

pt::ptree load_tree(const CommandOptions& o, bool sweep) {
  pt::ptree tree;
  if (!o.config.empty()) {
    const auto names = preset_names();
    const bool is_preset = std::find(names.begin(), names.end(), o.config) != names.end();
    if (is_preset && !fs::exists(o.config)) {
      tree.put("scenario.preset", o.config);
    } else {
      tree = read_config_file(o.config);
    }
  }
  if (!o.preset.empty()) tree.put("scenario.preset", o.preset);
  if (o.dp) tree.put(sweep ? "sweep.dp" : "scenario.dp", *o.dp);
  if (!o.t_end.empty()) tree.put("scenario.t_end", o.t_end);
  if (!o.dt.empty()) tree.put("integrator.dt", o.dt);
  if (!o.strategies.empty()) tree.put("sweep.strategies", o.strategies);
  for (const auto& ov : o.overrides) apply_override(tree, ov);
  return tree;
}

std::string source_of(const CommandOptions& o) {
  if (o.config.empty()) return "preset:" + (o.preset.empty() ? std::string("sweep-9bus") : o.preset);
  return fs::exists(o.config) ? o.config : "preset:" + o.config;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
}

void write_manifest(const fs::path& dir, const std::string& command, const CliConfig& cfg,
                    const std::vector<std::string>& files, double wall) {
  ordered_json settings = ordered_json::object();
  for (const auto& [k, v] : cfg.settings) settings[k] = v;
  ordered_json j;
  j["tool"] = "gridforge";
  j["tool_version"] = GRIDFORGE_VERSION;
  j["command"] = command;
  j["config"] = cfg.source;
  j["output_directory"] = fs::absolute(dir).lexically_normal().string();
  j["determinism"] = "no random inputs; every output is fixed by the settings and the tool version";
  j["settings"] = settings;
  j["files"] = files;
  j["wall_clock_seconds"] = wall;
  write_json(dir / "manifest.json", j);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const network::PowerFlowError& e) {
    std::cerr << "power flow failed: " << e.what() << '\n';
  } catch (const InitializationError& e) {
    std::cerr << "initialization failed: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace

int cmd_run(const CommandOptions& opts) {
  return guarded([&] {
    const auto t0 = Clock::now();
    const CliConfig cfg = build_config(load_tree(opts, false), source_of(opts), opts.strategy);
    const fs::path dir = opts.out;
    prepare_dir(dir);

    const ScenarioResult res = run_scenario(cfg.scenario);
    const auto& m = res.metrics;
    write_timeseries_csv(dir / "timeseries.csv", res.series);
    write_json(dir / "metrics.json", metrics_to_json(m));
    write_manifest(dir, "run", cfg, {"timeseries.csv", "metrics.json"}, seconds_since(t0));

    std::printf("%s %s: %s  nadir %s rad/s  rocof %s rad/s^2  saturated %s s\n", cfg.scenario.name.c_str(),
                cfg.strategy.c_str(), to_string(m.stability).c_str(), format_number(m.nadir).c_str(),
                format_number(m.rocof).c_str(), format_number(m.total_saturation).c_str());
    if (m.aborted) std::printf("integration stopped: %s\n", m.abort_reason.c_str());
    return is_stable(m.stability) ? kExitOk : kExitUnstable;
  });
}

int cmd_sweep(const CommandOptions& opts) {
  return guarded([&] {
    const auto t0 = Clock::now();
    const pt::ptree tree = load_tree(opts, true);
    const CliConfig base = build_config(tree, source_of(opts), opts.strategy);
    if (base.sweep.dps.empty()) throw ConfigError("sweep: the disturbance list is empty");
    const fs::path dir = opts.out;
    prepare_dir(dir);

    const bool several = base.sweep.strategies.size() > 1;
    std::vector<StrategySummary> rows;
    std::vector<std::string> files;
    bool failed = false;
    for (const auto& s : base.sweep.strategies) {
      const CliConfig cfg = build_config(tree, base.source, s);
      std::fprintf(stderr, "sweeping %s over %zu disturbances\n", s.c_str(), base.sweep.dps.size());
      auto entries = sweep_disturbances(cfg.scenario, base.sweep.dps);
      const std::string file = several ? "sweep_" + s + ".csv" : "sweep.csv";
      write_sweep_csv(dir / file, entries);
      files.push_back(file);
      for (const auto& e : entries) {
        if (!e.error.empty()) {
          failed = true;
          std::fprintf(stderr, "%s dp=%s: %s\n", s.c_str(), format_number(e.dp).c_str(), e.error.c_str());
        }
      }
      rows.push_back({s, file, std::move(entries)});
    }
    if (several) {
      write_comparison_csv(dir / "comparison.csv", rows);
      files.push_back("comparison.csv");
    }
    write_manifest(dir, "sweep", base, files, seconds_since(t0));
    for (const auto& f : files) std::printf("wrote %s\n", (dir / f).string().c_str());
    return failed ? kExitError : kExitOk;
  });
}

int cmd_init(const CommandOptions& opts) {
  return guarded([&] {
    const CliConfig cfg = build_config(load_tree(opts, false), source_of(opts), opts.strategy);
    const fs::path dir = opts.out;
    prepare_dir(dir);
    System sys(cfg.scenario.system);
    const InitResult init = initialize_steady_state(sys);
    write_json(dir / "equilibrium.json", equilibrium_to_json(sys, init));
    std::printf("max derivative residual: %.3e\n", init.residual);
    return kExitOk;
  });
}

}  // namespace gridforge::cli
