#include "commands.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  using namespace gridforge::cli;
  CLI::App app{"gridforge: low-inertia power system simulations"};
  app.require_subcommand(1);

  CommandOptions opts;
  auto common = [&](CLI::App* sub, bool sweep) {
    sub->add_option("config", opts.config, "scenario file, or a preset name");
    sub->add_option("--preset", opts.preset, "sweep-9bus | large-disturbance | loss-of-sm | all-gfc");
    sub->add_option("--strategy", opts.strategy, "droop | vsm | matching | dvoc | all-sm");
    sub->add_option("--dp", opts.dp, sweep ? "comma-separated disturbance list, pu" : "load step, pu");
    sub->add_option("--t-end", opts.t_end, "simulated time, s");
    sub->add_option("--dt", opts.dt, "integration step, s");
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--override", opts.overrides, "section.key=value, repeatable");
  };

  auto* run = app.add_subcommand("run", "simulate one scenario");
  common(run, false);
  auto* sweep = app.add_subcommand("sweep", "repeat a scenario over a list of load steps");
  common(sweep, true);
  sweep->add_option("--strategies", opts.strategies, "comma-separated strategies, one result file each");
  auto* init = app.add_subcommand("init", "solve the initial operating point only");
  common(init, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  if (run->parsed()) return cmd_run(opts);
  if (sweep->parsed()) return cmd_sweep(opts);
  return cmd_init(opts);
}
