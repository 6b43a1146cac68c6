#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gridforge::cli {

/// Options shared by all sub-commands; empty strings mean "not given".
struct CommandOptions {
  std::string config;  // file path or preset name
  std::string preset;
  std::string strategy;
  std::string strategies;
  std::optional<std::string> dp;  // run: one value; sweep: comma list
  std::string t_end;
  std::string dt;
  std::string out = "out";
  std::vector<std::string> overrides;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnstable = 2;

/// Each returns the process exit code and reports errors on stderr.
int cmd_run(const CommandOptions& opts);
int cmd_sweep(const CommandOptions& opts);
int cmd_init(const CommandOptions& opts);

}  // namespace gridforge::cli
