#pragma once

// File writers for the command-line tool. Numbers are printed with nine
// significant digits, '.' as separator and LF line endings.

#include "cli_config.hpp"

#include "gridforge/initialization.hpp"
#include "gridforge/sweep.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace gridforge::cli {

std::string format_number(double v);

/// Header "time,<channel>,...", channels in recording order.
void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts);

nlohmann::ordered_json metrics_to_json(const MetricsReport& m);

/// Columns: dp,nadir,rocof,nadir_norm,rocof_norm,stability. Failed runs get
/// stability "error" and empty metric cells.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepEntry>& entries);

struct StrategySummary {
  std::string strategy;
  std::string file;
  std::vector<SweepEntry> entries;
};

/// One row per strategy: medians of the normalized metrics and run counts.
void write_comparison_csv(const std::filesystem::path& path, const std::vector<StrategySummary>& rows);

nlohmann::ordered_json equilibrium_to_json(const System& sys, const InitResult& init);

/// Writes through a temporary file in the same directory and renames it.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

double median(std::vector<double> v);

}  // namespace gridforge::cli
