#include "cli_config.hpp"

#include "gridforge/sweep.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include <cmath>
#include <filesystem>
#include <set>

namespace gridforge::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"preset", "strategy", "dp", "t_end", "base_load"}},
      {"integrator", {"method", "dt"}},
      {"output", {"sample_rate", "rocof_window", "channels"}},
      {"sweep", {"dp", "first", "step", "count", "strategies"}},
      {"gains", {"slope", "literal", "k_dc", "k_pv", "k_iv", "k_pi", "k_ii"}},
      {"converter", {"n", "tau_dc", "i_max", "literal_g_dc", "clamp_modulation"}},
      {"machine", {"h", "d_p", "tau_g"}},
      {"classifier", {"v_dc_min", "v_dc_duration", "sync_tol", "tail_fraction"}},
  };
  return keys;
}

void check_keys(const pt::ptree& tree) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    auto it = keys.find(section);
    if (it == keys.end()) throw ConfigError("unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
    }
  }
}

class Reader {
 public:
  explicit Reader(const pt::ptree& t) : tree_(t) {}

  std::optional<std::string> text(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return boost::trim_copy(*v);
  }

  std::optional<double> number(const std::string& key) const {
    auto s = text(key);
    if (!s) return std::nullopt;
    return to_number(*s, key);
  }

  std::optional<bool> flag(const std::string& key) const {
    auto s = text(key);
    if (!s) return std::nullopt;
    const std::string v = boost::to_lower_copy(*s);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + *s + "'");
  }

  static double to_number(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw ConfigError(key + ": expected a number, got '" + s + "'");
    }
    return v;
  }

 private:
  const pt::ptree& tree_;
};

template <class T>
void set_if(const std::optional<T>& v, T& out) {
  if (v) out = *v;
}

void flatten(const pt::ptree& tree, std::map<std::string, std::string>& out) {
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) out[section + "." + key] = boost::trim_copy(value.data());
  }
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& p : split_list(text)) out.push_back(Reader::to_number(p, key));
  return out;
}

pt::ptree read_config_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("cannot read config file '" + path + "'");
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config file '" + path + "': " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

void apply_override(pt::ptree& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  const std::string key = boost::trim_copy(assignment.substr(0, eq));
  const std::string value = boost::trim_copy(assignment.substr(eq + 1));
  const auto dot = key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() || key.find('.', dot + 1) != std::string::npos) {
    throw ConfigError("override key '" + key + "' must be section.key");
  }
  tree.put(pt::ptree::path_type(key, '.'), value);
}

CliConfig build_config(const pt::ptree& tree, const std::string& source, const std::string& strategy_override) {
  check_keys(tree);
  const Reader r(tree);
  CliConfig out;
  out.source = source;
  flatten(tree, out.settings);

  const std::string preset = r.text("scenario.preset").value_or("sweep-9bus");
  out.strategy = strategy_override.empty() ? r.text("scenario.strategy").value_or("droop") : strategy_override;
  out.settings["scenario.preset"] = preset;
  out.settings["scenario.strategy"] = out.strategy;

  PresetOptions po;
  po.strategy = out.strategy;
  po.dp = r.number("scenario.dp");
  po.t_end = r.number("scenario.t_end");
  po.base_load = r.number("scenario.base_load");
  try {
    out.scenario = make_preset(preset, po);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  ScenarioConfig& c = out.scenario;

  if (auto m = r.text("integrator.method")) {
    try {
      c.integrator.method = numerics::method_from_string(*m);
    } catch (const std::exception&) {
      throw ConfigError("integrator.method: unknown method '" + *m + "'");
    }
  }
  set_if(r.number("integrator.dt"), c.integrator.dt);

  set_if(r.number("output.sample_rate"), c.sample_rate);
  set_if(r.number("output.rocof_window"), c.rocof_window);
  if (auto ch = r.text("output.channels")) c.outputs = split_list(*ch);

  auto& g = c.system.gains;
  const auto slope = r.number("gains.slope");
  if (r.flag("gains.literal").value_or(false)) {
    const auto inner = g.inner;
    g = controllers::literal_gains();
    g.inner = inner;
  } else if (slope) {
    if (!(*slope > 0.0)) throw ConfigError("gains.slope: must be > 0");
    const auto inner = g.inner;
    g = controllers::derive_gains(*slope);
    g.inner = inner;
    c.system.machine.d_p = 1.0 / *slope;
  }
  set_if(r.number("gains.k_dc"), g.k_dc);
  set_if(r.number("gains.k_pv"), g.inner.k_pv);
  set_if(r.number("gains.k_iv"), g.inner.k_iv);
  set_if(r.number("gains.k_pi"), g.inner.k_pi);
  set_if(r.number("gains.k_ii"), g.inner.k_ii);

  if (auto n = r.number("converter.n")) {
    if (*n != std::floor(*n) || *n < 1.0) throw ConfigError("converter.n: must be a positive integer");
    c.system.converter.n = static_cast<int>(*n);
  }
  set_if(r.number("converter.tau_dc"), c.system.converter.tau_dc);
  set_if(r.number("converter.i_max"), c.system.converter.i_max);
  set_if(r.flag("converter.literal_g_dc"), c.system.converter.module.literal_g_dc);
  set_if(r.flag("converter.clamp_modulation"), c.system.converter.clamp_modulation);

  set_if(r.number("machine.h"), c.system.machine.h);
  set_if(r.number("machine.d_p"), c.system.machine.d_p);
  set_if(r.number("machine.tau_g"), c.system.machine.tau_g);

  set_if(r.number("classifier.v_dc_min"), c.thresholds.v_dc_min);
  set_if(r.number("classifier.v_dc_duration"), c.thresholds.v_dc_duration);
  set_if(r.number("classifier.sync_tol"), c.thresholds.sync_tol);
  set_if(r.number("classifier.tail_fraction"), c.thresholds.tail_fraction);

  if (auto list = r.text("sweep.dp")) {
    out.sweep.dps = parse_number_list(*list, "sweep.dp");
  } else {
    const double first = r.number("sweep.first").value_or(0.2);
    const double step = r.number("sweep.step").value_or(0.007);
    const double count = r.number("sweep.count").value_or(100.0);
    if (count != std::floor(count) || count < 0.0) throw ConfigError("sweep.count: must be a non-negative integer");
    if (count >= 1.0) out.sweep.dps = sweep_grid(first, step, static_cast<int>(count));
  }
  if (auto s = r.text("sweep.strategies")) out.sweep.strategies = split_list(*s);
  if (out.sweep.strategies.empty()) out.sweep.strategies = {out.strategy};

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

}  // namespace gridforge::cli
