#pragma once
// Scenario configuration: key = value lines with [section] headers, '#' or
// ';' comments. Defaults reproduce the headline experiment, so a config that
// only names a topology runs the full threshold sweep. Serialization is
// canonical and round-trips through the parser.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowmux/controller.hpp"
#include "flowmux/engine.hpp"
#include "flowmux/traffic.hpp"

namespace flowmux {

struct ScenarioConfig {
  std::string topology_path = "data/us_backbone39.topo";
  SimMode mode = SimMode::MECHANISM;
  std::string output_dir = "out";
  int replications = 20;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = hardware concurrency
  double gc_timeout_s = 1.0;
  double dft_timeout_s = 1.0;
  double access_capacity_bps = 1e9;
  AllocationPolicy allocation_policy = AllocationPolicy::ALWAYS;
  double measurement_interval_s = 1.0;
  // (cong, warn) pairs; default sweep: cong in {.8,.85,.9} x warn in {.4..7}
  std::vector<std::pair<double, double>> thresholds = {
      {0.80, 0.4}, {0.80, 0.5}, {0.80, 0.6}, {0.80, 0.7},
      {0.85, 0.4}, {0.85, 0.5}, {0.85, 0.6}, {0.85, 0.7},
      {0.90, 0.4}, {0.90, 0.5}, {0.90, 0.6}, {0.90, 0.7}};
  MetricValues metrics;
  TrafficConfig traffic;

  void validate() const {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (jobs < 0) throw std::invalid_argument("jobs must be >= 0");
    if (thresholds.empty()) throw std::invalid_argument("at least one threshold pair required");
    for (auto [cong, warn] : thresholds) {
      ThresholdConfig t{warn, cong, measurement_interval_s};
      t.validate();
    }
    metrics.validate();
    traffic.validate();
    if (!(gc_timeout_s > 0.0) || !(dft_timeout_s > 0.0) || !(access_capacity_bps > 0.0))
      throw std::invalid_argument("timeouts and access capacity must be positive");
  }

  EngineOptions engine_options(double cong, double warn) const {
    EngineOptions opt;
    opt.mode = mode;
    opt.thresholds = {warn, cong, measurement_interval_s};
    opt.metrics = metrics;
    opt.policy = allocation_policy;
    opt.gc_timeout_s = gc_timeout_s;
    opt.dft_timeout_s = dft_timeout_s;
    opt.access_capacity_bps = access_capacity_bps;
    opt.sim_time_s = traffic.sim_time_s;
    opt.warmup_s = traffic.warmup_s;
    return opt;
  }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double cfg_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for '" + key + "': " + v);
  }
}

inline std::int64_t cfg_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  }
}

inline std::vector<std::pair<double, double>> cfg_pairs(const std::string& v) {
  std::vector<std::pair<double, double>> out;
  std::string tok;
  std::istringstream in(v);
  while (in >> tok) {
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    if (tok.empty()) continue;
    auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config: threshold pair must be cong:warn, got " + tok);
    out.emplace_back(cfg_double(tok.substr(0, colon), "thresholds"),
                     cfg_double(tok.substr(colon + 1), "thresholds"));
  }
  if (out.empty()) throw ConfigError("config: empty threshold pair list");
  return out;
}

}  // namespace detail

inline ScenarioConfig parse_config(std::istream& in, const std::string& name = "<config>") {
  ScenarioConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto p = line.find_first_of("#;"); p != std::string::npos) line.resize(p);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::string where = name + ":" + std::to_string(lineno);

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    std::string qual = section.empty() ? key : section + "." + key;

    if (qual == "topology") cfg.topology_path = value;
    else if (qual == "mode") {
      if (value == "mechanism") cfg.mode = SimMode::MECHANISM;
      else if (value == "legacy") cfg.mode = SimMode::LEGACY;
      else throw ConfigError(where + ": mode must be mechanism or legacy");
    } else if (qual == "output_dir") cfg.output_dir = value;
    else if (qual == "replications") cfg.replications = int(detail::cfg_int(value, qual));
    else if (qual == "seed") cfg.seed = std::uint64_t(detail::cfg_int(value, qual));
    else if (qual == "jobs") cfg.jobs = int(detail::cfg_int(value, qual));
    else if (qual == "gc_timeout_s") cfg.gc_timeout_s = detail::cfg_double(value, qual);
    else if (qual == "dft_timeout_s") cfg.dft_timeout_s = detail::cfg_double(value, qual);
    else if (qual == "access_capacity_bps")
      cfg.access_capacity_bps = detail::cfg_double(value, qual);
    else if (qual == "measurement_interval_s")
      cfg.measurement_interval_s = detail::cfg_double(value, qual);
    else if (qual == "allocation_policy") {
      if (value == "always") cfg.allocation_policy = AllocationPolicy::ALWAYS;
      else if (value == "on_tree_change") cfg.allocation_policy = AllocationPolicy::ON_TREE_CHANGE;
      else throw ConfigError(where + ": allocation_policy must be always or on_tree_change");
    } else if (qual == "thresholds.pairs") cfg.thresholds = detail::cfg_pairs(value);
    else if (qual == "metrics.norm") cfg.metrics.norm = std::uint32_t(detail::cfg_int(value, qual));
    else if (qual == "metrics.warn") cfg.metrics.warn = std::uint32_t(detail::cfg_int(value, qual));
    else if (qual == "metrics.cong") cfg.metrics.cong = std::uint32_t(detail::cfg_int(value, qual));
    else if (qual == "traffic.pareto_shape") cfg.traffic.pareto_shape = detail::cfg_double(value, qual);
    else if (qual == "traffic.mean_size_bytes")
      cfg.traffic.mean_size_bytes = detail::cfg_double(value, qual);
    else if (qual == "traffic.mean_interarrival_s")
      cfg.traffic.mean_interarrival_s = detail::cfg_double(value, qual);
    else if (qual == "traffic.sim_time_s") cfg.traffic.sim_time_s = detail::cfg_double(value, qual);
    else if (qual == "traffic.warmup_s") cfg.traffic.warmup_s = detail::cfg_double(value, qual);
    else throw ConfigError(where + ": unknown key '" + qual + "'");
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, path);
}

inline std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "topology = " << cfg.topology_path << "\n";
  os << "mode = " << to_string(cfg.mode) << "\n";
  os << "output_dir = " << cfg.output_dir << "\n";
  os << "replications = " << cfg.replications << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "jobs = " << cfg.jobs << "\n";
  os << "gc_timeout_s = " << num(cfg.gc_timeout_s) << "\n";
  os << "dft_timeout_s = " << num(cfg.dft_timeout_s) << "\n";
  os << "access_capacity_bps = " << num(cfg.access_capacity_bps) << "\n";
  os << "measurement_interval_s = " << num(cfg.measurement_interval_s) << "\n";
  os << "allocation_policy = "
     << (cfg.allocation_policy == AllocationPolicy::ALWAYS ? "always" : "on_tree_change")
     << "\n";
  os << "\n[thresholds]\npairs =";
  for (auto [cong, warn] : cfg.thresholds) os << " " << num(cong) << ":" << num(warn);
  os << "\n";
  os << "\n[metrics]\n";
  os << "norm = " << cfg.metrics.norm << "\n";
  os << "warn = " << cfg.metrics.warn << "\n";
  os << "cong = " << cfg.metrics.cong << "\n";
  os << "\n[traffic]\n";
  os << "pareto_shape = " << num(cfg.traffic.pareto_shape) << "\n";
  os << "mean_size_bytes = " << num(cfg.traffic.mean_size_bytes) << "\n";
  os << "mean_interarrival_s = " << num(cfg.traffic.mean_interarrival_s) << "\n";
  os << "sim_time_s = " << num(cfg.traffic.sim_time_s) << "\n";
  os << "warmup_s = " << num(cfg.traffic.warmup_s) << "\n";
  return os.str();
}

}  // namespace flowmux
