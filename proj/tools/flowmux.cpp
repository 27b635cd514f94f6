// Command-line front end: runs scenario suites, compares mechanism vs
// legacy result directories, validates topology files and dumps arrival
// streams. Exit codes: 0 success, 2 invalid configuration, 1 runtime fault.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flowmux/config.hpp"
#include "flowmux/harness.hpp"
#include "flowmux/report.hpp"
#include "flowmux/topology.hpp"
#include "flowmux/traffic.hpp"

using namespace flowmux;

namespace {

void print_kpi_table(const SuiteResult& suite) {
  std::printf("%-8s %-8s %10s %10s %12s %12s %10s %12s\n", "cong", "warn", "rx[GB]",
              "tput[Mbps]", "sumDFT(PE)", "avgLbl(P)", "maxFRI[%]", "msgs/s");
  for (const KpiReport& k : suite.cells) {
    std::printf("%-8.3g %-8.3g %7.2f±%.2f %7.1f±%.1f %9.1f±%.1f %9.2f±%.2f %7.2f±%.2f %9.2f±%.2f\n",
                k.cong_th, k.warn_th, k.rx_gb.mean, k.rx_gb.half_width, k.avg_tput_mbps.mean,
                k.avg_tput_mbps.half_width, k.sum_dft.mean, k.sum_dft.half_width,
                k.avg_labels.mean, k.avg_labels.half_width, k.max_fri_pct.mean,
                k.max_fri_pct.half_width, k.openflow_msgs_per_s.mean,
                k.openflow_msgs_per_s.half_width);
  }
}

int cmd_run(const std::string& config_path, const std::string& mode_override,
            long long seed_base, int jobs, const std::string& output_override) {
  ScenarioConfig cfg;
  try {
    cfg = load_config(config_path);
    if (mode_override == "mechanism") cfg.mode = SimMode::MECHANISM;
    else if (mode_override == "legacy") cfg.mode = SimMode::LEGACY;
    else if (!mode_override.empty()) throw ConfigError("--mode must be mechanism or legacy");
    if (seed_base >= 0) cfg.seed = std::uint64_t(seed_base);
    if (jobs >= 0) cfg.jobs = jobs;
    if (!output_override.empty()) cfg.output_dir = output_override;
    if (const char* env = std::getenv("FLOWMUX_OUTPUT_DIR"); env && *env)
      cfg.output_dir = env;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }
  try {
    SuiteResult suite = run_suite(cfg);
    print_kpi_table(suite);
    std::cout << "results written to " << suite.out_dir.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b, int cell) {
  try {
    ComparisonReport rep = compare_suites(dir_a, dir_b, cell);
    std::cout << to_json(rep).dump(1) << "\n";
    std::ofstream(fs::path(dir_a) / "comparison.json") << to_json(rep).dump(1) << "\n";
    std::printf("RxGain            %.2f%% ± %.2f\n", rep.rx_gain_pct.mean,
                rep.rx_gain_pct.half_width);
    std::printf("CFRI              %.2f%% ± %.2f (of means: %.2f%%)\n", rep.cfri_pct.mean,
                rep.cfri_pct.half_width, rep.cfri_of_means_pct);
    std::printf("Tput ratio        %.3f\n", rep.tput_ratio);
    std::printf("Message reduction %.2f%%  (%.0f worst-case vs %.1f legacy msgs/s)\n",
                rep.message_reduction_pct, rep.mech_ctrl_msgs_worst,
                rep.legacy_openflow_per_s);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_topo_validate(const std::string& path) {
  try {
    Topology topo = Topology::load_file(path);
    std::printf("%s: %zu nodes (%zu PE), %zu directed links\n", path.c_str(),
                topo.node_count(), topo.pe_nodes().size(), topo.link_count());
  } catch (const std::exception& e) {
    std::cerr << "invalid topology: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_traffic_dump(const std::string& config_path, int replication,
                     const std::string& out_path) {
  try {
    ScenarioConfig cfg = load_config(config_path);
    Topology topo = Topology::load_file(cfg.topology_path);
    TrafficConfig tc = cfg.traffic;
    tc.seed = mix_seed(cfg.seed, std::uint64_t(replication));
    auto arrivals = generate_arrivals(tc, topo.pe_nodes());
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    write_arrivals_csv(out, arrivals);
    std::printf("wrote %zu arrivals to %s\n", arrivals.size(), out_path.c_str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowmux: label-aggregated multipath SDN simulator"};
  app.require_subcommand(1);

  std::string config_path, mode_override, output_override;
  long long seed_base = -1;
  int jobs = -1;
  auto* run = app.add_subcommand("run", "run a scenario suite");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--mode", mode_override, "override mode: mechanism | legacy");
  run->add_option("--seed-base", seed_base, "override base seed");
  run->add_option("--jobs", jobs, "parallel replications (default: cpu count)");
  run->add_option("--output", output_override, "override output directory");

  std::string dir_a, dir_b;
  int cell = 0;
  auto* compare = app.add_subcommand("compare", "compare mechanism vs legacy suites");
  compare->add_option("mechanism_dir", dir_a)->required();
  compare->add_option("legacy_dir", dir_b)->required();
  compare->add_option("--cell", cell, "mechanism threshold cell index (default 0)");

  std::string topo_path;
  auto* topo = app.add_subcommand("topo", "topology utilities");
  auto* validate = topo->add_subcommand("validate", "parse and validate a topology file");
  validate->add_option("path", topo_path)->required();

  std::string traffic_config, traffic_out = "arrivals.csv";
  int traffic_rep = 0;
  auto* traffic = app.add_subcommand("traffic", "traffic stream utilities");
  auto* dump = traffic->add_subcommand("dump", "export one replication's arrival stream as CSV");
  dump->add_option("--config", traffic_config, "scenario config file")->required();
  dump->add_option("--replication", traffic_rep, "replication index (default 0)");
  dump->add_option("--out", traffic_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(config_path, mode_override, seed_base, jobs, output_override);
  if (*compare) return cmd_compare(dir_a, dir_b, cell);
  if (*topo) {
    if (*validate) return cmd_topo_validate(topo_path);
    std::cerr << "usage: flowmux topo validate <path>\n";
    return 2;
  }
  if (*traffic) {
    if (*dump) return cmd_traffic_dump(traffic_config, traffic_rep, traffic_out);
    std::cerr << "usage: flowmux traffic dump --config <path>\n";
    return 2;
  }
  return 2;
}
