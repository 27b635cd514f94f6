#pragma once
// Suite orchestration: runs cells (threshold pairs) x replications, in
// parallel across a worker pool, and writes per-run JSON + series CSV, a
// per-cell KPI table and a manifest. Replication i always draws its traffic
// from mix_seed(seed, i) regardless of the cell, so every cell and both
// modes see identical arrival streams. Aggregation order is fixed by
// (cell, replication), never by completion order.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "flowmux/config.hpp"
#include "flowmux/engine.hpp"
#include "flowmux/metrics.hpp"
#include "flowmux/report.hpp"
#include "flowmux/topology.hpp"
#include "flowmux/traffic.hpp"

namespace flowmux {

namespace fs = std::filesystem;

struct SuiteResult {
  std::vector<KpiReport> cells;
  std::vector<std::vector<RunResult>> runs;  // [cell][replication]
  fs::path out_dir;
};

inline std::string cell_dir_name(SimMode mode, double cong, double warn) {
  if (mode == SimMode::LEGACY) return "cell_legacy";
  char buf[64];
  std::snprintf(buf, sizeof buf, "cell_%.4g_%.4g", cong, warn);
  return buf;
}

inline SuiteResult run_suite(const ScenarioConfig& cfg) {
  cfg.validate();
  Topology topo = Topology::load_file(cfg.topology_path);
  if (topo.pe_nodes().size() < 2)
    throw std::invalid_argument("suite: topology needs at least 2 PE nodes");

  // legacy ignores the threshold sweep: one cell
  std::vector<std::pair<double, double>> cells =
      cfg.mode == SimMode::LEGACY
          ? std::vector<std::pair<double, double>>{cfg.thresholds.front()}
          : cfg.thresholds;

  struct Task {
    std::size_t cell;
    int rep;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (int r = 0; r < cfg.replications; ++r) tasks.push_back({c, r});

  SuiteResult suite;
  suite.runs.assign(cells.size(), std::vector<RunResult>(cfg.replications));

  unsigned jobs = cfg.jobs > 0 ? unsigned(cfg.jobs)
                               : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) return;
      const Task& t = tasks[i];
      try {
        auto [cong, warn] = cells[t.cell];
        TrafficConfig tc = cfg.traffic;
        tc.seed = mix_seed(cfg.seed, std::uint64_t(t.rep));
        std::vector<FlowArrival> arrivals = generate_arrivals(tc, topo.pe_nodes());
        EngineOptions opt = cfg.engine_options(cong, warn);
        RunResult r = run_scenario(topo, opt, arrivals, tc.seed, std::uint32_t(t.rep));
        finalize_run_kpis(r);
        suite.runs[t.cell][t.rep] = std::move(r);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(failure_mu);
        failed = true;
        std::ostringstream os;
        os << "run failed (cell " << t.cell << ", replication " << t.rep << "): " << e.what();
        failure = os.str();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed) throw std::runtime_error(failure);

  // deterministic output, ordered by (cell, replication)
  suite.out_dir = cfg.output_dir;
  fs::create_directories(suite.out_dir);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    fs::path dir = suite.out_dir / cell_dir_name(cfg.mode, cells[c].first, cells[c].second);
    fs::create_directories(dir);
    for (int r = 0; r < cfg.replications; ++r) {
      const RunResult& run = suite.runs[c][r];
      char name[64];
      std::snprintf(name, sizeof name, "run_%03d.json", r);
      std::ofstream(dir / name) << to_json(run).dump(1) << "\n";
      std::snprintf(name, sizeof name, "series_%03d.csv", r);
      std::ofstream series(dir / name);
      write_series_csv(series, run);
    }
    suite.cells.push_back(aggregate_runs(suite.runs[c]));
  }

  std::ofstream kpi_csv(suite.out_dir / "kpi.csv");
  write_kpi_csv_header(kpi_csv);
  json kpi_json = json::array();
  for (const KpiReport& k : suite.cells) {
    write_kpi_csv_row(kpi_csv, k);
    kpi_json.push_back(to_json(k));
  }
  std::ofstream(suite.out_dir / "kpi.json") << kpi_json.dump(1) << "\n";

  json manifest;
  manifest["config"] = serialize_config(cfg);
  manifest["mode"] = to_string(cfg.mode);
  manifest["replications"] = cfg.replications;
  json seeds = json::array();
  for (int r = 0; r < cfg.replications; ++r) seeds.push_back(mix_seed(cfg.seed, r));
  manifest["seeds"] = std::move(seeds);
  json cell_list = json::array();
  for (std::size_t c = 0; c < cells.size(); ++c)
    cell_list.push_back({{"cong_th", cells[c].first},
                         {"warn_th", cells[c].second},
                         {"dir", cell_dir_name(cfg.mode, cells[c].first, cells[c].second)}});
  manifest["cells"] = std::move(cell_list);
  std::ofstream(suite.out_dir / "manifest.json") << manifest.dump(1) << "\n";
  return suite;
}

// --- suite comparison -------------------------------------------------------

struct ComparisonReport {
  MeanCi rx_gain_pct;           // per-seed pairing
  MeanCi cfri_pct;              // per-seed pairing
  double cfri_of_means_pct = 0; // ratio of the two reported averages
  double tput_ratio = 0.0;
  double message_reduction_pct = 0.0;
  double mech_ctrl_msgs_worst = 0.0;
  double legacy_openflow_per_s = 0.0;
  KpiReport mechanism_cell;
  KpiReport legacy_cell;
};

inline std::vector<RunResult> load_cell_runs(const fs::path& dir) {
  std::vector<RunResult> runs;
  for (int r = 0;; ++r) {
    char name[64];
    std::snprintf(name, sizeof name, "run_%03d.json", r);
    fs::path p = dir / name;
    if (!fs::exists(p)) break;
    std::ifstream in(p);
    json j;
    in >> j;
    runs.push_back(run_result_from_json(j));
  }
  if (runs.empty()) throw std::runtime_error("no runs found in " + dir.string());
  return runs;
}

inline json load_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("no manifest in " + dir.string());
  json j;
  in >> j;
  return j;
}

/// Compares a mechanism suite against a legacy suite over the same seeds.
/// mech_cell selects the mechanism threshold cell (default: first listed).
inline ComparisonReport compare_suites(const fs::path& mech_dir, const fs::path& legacy_dir,
                                       int mech_cell = 0) {
  json mech_manifest = load_manifest(mech_dir);
  json legacy_manifest = load_manifest(legacy_dir);
  if (mech_manifest.at("mode") != "mechanism")
    throw std::runtime_error("first directory is not a mechanism suite");
  if (legacy_manifest.at("mode") != "legacy")
    throw std::runtime_error("second directory is not a legacy suite");
  if (mech_manifest.at("seeds") != legacy_manifest.at("seeds"))
    throw std::runtime_error("seed sets differ; refusing an unfair comparison");

  const json& cells = mech_manifest.at("cells");
  if (mech_cell < 0 || mech_cell >= int(cells.size()))
    throw std::runtime_error("mechanism cell index out of range");
  auto mech_runs = load_cell_runs(mech_dir / std::string(cells[mech_cell].at("dir")));
  auto legacy_runs =
      load_cell_runs(legacy_dir / std::string(legacy_manifest.at("cells")[0].at("dir")));
  if (mech_runs.size() != legacy_runs.size())
    throw std::runtime_error("replication counts differ between suites");

  ComparisonReport rep;
  std::vector<double> gains, cfris;
  for (std::size_t i = 0; i < mech_runs.size(); ++i) {
    if (mech_runs[i].seed != legacy_runs[i].seed)
      throw std::runtime_error("seed sets differ; refusing an unfair comparison");
    gains.push_back(rx_gain_pct(mech_runs[i].rx_bytes, legacy_runs[i].rx_bytes));
    cfris.push_back(comparative_flow_reduction_pct(mech_runs[i].avg_labels_mean,
                                                   legacy_runs[i].avg_labels_mean));
  }
  rep.rx_gain_pct = gains.size() > 1 ? confidence_interval(gains) : MeanCi{gains.front(), 0};
  rep.cfri_pct = cfris.size() > 1 ? confidence_interval(cfris) : MeanCi{cfris.front(), 0};
  rep.mechanism_cell = aggregate_runs(mech_runs);
  rep.legacy_cell = aggregate_runs(legacy_runs);
  rep.cfri_of_means_pct = comparative_flow_reduction_pct(
      rep.mechanism_cell.avg_labels.mean, rep.legacy_cell.avg_labels.mean);
  rep.tput_ratio =
      rep.mechanism_cell.avg_tput_mbps.mean / rep.legacy_cell.avg_tput_mbps.mean;
  rep.mech_ctrl_msgs_worst = rep.mechanism_cell.ctrl_msgs_per_s_worst;
  rep.legacy_openflow_per_s = rep.legacy_cell.openflow_msgs_per_s.mean;
  rep.message_reduction_pct =
      (1.0 - rep.mech_ctrl_msgs_worst / rep.legacy_openflow_per_s) * 100.0;
  return rep;
}

inline json to_json(const ComparisonReport& r) {
  json j;
  j["rx_gain_pct"] = to_json(r.rx_gain_pct);
  j["cfri_pct"] = to_json(r.cfri_pct);
  j["cfri_of_means_pct"] = r.cfri_of_means_pct;
  j["tput_ratio"] = r.tput_ratio;
  j["message_reduction_pct"] = r.message_reduction_pct;
  j["mech_ctrl_msgs_worst"] = r.mech_ctrl_msgs_worst;
  j["legacy_openflow_per_s"] = r.legacy_openflow_per_s;
  j["mechanism"] = to_json(r.mechanism_cell);
  j["legacy"] = to_json(r.legacy_cell);
  return j;
}

}  // namespace flowmux
