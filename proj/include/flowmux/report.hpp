#pragma once
// Result serialization. Run results round-trip through JSON (sorted keys,
// shortest-round-trip doubles, no timestamps) so identical scenarios produce
// byte-identical files; per-second series also export as CSV.

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowmux/engine.hpp"
#include "flowmux/metrics.hpp"

namespace flowmux {

using nlohmann::json;

inline json to_json(const SecondSample& s) {
  json j;
  j["t"] = s.t;
  j["sum_dft_pe"] = s.sum_dft_pe;
  j["avg_labels_p"] = s.avg_labels_p;
  j["max_labels_p"] = s.max_labels_p;
  j["active_flows"] = s.active_flows;
  j["packet_in"] = s.packet_in;
  j["controller_msgs"] = s.controller_msgs;
  j["rx_bytes"] = s.rx_bytes;
  j["tx_bytes"] = s.tx_bytes;
  j["labels_per_p"] = s.labels_per_p;
  json ef = json::array();
  for (auto& [label, flows] : s.epoch_flows) ef.push_back({label, flows});
  j["epoch_flows"] = std::move(ef);
  return j;
}

inline SecondSample sample_from_json(const json& j) {
  SecondSample s;
  s.t = j.at("t");
  s.sum_dft_pe = j.at("sum_dft_pe");
  s.avg_labels_p = j.at("avg_labels_p");
  s.max_labels_p = j.at("max_labels_p");
  s.active_flows = j.at("active_flows");
  s.packet_in = j.at("packet_in");
  s.controller_msgs = j.at("controller_msgs");
  s.rx_bytes = j.at("rx_bytes");
  s.tx_bytes = j.at("tx_bytes");
  s.labels_per_p = j.at("labels_per_p").get<std::vector<std::int32_t>>();
  for (auto& e : j.at("epoch_flows"))
    s.epoch_flows.emplace_back(Label(e.at(0)), std::int32_t(e.at(1)));
  return s;
}

inline json to_json(const RunResult& r) {
  json j;
  j["mode"] = r.mode;
  j["cong_th"] = r.cong_th;
  j["warn_th"] = r.warn_th;
  j["seed"] = r.seed;
  j["replication"] = r.replication;
  j["tx_bytes"] = r.tx_bytes;
  j["rx_bytes"] = r.rx_bytes;
  j["tx_bytes_full"] = r.tx_bytes_full;
  j["rx_bytes_full"] = r.rx_bytes_full;
  j["avg_tput_mbps"] = r.avg_tput_mbps;
  j["max_fri_pct"] = r.max_fri_pct;
  j["sum_dft_mean"] = r.sum_dft_mean;
  j["avg_labels_mean"] = r.avg_labels_mean;
  j["max_labels_peak"] = r.max_labels_peak;
  j["arrivals"] = r.arrivals;
  j["admitted"] = r.admitted;
  j["completions"] = r.completions;
  j["rejected"] = r.rejected;
  j["packet_in"] = r.packet_in;
  j["stat_requests"] = r.stat_requests;
  j["stat_responses"] = r.stat_responses;
  j["bundle_updates"] = r.bundle_updates;
  j["ctrl_msgs_per_s_avg"] = r.ctrl_msgs_per_s_avg;
  j["ctrl_msgs_per_s_max"] = r.ctrl_msgs_per_s_max;
  j["packet_in_per_s_avg"] = r.packet_in_per_s_avg;
  j["openflow_msgs_per_s_avg"] = r.openflow_msgs_per_s_avg;
  j["epochs_allocated"] = r.epochs_allocated;
  j["epochs_retired"] = r.epochs_retired;
  j["reallocation_batches"] = r.reallocation_batches;
  j["max_live_labels"] = r.max_live_labels;
  j["violations"] = {{"path_changes", r.path_change_violations},
                     {"capacity", r.capacity_violations},
                     {"pentry_bound", r.pentry_bound_violations},
                     {"conservation", r.conservation_violations},
                     {"forwarding_faults", r.forwarding_faults}};
  json series = json::array();
  for (const SecondSample& s : r.series) series.push_back(to_json(s));
  j["series"] = std::move(series);
  json events = json::array();
  for (const LabelEvent& e : r.label_events)
    events.push_back({{"t", e.t},
                      {"label", e.label},
                      {"dest", e.dest},
                      {"epoch", e.epoch},
                      {"kind", std::string(1, e.kind)}});
  j["label_events"] = std::move(events);
  return j;
}

inline RunResult run_result_from_json(const json& j) {
  RunResult r;
  r.mode = j.at("mode");
  r.cong_th = j.at("cong_th");
  r.warn_th = j.at("warn_th");
  r.seed = j.at("seed");
  r.replication = j.at("replication");
  r.tx_bytes = j.at("tx_bytes");
  r.rx_bytes = j.at("rx_bytes");
  r.tx_bytes_full = j.at("tx_bytes_full");
  r.rx_bytes_full = j.at("rx_bytes_full");
  r.avg_tput_mbps = j.at("avg_tput_mbps");
  r.max_fri_pct = j.at("max_fri_pct");
  r.sum_dft_mean = j.at("sum_dft_mean");
  r.avg_labels_mean = j.at("avg_labels_mean");
  r.max_labels_peak = j.at("max_labels_peak");
  r.arrivals = j.at("arrivals");
  r.admitted = j.at("admitted");
  r.completions = j.at("completions");
  r.rejected = j.at("rejected");
  r.packet_in = j.at("packet_in");
  r.stat_requests = j.at("stat_requests");
  r.stat_responses = j.at("stat_responses");
  r.bundle_updates = j.at("bundle_updates");
  r.ctrl_msgs_per_s_avg = j.at("ctrl_msgs_per_s_avg");
  r.ctrl_msgs_per_s_max = j.at("ctrl_msgs_per_s_max");
  r.packet_in_per_s_avg = j.at("packet_in_per_s_avg");
  r.openflow_msgs_per_s_avg = j.at("openflow_msgs_per_s_avg");
  r.epochs_allocated = j.at("epochs_allocated");
  r.epochs_retired = j.at("epochs_retired");
  r.reallocation_batches = j.at("reallocation_batches");
  r.max_live_labels = j.at("max_live_labels");
  const json& v = j.at("violations");
  r.path_change_violations = v.at("path_changes");
  r.capacity_violations = v.at("capacity");
  r.pentry_bound_violations = v.at("pentry_bound");
  r.conservation_violations = v.at("conservation");
  r.forwarding_faults = v.at("forwarding_faults");
  for (const json& s : j.at("series")) r.series.push_back(sample_from_json(s));
  for (const json& e : j.at("label_events"))
    r.label_events.push_back({e.at("t"), e.at("label"), e.at("dest"), e.at("epoch"),
                              std::string(e.at("kind"))[0]});
  return r;
}

inline void write_series_csv(std::ostream& os, const RunResult& r) {
  os << "t,sum_dft_pe,avg_labels_p,max_labels_p,active_flows,packet_in,"
        "controller_msgs,rx_bytes,tx_bytes\n";
  char buf[256];
  for (const SecondSample& s : r.series) {
    std::snprintf(buf, sizeof buf, "%d,%lld,%.17g,%lld,%lld,%lld,%lld,%.17g,%.17g\n", s.t,
                  (long long)s.sum_dft_pe, s.avg_labels_p, (long long)s.max_labels_p,
                  (long long)s.active_flows, (long long)s.packet_in,
                  (long long)s.controller_msgs, s.rx_bytes, s.tx_bytes);
    os << buf;
  }
}

inline json to_json(const MeanCi& m) { return {{"mean", m.mean}, {"ci95", m.half_width}}; }

inline json to_json(const KpiReport& k) {
  json j;
  j["cong_th"] = k.cong_th;
  j["warn_th"] = k.warn_th;
  j["mode"] = k.mode;
  j["runs"] = k.runs;
  j["tx_gb"] = to_json(k.tx_gb);
  j["rx_gb"] = to_json(k.rx_gb);
  j["avg_tput_mbps"] = to_json(k.avg_tput_mbps);
  j["sum_dft_entries_pe"] = to_json(k.sum_dft);
  j["avg_label_entries_p"] = to_json(k.avg_labels);
  j["max_label_entries_p"] = to_json(k.max_labels);
  j["max_fri_pct"] = to_json(k.max_fri_pct);
  j["openflow_msgs_per_s"] = to_json(k.openflow_msgs_per_s);
  j["packet_in_per_s"] = to_json(k.packet_in_per_s);
  j["ctrl_msgs_per_s_worst"] = k.ctrl_msgs_per_s_worst;
  return j;
}

inline void write_kpi_csv_header(std::ostream& os) {
  os << "cong_th,warn_th,mode,runs,tx_gb,tx_gb_ci,rx_gb,rx_gb_ci,avg_tput_mbps,"
        "avg_tput_ci,sum_dft_pe,sum_dft_ci,avg_labels_p,avg_labels_ci,"
        "max_labels_p,max_labels_ci,max_fri_pct,max_fri_ci,openflow_msgs_per_s,"
        "openflow_msgs_ci,ctrl_msgs_per_s_worst\n";
}

inline void write_kpi_csv_row(std::ostream& os, const KpiReport& k) {
  char buf[640];
  std::snprintf(buf, sizeof buf,
                "%.6g,%.6g,%s,%d,%.6g,%.3g,%.6g,%.3g,%.6g,%.3g,%.6g,%.3g,%.6g,%.3g,"
                "%.6g,%.3g,%.6g,%.3g,%.6g,%.3g,%.6g\n",
                k.cong_th, k.warn_th, k.mode.c_str(), k.runs, k.tx_gb.mean,
                k.tx_gb.half_width, k.rx_gb.mean, k.rx_gb.half_width, k.avg_tput_mbps.mean,
                k.avg_tput_mbps.half_width, k.sum_dft.mean, k.sum_dft.half_width,
                k.avg_labels.mean, k.avg_labels.half_width, k.max_labels.mean,
                k.max_labels.half_width, k.max_fri_pct.mean, k.max_fri_pct.half_width,
                k.openflow_msgs_per_s.mean, k.openflow_msgs_per_s.half_width,
                k.ctrl_msgs_per_s_worst);
  os << buf;
}

}  // namespace flowmux
