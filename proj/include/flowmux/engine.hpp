#pragma once
// Deterministic discrete-event loop over a fluid TCP surrogate. Active flows
// receive the max-min fair allocation of link capacity, recomputed at every
// arrival, completion and reallocation; between events each flow drains at
// its current rate. Flows sharing a (label, ingress) pair follow identical
// paths, so they are grouped into path classes: the solver runs over classes
// and per-flow completions are tracked with a per-class cumulative service
// counter plus a min-heap of completion thresholds.
//
// Event ordering at equal times is pinned: MeasurementTick < FlowArrival <
// FlowCompletion < GcTick < SampleKpis, then insertion order.
//
// Two modes share the loop. MECHANISM runs the full controller (thresholds,
// label epochs, CFT/DFT/label tables); LEGACY pins every flow to the static
// forward shortest path, installs one reactive entry per switch on the path
// and accounts one Packet_IN per switch, with total OpenFlow messages twice
// the Packet_IN count.
//
// Access links (client network <-> PE, 1 Gbps by default) are real
// capacity-constrained links in the fair-share computation, but are not part
// of the measured backbone.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowmux/controller.hpp"
#include "flowmux/dataplane.hpp"
#include "flowmux/fair_share.hpp"
#include "flowmux/spt.hpp"
#include "flowmux/topology.hpp"
#include "flowmux/traffic.hpp"

namespace flowmux {

enum class SimMode { MECHANISM, LEGACY };

inline const char* to_string(SimMode m) {
  return m == SimMode::MECHANISM ? "mechanism" : "legacy";
}

struct EngineOptions {
  SimMode mode = SimMode::MECHANISM;
  ThresholdConfig thresholds;
  MetricValues metrics;
  AllocationPolicy policy = AllocationPolicy::ALWAYS;
  double gc_timeout_s = 1.0;
  double dft_timeout_s = 1.0;
  double access_capacity_bps = 1e9;
  double sim_time_s = 100.0;
  double warmup_s = 10.0;
};

/// Per-second KPI snapshot, recorded after the warmup.
struct SecondSample {
  int t = 0;
  std::int64_t sum_dft_pe = 0;       // per-flow entries summed over PE nodes
  double avg_labels_p = 0.0;         // mean entries per P node
  std::int64_t max_labels_p = 0;
  std::int64_t active_flows = 0;     // flows counted once, at their ingress PE
  std::int64_t packet_in = 0;        // this second
  std::int64_t controller_msgs = 0;  // this second
  double rx_bytes = 0.0;             // this second
  double tx_bytes = 0.0;
  std::vector<std::int32_t> labels_per_p;              // per P node
  std::vector<std::pair<Label, std::int32_t>> epoch_flows;  // live epochs only
};

struct LabelEvent {
  double t = 0.0;
  Label label = kNoLabel;
  NodeId dest = kNoNode;
  std::uint32_t epoch = 0;
  char kind = 'A';  // A ctivated, D raining, R etired
};

struct RunResult {
  std::string mode;
  double cong_th = 0.0, warn_th = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t replication = 0;

  // byte totals; plain tx/rx cover the post-warmup window
  double tx_bytes = 0.0, rx_bytes = 0.0;
  double tx_bytes_full = 0.0, rx_bytes_full = 0.0;
  double avg_tput_mbps = 0.0;

  // per-run KPI scalars over the sample series
  double max_fri_pct = 0.0;
  double sum_dft_mean = 0.0;
  double avg_labels_mean = 0.0;
  double max_labels_peak = 0.0;

  std::int64_t arrivals = 0, admitted = 0, completions = 0, rejected = 0;

  std::uint64_t packet_in = 0, stat_requests = 0, stat_responses = 0, bundle_updates = 0;
  double ctrl_msgs_per_s_avg = 0.0;  // post-warmup mean
  double ctrl_msgs_per_s_max = 0.0;  // whole-run worst second
  double packet_in_per_s_avg = 0.0;
  double openflow_msgs_per_s_avg = 0.0;

  std::int64_t epochs_allocated = 0, epochs_retired = 0, reallocation_batches = 0;
  std::int64_t max_live_labels = 0;

  // invariant violation counters; all must stay 0
  std::int64_t path_change_violations = 0;
  std::int64_t capacity_violations = 0;
  std::int64_t pentry_bound_violations = 0;
  std::int64_t conservation_violations = 0;
  std::int64_t forwarding_faults = 0;

  std::vector<SecondSample> series;
  std::vector<LabelEvent> label_events;
};

class Engine {
 public:
  Engine(const Topology& topo, const EngineOptions& opt)
      : topo_(topo),
        opt_(opt),
        lsdb_(topo, opt.metrics),
        ctrl_(topo, opt.thresholds, opt.policy, opt.gc_timeout_s) {
    if (topo_.pe_nodes().size() < 2)
      throw std::invalid_argument("scenario needs at least 2 PE nodes");
    if (!(opt_.sim_time_s > 0.0) || !(opt_.warmup_s >= 0.0) ||
        !(opt_.warmup_s < opt_.sim_time_s))
      throw std::invalid_argument("need 0 <= warmup < sim_time");
    if (!(opt_.gc_timeout_s > 0.0) || !(opt_.dft_timeout_s > 0.0))
      throw std::invalid_argument("timeouts must be positive and finite");
    backbone_links_ = topo_.link_count();

    switches_.reserve(topo_.node_count());
    for (NodeId n = 0; n < NodeId(topo_.node_count()); ++n)
      switches_.emplace_back(n, topo_.role(n));

    link_cap_.assign(backbone_links_, 0.0);
    for (LinkId l = 0; l < LinkId(backbone_links_); ++l)
      link_cap_[l] = topo_.link(l).capacity_bps;
    pe_index_.assign(topo_.node_count(), kNoNode);
    for (std::size_t i = 0; i < topo_.pe_nodes().size(); ++i) {
      pe_index_[topo_.pe_nodes()[i]] = NodeId(i);
      link_cap_.push_back(opt_.access_capacity_bps);  // SCN -> PE
      link_cap_.push_back(opt_.access_capacity_bps);  // PE -> DCN
    }
    link_bytes_.assign(link_cap_.size(), 0.0);
    link_activity_.assign(backbone_links_, {});
  }

  RunResult run(const std::vector<FlowArrival>& arrivals) {
    arrivals_ = &arrivals;
    if (opt_.mode == SimMode::MECHANISM) {
      auto cmds = ctrl_.bootstrap(lsdb_, 0.0);
      apply_commands(cmds, 0.0);
      for (NodeId d : topo_.pe_nodes())
        record_label_event(0.0, ctrl_.active_label(d), 'A');
      update_max_live();
      // the initial allocation is its own second-zero message bucket
      last_gc_msgs_ = ctrl_.ledger().total();
    } else {
      for (NodeId s : topo_.pe_nodes())
        legacy_trees_[s] = shortest_path_tree(topo_, lsdb_, s, EdgeOrientation::Forward);
    }

    if (opt_.mode == SimMode::MECHANISM)
      push_event(opt_.thresholds.measurement_interval_s, kPrioMeasurement, 0, 0);
    push_event(1.0, kPrioGc, 0, 0);
    push_event(opt_.warmup_s, kPrioBaseline, 0, 0);
    double first_sample = std::floor(opt_.warmup_s) + 1.0;
    if (first_sample <= opt_.sim_time_s + 1e-9) push_event(first_sample, kPrioSample, 0, 0);
    if (!arrivals.empty()) push_event(arrivals[0].time, kPrioArrival, 0, 0);

    while (!queue_.empty()) {
      Ev ev = queue_.top();
      queue_.pop();
      if (ev.t > opt_.sim_time_s + 1e-9) break;
      switch (ev.prio) {
        case kPrioMeasurement: on_measurement(ev.t); break;
        case kPrioArrival: on_arrival(ev.t, ev.a); break;
        case kPrioCompletion: on_completion(ev); break;
        case kPrioGc: on_gc(ev.t); break;
        case kPrioBaseline: on_baseline(ev.t); break;
        case kPrioSample: on_sample(int(std::lround(ev.t))); break;
      }
    }
    finalize();
    return std::move(result_);
  }

 private:
  // spec-visible kinds keep their relative order; the baseline marker is an
  // internal event that snapshots counters at exactly t = warmup, after any
  // same-instant tick work and before sampling could observe it
  static constexpr int kPrioMeasurement = 0;
  static constexpr int kPrioArrival = 1;
  static constexpr int kPrioCompletion = 2;
  static constexpr int kPrioGc = 3;
  static constexpr int kPrioBaseline = 4;
  static constexpr int kPrioSample = 5;

  struct Ev {
    double t;
    int prio;
    std::uint64_t seq;
    std::uint32_t a;  // arrival index
    std::uint64_t b;  // rate version for completions
    bool operator>(const Ev& o) const {
      if (t != o.t) return t > o.t;
      if (prio != o.prio) return prio > o.prio;
      return seq > o.seq;
    }
  };

  struct PathClass {
    Label label = kNoLabel;  // legacy: destination PE id stands in
    NodeId src = kNoNode, dst = kNoNode;
    std::vector<LinkId> links;       // engine link ids, access included
    std::vector<NodeId> touch_nodes; // nodes whose entries flows hit en route
    std::int64_t n = 0;
    double rate = 0.0;     // per-flow bps
    double service = 0.0;  // per-flow cumulative bytes
    std::priority_queue<std::pair<double, std::uint32_t>,
                        std::vector<std::pair<double, std::uint32_t>>,
                        std::greater<>> done;
    std::uint32_t marked_interval = ~0u;
    bool alive = false;
  };

  struct Flow {
    FiveTuple tuple;
    NodeId src = kNoNode, dst = kNoNode;
    Label label = kNoLabel;
    std::uint32_t cls = 0;
    double size = 0.0;
  };

  // --- plumbing -------------------------------------------------------------

  void push_event(double t, int prio, std::uint32_t a, std::uint64_t b) {
    queue_.push(Ev{t, prio, seq_++, a, b});
  }

  LinkId acc_in(NodeId pe) const {  // SCN -> PE
    return LinkId(backbone_links_ + 2 * pe_index_[pe]);
  }
  LinkId acc_out(NodeId pe) const {  // PE -> DCN
    return LinkId(backbone_links_ + 2 * pe_index_[pe] + 1);
  }

  void record_label_event(double t, Label label, char kind) {
    const LabelEpoch& e = ctrl_.epoch(label);
    result_.label_events.push_back({t, label, e.dest_pe, e.epoch, kind});
  }

  void update_max_live() {
    result_.max_live_labels =
        std::max<std::int64_t>(result_.max_live_labels, ctrl_.live_label_count());
  }

  // --- fluid bookkeeping ------------------------------------------------------

  void elapse(double t) {
    double dt = t - now_;
    if (dt <= 0) {
      now_ = std::max(now_, t);
      return;
    }
    assert(!(now_ < opt_.warmup_s - 1e-9 && t > opt_.warmup_s + 1e-9));
    bool counted = now_ >= opt_.warmup_s - 1e-9;
    for (PathClass& c : classes_) {
      if (!c.alive || c.n == 0 || c.rate <= 0.0) continue;
      double per_flow = c.rate * dt / 8.0;
      double agg = per_flow * double(c.n);
      c.service += per_flow;
      for (LinkId l : c.links) link_bytes_[l] += agg;
      rx_full_ += agg;
      if (counted) rx_post_ += agg;
      if (opt_.mode == SimMode::MECHANISM && c.marked_interval != interval_idx_) {
        c.marked_interval = interval_idx_;
        for (LinkId l : c.links)
          if (l < backbone_links_) link_activity_[l].push_back(c.label);
      }
    }
    now_ = t;
  }

  void recompute_rates() {
    ++rate_version_;
    solver_slots_.clear();
    solver_paths_.clear();
    solver_counts_.clear();
    for (std::uint32_t i = 0; i < classes_.size(); ++i) {
      PathClass& c = classes_[i];
      if (!c.alive || c.n == 0) {
        c.rate = 0.0;
        continue;
      }
      solver_slots_.push_back(i);
      solver_paths_.push_back(&c.links);
      solver_counts_.push_back(c.n);
    }
    solver_.group_rates_indexed(link_cap_, solver_paths_, solver_counts_, solver_rates_);
    for (std::size_t k = 0; k < solver_slots_.size(); ++k)
      classes_[solver_slots_[k]].rate = solver_rates_[k];

    // capacity invariant: no link above its capacity
    agg_check_.assign(link_cap_.size(), 0.0);
    for (std::uint32_t i : solver_slots_) {
      const PathClass& c = classes_[i];
      double agg = c.rate * double(c.n);
      for (LinkId l : c.links) agg_check_[l] += agg;
    }
    for (std::size_t l = 0; l < link_cap_.size(); ++l)
      if (agg_check_[l] > link_cap_[l] * (1.0 + 1e-9) + 1e-6) ++result_.capacity_violations;
  }

  void schedule_next_completion() {
    double best = -1.0;
    for (const PathClass& c : classes_) {
      if (!c.alive || c.n == 0 || c.rate <= 0.0 || c.done.empty()) continue;
      double remaining = std::max(c.done.top().first - c.service, 0.0);
      double dt = remaining * 8.0 / c.rate;
      if (best < 0.0 || dt < best) best = dt;
    }
    if (best >= 0.0) push_event(now_ + best, kPrioCompletion, 0, rate_version_);
  }

  // --- classes and flows -----------------------------------------------------

  std::uint32_t class_slot(Label key_label, NodeId src) {
    auto it = class_index_.find({key_label, src});
    if (it != class_index_.end()) return it->second;
    std::uint32_t slot;
    if (!free_class_slots_.empty()) {
      slot = free_class_slots_.back();
      free_class_slots_.pop_back();
      classes_[slot] = PathClass{};
    } else {
      slot = std::uint32_t(classes_.size());
      classes_.emplace_back();
    }
    class_index_.emplace(std::make_pair(key_label, src), slot);
    classes_[slot].alive = true;
    classes_[slot].label = key_label;
    classes_[slot].src = src;
    return slot;
  }

  void drop_class(std::uint32_t slot) {
    PathClass& c = classes_[slot];
    class_index_.erase({c.label, c.src});
    c.alive = false;
    free_class_slots_.push_back(slot);
  }

  // Derives the forwarding path by actually walking the switch tables:
  // the CFT decision at the ingress, then label lookups until the egress.
  void build_mechanism_class(PathClass& c, NodeId src, NodeId dst, Label label,
                             LinkId first_link) {
    c.dst = dst;
    c.links.push_back(acc_in(src));
    LinkId out = first_link;
    std::size_t budget = topo_.node_count();
    NodeId cur = src;
    for (;;) {
      c.links.push_back(out);
      cur = topo_.link(out).to;
      if (cur == dst) break;
      if (budget-- == 0) throw std::logic_error("label forwarding loop");
      LinkId nxt = switches_[cur].p_forward(label, now_);
      if (nxt == kNoLink) {
        ++result_.forwarding_faults;
        throw std::logic_error("label table hole along installed path");
      }
      c.touch_nodes.push_back(cur);
      out = nxt;
    }
    c.links.push_back(acc_out(dst));
  }

  void build_legacy_class(PathClass& c, NodeId src, NodeId dst) {
    c.dst = dst;
    const SptTree& tree = legacy_trees_.at(src);
    std::vector<NodeId> nodes = walk_to_root(tree, dst);  // dst ... src
    std::reverse(nodes.begin(), nodes.end());
    c.touch_nodes = nodes;  // every switch on the path holds a flow entry
    c.links.push_back(acc_in(src));
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      LinkId l = topo_.find_link(nodes[i], nodes[i + 1]);
      if (l == kNoLink) throw std::logic_error("legacy path uses missing link");
      c.links.push_back(l);
    }
    c.links.push_back(acc_out(dst));
  }

  // --- event handlers -----------------------------------------------------------

  void on_arrival(double t, std::uint32_t idx) {
    elapse(t);
    const FlowArrival& a = (*arrivals_)[idx];
    ++result_.arrivals;
    if (idx + 1 < arrivals_->size())
      push_event((*arrivals_)[idx + 1].time, kPrioArrival, idx + 1, 0);

    std::uint32_t cls;
    Label label;
    if (opt_.mode == SimMode::MECHANISM) {
      AdmitResult res = switches_[a.src_pe].pe_admit(a.tuple, t, opt_.dft_timeout_s);
      if (res.kind == AdmitResult::PacketIn) {
        ++ctrl_.ledger().packet_in;
        ++result_.rejected;
        return;
      }
      if (res.kind == AdmitResult::NoMatch) {
        ++result_.rejected;
        return;
      }
      label = res.label;
      cls = class_slot(label, a.src_pe);
      PathClass& c = classes_[cls];
      if (c.links.empty()) build_mechanism_class(c, a.src_pe, a.dst_pe, label, res.out_link);
      for (NodeId n : c.touch_nodes) switches_[n].label_flow_attach(label, t);
      ctrl_.on_flow_admitted(label);
    } else {
      label = a.dst_pe;  // class key only
      cls = class_slot(label, a.src_pe);
      PathClass& c = classes_[cls];
      if (c.links.empty()) build_legacy_class(c, a.src_pe, a.dst_pe);
      ctrl_.ledger().packet_in += legacy_admit(switches_, c.touch_nodes, t);
    }

    std::uint32_t fid;
    if (!free_flow_slots_.empty()) {
      fid = free_flow_slots_.back();
      free_flow_slots_.pop_back();
    } else {
      fid = std::uint32_t(flows_.size());
      flows_.emplace_back();
    }
    flows_[fid] = Flow{a.tuple, a.src_pe, a.dst_pe, label, cls, a.size_bytes};

    PathClass& c = classes_[cls];
    c.done.emplace(c.service + a.size_bytes, fid);
    ++c.n;
    ++active_flows_;
    ++result_.admitted;

    recompute_rates();
    schedule_next_completion();
  }

  void complete_flow(std::uint32_t cls_slot) {
    PathClass& c = classes_[cls_slot];
    std::uint32_t fid = c.done.top().second;
    c.done.pop();
    Flow& f = flows_[fid];

    // path pinning: the flow must still belong to the class it was admitted to
    if (f.cls != cls_slot || f.label != c.label) ++result_.path_change_violations;

    if (opt_.mode == SimMode::MECHANISM) {
      switches_[f.src].dft_flow_done(f.tuple, now_);
      for (NodeId n : c.touch_nodes) switches_[n].label_flow_detach(f.label, now_);
      ctrl_.on_flow_completed(f.label);
    } else {
      for (NodeId n : c.touch_nodes)
        switches_[n].legacy_flow_done(now_, opt_.gc_timeout_s);
    }

    --c.n;
    --active_flows_;
    ++result_.completions;
    free_flow_slots_.push_back(fid);
    if (c.n == 0) drop_class(cls_slot);
  }

  void on_completion(const Ev& ev) {
    if (ev.b != rate_version_) return;  // stale: rates changed since scheduled
    elapse(ev.t);
    int completed = 0;
    for (std::uint32_t i = 0; i < classes_.size(); ++i) {
      PathClass& c = classes_[i];
      if (!c.alive || c.n == 0) continue;
      double eps = 1e-6 + c.service * 1e-9;
      while (!c.done.empty() && c.done.top().first - c.service <= eps) {
        complete_flow(i);
        ++completed;
        if (!classes_[i].alive) break;
      }
    }
    if (completed == 0) {
      // numerically early wakeup: finish the closest flow if it is within
      // a nanosecond of service, otherwise just reschedule
      double best = -1.0;
      std::uint32_t best_cls = 0;
      for (std::uint32_t i = 0; i < classes_.size(); ++i) {
        PathClass& c = classes_[i];
        if (!c.alive || c.n == 0 || c.rate <= 0.0 || c.done.empty()) continue;
        double dt = (c.done.top().first - c.service) * 8.0 / c.rate;
        if (best < 0.0 || dt < best) {
          best = dt;
          best_cls = i;
        }
      }
      if (best >= 0.0 && best <= 1e-9) {
        complete_flow(best_cls);
        ++completed;
      } else if (best >= 0.0) {
        push_event(now_ + best, kPrioCompletion, 0, rate_version_);
        return;
      }
    }
    if (completed > 0) {
      recompute_rates();
      schedule_next_completion();
    }
  }

  void on_measurement(double t) {
    elapse(t);
    const double interval = opt_.thresholds.measurement_interval_s;

    samples_buf_.resize(backbone_links_);
    for (LinkId l = 0; l < LinkId(backbone_links_); ++l) {
      double tput = link_bytes_[l] * 8.0 / interval;
      samples_buf_[l] = {l, tput, std::min(tput / link_cap_[l], 1.0)};
    }
    auto changes = ctrl_.measurement_tick(samples_buf_, lsdb_);
    if (!changes.empty()) {
      auto affected = ctrl_.affected_pes(changes, link_activity_);
      if (!affected.empty()) {
        std::vector<Label> draining;
        for (NodeId d : affected) draining.push_back(ctrl_.active_label(d));
        auto [fresh, cmds] = ctrl_.reallocate(affected, lsdb_, t);
        if (!fresh.empty()) {
          apply_commands(cmds, t);
          for (Label l : draining)
            if (l != kNoLabel && ctrl_.epoch(l).state == EpochState::DRAINING)
              record_label_event(t, l, 'D');
          for (Label l : fresh) record_label_event(t, l, 'A');
          ++result_.reallocation_batches;
          update_max_live();
          check_pentry_bound();
          recompute_rates();
          schedule_next_completion();
        }
      }
    }

    check_conservation();
    std::fill(link_bytes_.begin(), link_bytes_.end(), 0.0);
    for (auto& v : link_activity_) v.clear();
    ++interval_idx_;

    double next = t + interval;
    if (next <= opt_.sim_time_s + 1e-9) push_event(next, kPrioMeasurement, 0, 0);
  }

  void on_baseline(double t) {
    elapse(t);
    const MessageLedger& led = ctrl_.ledger();
    last_sample_packet_in_ = led.packet_in;
    last_sample_msgs_ = opt_.mode == SimMode::MECHANISM ? led.total() : 2 * led.packet_in;
    last_sample_rx_ = rx_post_;
  }

  void on_gc(double t) {
    elapse(t);
    for (SwitchState& sw : switches_) {
      GcReport rep = sw.gc_tick(t);
      if (opt_.mode == SimMode::MECHANISM)
        for (auto& [label, node] : rep.expired_labels) ctrl_.note_entry_expired(label);
    }
    if (opt_.mode == SimMode::MECHANISM) {
      for (Label l : ctrl_.recycle_eligible(t)) {
        record_label_event(t, l, 'R');
        ++result_.epochs_retired;
      }
    }
    if (opt_.mode == SimMode::LEGACY) {
      check_conservation();
      std::fill(link_bytes_.begin(), link_bytes_.end(), 0.0);
    }

    track_per_second_messages();
    double next = t + 1.0;
    if (next <= opt_.sim_time_s + 1e-9) push_event(next, kPrioGc, 0, 0);
  }

  void on_sample(int t) {
    elapse(double(t));
    SecondSample s;
    s.t = t;
    s.active_flows = active_flows_;
    for (NodeId n = 0; n < NodeId(topo_.node_count()); ++n) {
      const SwitchState& sw = switches_[n];
      std::int64_t entries = opt_.mode == SimMode::MECHANISM
                                 ? std::int64_t(sw.label_count())
                                 : sw.legacy_count();
      if (sw.role() == NodeRole::PE) {
        s.sum_dft_pe += opt_.mode == SimMode::MECHANISM ? std::int64_t(sw.dft_size())
                                                        : sw.legacy_count();
      } else {
        s.labels_per_p.push_back(std::int32_t(entries));
        s.max_labels_p = std::max(s.max_labels_p, entries);
      }
    }
    if (!s.labels_per_p.empty()) {
      double sum = 0;
      for (auto v : s.labels_per_p) sum += v;
      s.avg_labels_p = sum / double(s.labels_per_p.size());
    }
    const MessageLedger& led = ctrl_.ledger();
    std::uint64_t msgs = opt_.mode == SimMode::MECHANISM ? led.total() : 2 * led.packet_in;
    s.packet_in = std::int64_t(led.packet_in - last_sample_packet_in_);
    s.controller_msgs = std::int64_t(msgs - last_sample_msgs_);
    s.rx_bytes = rx_post_ - last_sample_rx_;
    s.tx_bytes = s.rx_bytes;  // fluid model transmits and delivers together
    last_sample_packet_in_ = led.packet_in;
    last_sample_msgs_ = msgs;
    last_sample_rx_ = rx_post_;

    if (opt_.mode == SimMode::MECHANISM) {
      for (const auto& [label, e] : ctrl_.epochs())
        if (e.state != EpochState::RETIRED)
          s.epoch_flows.emplace_back(label, std::int32_t(e.active_flows));
    }
    result_.series.push_back(std::move(s));

    double next = t + 1.0;
    if (next <= opt_.sim_time_s + 1e-9) push_event(next, kPrioSample, 0, 0);
  }

  // --- controller command application ----------------------------------------

  void apply_commands(const std::vector<TableCommand>& cmds, double t) {
    for (const TableCommand& c : cmds) {
      switch (c.kind) {
        case TableCommandKind::CftReplace:
          switches_[c.target].cft_replace(c.dest_network, c.label, c.out_link);
          break;
        case TableCommandKind::PInstall:
          switches_[c.target].install_label(c.label, c.out_link, t);
          ctrl_.note_entry_installed(c.label);
          break;
        case TableCommandKind::PDemote:
          if (!switches_[c.target].demote_label(c.label, c.idle_timeout, t))
            ++result_.forwarding_faults;
          break;
        case TableCommandKind::PRemove:
          if (switches_[c.target].remove_label(c.label)) ctrl_.note_entry_expired(c.label);
          break;
      }
    }
  }

  // --- invariants --------------------------------------------------------------

  void check_pentry_bound() {
    // with D destinations and k completed batches, a P node may hold at most
    // D * (k + 1) label entries
    std::int64_t bound =
        std::int64_t(topo_.pe_nodes().size()) * (result_.reallocation_batches + 1);
    for (const SwitchState& sw : switches_)
      if (sw.role() == NodeRole::P && std::int64_t(sw.label_count()) > bound)
        ++result_.pentry_bound_violations;
  }

  void check_conservation() {
    // all delivered bytes cross exactly one egress access link
    double acc = 0.0;
    for (NodeId pe : topo_.pe_nodes()) acc += link_bytes_[acc_out(pe)];
    double delta = rx_full_ - rx_full_at_reset_;
    double tol = 1e-6 * std::max(1.0, std::max(acc, delta));
    if (std::abs(acc - delta) > tol) ++result_.conservation_violations;
    rx_full_at_reset_ = rx_full_;
  }

  void take_baseline_if_due(double t) {
    if (baseline_taken_ || t < opt_.warmup_s - 1e-9) return;
    baseline_taken_ = true;
    const MessageLedger& led = ctrl_.ledger();
    last_sample_packet_in_ = led.packet_in;
    last_sample_msgs_ = opt_.mode == SimMode::MECHANISM ? led.total() : 2 * led.packet_in;
    last_sample_rx_ = rx_post_;
  }

  void track_per_second_messages() {
    const MessageLedger& led = ctrl_.ledger();
    std::uint64_t msgs = opt_.mode == SimMode::MECHANISM ? led.total() : 2 * led.packet_in;
    result_.ctrl_msgs_per_s_max =
        std::max(result_.ctrl_msgs_per_s_max, double(msgs - last_gc_msgs_));
    last_gc_msgs_ = msgs;
  }

  void finalize() {
    elapse(opt_.sim_time_s);
    result_.mode = to_string(opt_.mode);
    result_.cong_th = opt_.thresholds.cong_th;
    result_.warn_th = opt_.thresholds.warn_th;
    result_.rx_bytes = rx_post_;
    result_.tx_bytes = rx_post_;
    result_.rx_bytes_full = rx_full_;
    result_.tx_bytes_full = rx_full_;
    double window = opt_.sim_time_s - opt_.warmup_s;
    result_.avg_tput_mbps = rx_post_ * 8.0 / window / 1e6;

    const MessageLedger& led = ctrl_.ledger();
    result_.packet_in = led.packet_in;
    result_.stat_requests = led.stat_requests;
    result_.stat_responses = led.stat_responses;
    result_.bundle_updates = led.bundle_updates;

    if (!result_.series.empty()) {
      double msgs = 0, pktin = 0, dft = 0, avg_labels = 0;
      for (const SecondSample& s : result_.series) {
        msgs += double(s.controller_msgs);
        pktin += double(s.packet_in);
        dft += double(s.sum_dft_pe);
        avg_labels += s.avg_labels_p;
        result_.max_labels_peak =
            std::max(result_.max_labels_peak, double(s.max_labels_p));
      }
      double n = double(result_.series.size());
      result_.ctrl_msgs_per_s_avg = msgs / n;
      result_.packet_in_per_s_avg = pktin / n;
      result_.openflow_msgs_per_s_avg =
          opt_.mode == SimMode::MECHANISM ? msgs / n : 2.0 * pktin / n;
      result_.sum_dft_mean = dft / n;
      result_.avg_labels_mean = avg_labels / n;
    }
    result_.epochs_allocated = epochs_allocated_count();
  }

  std::int64_t epochs_allocated_count() const {
    std::int64_t n = 0;
    for (const LabelEvent& e : result_.label_events)
      if (e.kind == 'A') ++n;
    return n;
  }

  const Topology& topo_;
  EngineOptions opt_;
  Lsdb lsdb_;
  Controller ctrl_;
  std::vector<SwitchState> switches_;

  std::size_t backbone_links_ = 0;
  std::vector<double> link_cap_;
  std::vector<double> link_bytes_;
  std::vector<std::vector<Label>> link_activity_;
  std::vector<NodeId> pe_index_;
  std::map<NodeId, SptTree> legacy_trees_;

  std::vector<PathClass> classes_;
  std::vector<std::uint32_t> free_class_slots_;
  std::map<std::pair<Label, NodeId>, std::uint32_t> class_index_;
  std::vector<Flow> flows_;
  std::vector<std::uint32_t> free_flow_slots_;
  std::int64_t active_flows_ = 0;

  MaxMinFair solver_;
  std::vector<std::uint32_t> solver_slots_;
  std::vector<const std::vector<LinkId>*> solver_paths_;
  std::vector<std::int64_t> solver_counts_;
  std::vector<double> solver_rates_;
  std::vector<double> agg_check_;
  std::vector<LinkUtilizationSample> samples_buf_;

  std::priority_queue<Ev, std::vector<Ev>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t rate_version_ = 0;
  double now_ = 0.0;
  std::uint32_t interval_idx_ = 0;

  const std::vector<FlowArrival>* arrivals_ = nullptr;

  double rx_full_ = 0.0, rx_post_ = 0.0, rx_full_at_reset_ = 0.0;
  std::uint64_t last_sample_packet_in_ = 0, last_sample_msgs_ = 0, last_gc_msgs_ = 0;
  double last_sample_rx_ = 0.0;
  bool baseline_taken_ = false;

  RunResult result_;
};

inline RunResult run_scenario(const Topology& topo, const EngineOptions& opt,
                              const std::vector<FlowArrival>& arrivals,
                              std::uint64_t seed = 0, std::uint32_t replication = 0) {
  Engine engine(topo, opt);
  RunResult r = engine.run(arrivals);
  r.seed = seed;
  r.replication = replication;
  return r;
}

}  // namespace flowmux
