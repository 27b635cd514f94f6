#pragma once
// Centralized controller: the Measurement Component classifies per-link
// utilization against the warning/congestion thresholds and rewrites LSDB
// metrics; the Label Allocator reacts to metric changes by finding the
// affected destination PEs (those whose labels crossed a changed link),
// recomputing their toward-root trees, allocating fresh labels and emitting
// the table updates that install them. A destination has exactly one ACTIVE
// label at any instant; superseded labels DRAIN until their flows end and
// the garbage collector clears their entries everywhere, then the value
// returns to the pool.
//
// Message accounting mirrors reality without a wire protocol: one stats
// request + response per node per measurement tick, one bundle message per
// node touched by a reallocation batch, one Packet_IN per reactive miss.

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowmux/dataplane.hpp"
#include "flowmux/spt.hpp"
#include "flowmux/topology.hpp"

namespace flowmux {

struct ThresholdConfig {
  double warn_th = 0.4;
  double cong_th = 0.8;
  double measurement_interval_s = 1.0;

  void validate() const {
    if (!(0.0 < warn_th && warn_th < cong_th && cong_th < 1.0))
      throw std::invalid_argument("thresholds must satisfy 0 < warn < cong < 1");
    if (!(measurement_interval_s > 0.0))
      throw std::invalid_argument("measurement interval must be positive");
  }
};

struct LinkUtilizationSample {
  LinkId link = kNoLink;
  double tput_bps = 0.0;
  double utilization = 0.0;
};

/// NORM for u <= warn, WARN for warn < u <= cong, CONG above.
inline MetricClass classify(double utilization, const ThresholdConfig& cfg) {
  if (utilization <= cfg.warn_th) return MetricClass::NORM;
  if (utilization <= cfg.cong_th) return MetricClass::WARN;
  return MetricClass::CONG;
}

struct MetricChange {
  LinkId link = kNoLink;
  MetricClass old_class = MetricClass::NORM;
  MetricClass new_class = MetricClass::NORM;
};

enum class EpochState { ACTIVE, DRAINING, RETIRED };

inline const char* to_string(EpochState s) {
  switch (s) {
    case EpochState::ACTIVE: return "ACTIVE";
    case EpochState::DRAINING: return "DRAINING";
    case EpochState::RETIRED: return "RETIRED";
  }
  return "?";
}

/// One label generation for one destination PE: the label value, the tree
/// it was installed along, and its drain bookkeeping.
struct LabelEpoch {
  Label label = kNoLabel;
  NodeId dest_pe = kNoNode;
  std::uint32_t epoch = 0;  // per-destination counter
  SptTree tree;
  EpochState state = EpochState::ACTIVE;
  int active_flows = 0;      // flows currently pinned to this label
  int installed_entries = 0; // label-table entries alive network-wide
  double created_at = 0.0;
  double retired_at = -1.0;
};

enum class TableCommandKind { CftReplace, PInstall, PDemote, PRemove };

struct TableCommand {
  TableCommandKind kind = TableCommandKind::PInstall;
  NodeId target = kNoNode;
  NodeId dest_network = kNoNode;  // CftReplace only
  Label label = kNoLabel;
  LinkId out_link = kNoLink;
  double idle_timeout = kInfiniteTimeout;  // PInstall infinite, PDemote finite
};

struct MessageLedger {
  std::uint64_t stat_requests = 0;
  std::uint64_t stat_responses = 0;
  std::uint64_t bundle_updates = 0;
  std::uint64_t packet_in = 0;

  std::uint64_t total() const {
    return stat_requests + stat_responses + bundle_updates + packet_in;
  }
};

enum class AllocationPolicy { ALWAYS, ON_TREE_CHANGE };

class Controller {
 public:
  Controller(const Topology& topo, ThresholdConfig thresholds, AllocationPolicy policy,
             double gc_timeout_s)
      : topo_(&topo),
        thresholds_(thresholds),
        policy_(policy),
        gc_timeout_s_(gc_timeout_s) {
    thresholds_.validate();
    active_label_.assign(topo.node_count(), kNoLabel);
    epoch_counter_.assign(topo.node_count(), 0);
  }

  const ThresholdConfig& thresholds() const { return thresholds_; }
  MessageLedger& ledger() { return ledger_; }
  const MessageLedger& ledger() const { return ledger_; }

  // --- Measurement Component -------------------------------------------

  /// One sample per directed link, indexed by LinkId. Reclassifies every
  /// link and returns the actual class changes. Accounts one stats
  /// request/response per node.
  std::vector<MetricChange> measurement_tick(const std::vector<LinkUtilizationSample>& samples,
                                             Lsdb& lsdb) {
    if (samples.size() != lsdb.link_count())
      throw std::logic_error("measurement_tick: need exactly one sample per link");
    std::vector<MetricChange> changes;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].link != LinkId(i))
        throw std::logic_error("measurement_tick: samples must be indexed by link id");
      double u = std::min(std::max(samples[i].utilization, 0.0), 1.0);
      MetricClass cls = classify(u, thresholds_);
      MetricClass old = lsdb.metric_class(LinkId(i));
      if (lsdb.set_metric(LinkId(i), cls)) changes.push_back({LinkId(i), old, cls});
    }
    ledger_.stat_requests += topo_->node_count();
    ledger_.stat_responses += topo_->node_count();
    return changes;
  }

  // --- Label Allocator Component -----------------------------------------

  /// Destination PEs whose labels were observed on any changed link during
  /// the last interval. activity[link] lists the labels seen on that link.
  std::vector<NodeId> affected_pes(const std::vector<MetricChange>& changes,
                                   const std::vector<std::vector<Label>>& activity) const {
    std::set<NodeId> hit;
    for (const MetricChange& ch : changes) {
      if (ch.link >= activity.size()) continue;
      for (Label label : activity[ch.link]) {
        auto it = epochs_.find(label);
        if (it != epochs_.end() && it->second.state != EpochState::RETIRED)
          hit.insert(it->second.dest_pe);
      }
    }
    return {hit.begin(), hit.end()};
  }

  /// Initial allocation: one label per PE before any traffic. Same command
  /// stream as a reallocation covering every PE.
  std::vector<TableCommand> bootstrap(const Lsdb& lsdb, double now) {
    auto [labels, cmds] = reallocate(topo_->pe_nodes(), lsdb, now);
    (void)labels;
    return cmds;
  }

  /// Recomputes the toward-root tree of each affected destination and, per
  /// the allocation policy, draws a fresh label and emits the commands that
  /// install it: CFT rewrites at every PE, label installs along the new
  /// tree, and timeout demotion of the superseded label. One bundle message
  /// is accounted per distinct target node in the batch.
  std::pair<std::vector<Label>, std::vector<TableCommand>> reallocate(
      const std::vector<NodeId>& affected, const Lsdb& lsdb, double now) {
    std::vector<NodeId> dests(affected);
    std::sort(dests.begin(), dests.end());
    dests.erase(std::unique(dests.begin(), dests.end()), dests.end());

    std::vector<Label> fresh;
    std::vector<TableCommand> cmds;
    for (NodeId dest : dests) {
      if (!topo_->is_pe(dest)) throw std::logic_error("reallocate: affected node is not a PE");
      SptTree tree = reverse_dijkstra(*topo_, lsdb, dest);

      Label old = active_label_[dest];
      if (policy_ == AllocationPolicy::ON_TREE_CHANGE && old != kNoLabel &&
          trees_equal(tree, epochs_.at(old).tree))
        continue;

      Label label = allocate_label();
      LabelEpoch e;
      e.label = label;
      e.dest_pe = dest;
      e.epoch = epoch_counter_[dest]++;
      e.tree = std::move(tree);
      e.state = EpochState::ACTIVE;
      e.created_at = now;

      if (old != kNoLabel) epochs_.at(old).state = EpochState::DRAINING;
      active_label_[dest] = label;

      // CFT rewrite at every other PE that can reach the destination.
      for (NodeId pe : topo_->pe_nodes()) {
        if (pe == dest || !e.tree.reaches(pe)) continue;
        LinkId out = topo_->find_link(pe, e.tree.next_hop[pe]);
        cmds.push_back({TableCommandKind::CftReplace, pe, dest, label, out, kInfiniteTimeout});
      }
      // Proactive label install along the new tree, infinite timeout.
      for (NodeId u = 0; u < NodeId(topo_->node_count()); ++u) {
        if (u == dest || !e.tree.reaches(u)) continue;
        LinkId out = topo_->find_link(u, e.tree.next_hop[u]);
        cmds.push_back({TableCommandKind::PInstall, u, kNoNode, label, out, kInfiniteTimeout});
      }
      // Demote the superseded label wherever it was installed.
      if (old != kNoLabel) {
        const SptTree& old_tree = epochs_.at(old).tree;
        for (NodeId u = 0; u < NodeId(topo_->node_count()); ++u) {
          if (u == epochs_.at(old).dest_pe || !old_tree.reaches(u)) continue;
          cmds.push_back({TableCommandKind::PDemote, u, kNoNode, old, kNoLink, gc_timeout_s_});
        }
      }

      epochs_.emplace(label, std::move(e));
      fresh.push_back(label);
    }

    std::set<NodeId> targets;
    for (const TableCommand& c : cmds) targets.insert(c.target);
    ledger_.bundle_updates += targets.size();
    return {std::move(fresh), std::move(cmds)};
  }

  // --- label lifecycle ------------------------------------------------------

  void on_flow_admitted(Label label) {
    LabelEpoch& e = epoch_mut(label);
    if (e.state != EpochState::ACTIVE)
      throw std::logic_error("flow admitted to a non-ACTIVE label");
    ++e.active_flows;
  }

  void on_flow_completed(Label label) {
    LabelEpoch& e = epoch_mut(label);
    if (--e.active_flows < 0) throw std::logic_error("label flow count underflow");
  }

  void note_entry_installed(Label label) { ++epoch_mut(label).installed_entries; }

  void note_entry_expired(Label label) {
    LabelEpoch& e = epoch_mut(label);
    if (--e.installed_entries < 0) throw std::logic_error("label entry count underflow");
  }

  /// Retires a drained label and returns its value to the pool. The epoch
  /// must be DRAINING with no flows and no remaining table entries.
  void recycle(Label label, double now) {
    LabelEpoch& e = epoch_mut(label);
    if (e.state != EpochState::DRAINING)
      throw std::logic_error("recycle: epoch is not DRAINING");
    if (e.active_flows != 0) throw std::logic_error("recycle: label still carries flows");
    if (e.installed_entries != 0)
      throw std::logic_error("recycle: label entries still installed");
    e.state = EpochState::RETIRED;
    e.retired_at = now;
    free_labels_.push(label);
  }

  /// Recycles every drained label whose flows and entries are gone.
  /// Returns the labels retired on this pass.
  std::vector<Label> recycle_eligible(double now) {
    std::vector<Label> retired;
    for (auto& [label, e] : epochs_) {
      if (e.state == EpochState::DRAINING && e.active_flows == 0 && e.installed_entries == 0) {
        recycle(label, now);
        retired.push_back(label);
      }
    }
    return retired;
  }

  // --- inspection ------------------------------------------------------------

  const LabelEpoch& epoch(Label label) const {
    auto it = epochs_.find(label);
    if (it == epochs_.end()) throw std::logic_error("unknown label");
    return it->second;
  }
  bool has_epoch(Label label) const { return epochs_.count(label) > 0; }
  Label active_label(NodeId dest) const { return active_label_.at(dest); }
  const std::map<Label, LabelEpoch>& epochs() const { return epochs_; }

  std::size_t live_label_count() const {
    std::size_t n = 0;
    for (const auto& [label, e] : epochs_)
      if (e.state != EpochState::RETIRED) ++n;
    return n;
  }

  bool label_free(Label label) const {
    if (label < kLabelMin || label >= kLabelEnd) return false;
    if (label >= next_fresh_) return true;
    auto it = epochs_.find(label);
    return it == epochs_.end() || it->second.state == EpochState::RETIRED;
  }

 private:
  Label allocate_label() {
    Label label;
    if (!free_labels_.empty()) {  // recycled values first: lowest-free-first
      label = free_labels_.top();
      free_labels_.pop();
      epochs_.erase(label);  // drop the retired epoch that held this value
    } else if (next_fresh_ < kLabelEnd) {
      label = next_fresh_++;
    } else {
      throw std::runtime_error("label pool exhausted; live labels: " +
                               std::to_string(live_label_count()));
    }
    return label;
  }

  LabelEpoch& epoch_mut(Label label) {
    auto it = epochs_.find(label);
    if (it == epochs_.end()) throw std::logic_error("unknown label");
    return it->second;
  }

  const Topology* topo_;
  ThresholdConfig thresholds_;
  AllocationPolicy policy_;
  double gc_timeout_s_;

  Label next_fresh_ = kLabelMin;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> free_labels_;
  std::map<Label, LabelEpoch> epochs_;
  std::vector<Label> active_label_;        // per destination PE
  std::vector<std::uint32_t> epoch_counter_;
  MessageLedger ledger_;
};

}  // namespace flowmux
