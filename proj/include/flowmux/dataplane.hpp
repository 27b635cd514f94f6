#pragma once
// Per-node switch state. PE nodes run the two-table pipeline: the Detailed
// Flow Table (DFT) holds per-flow entries with finite idle timeouts, the
// Coarse Flow Table (CFT) holds controller-installed aggregation rules
// (destination network -> push label + output interface, infinite timeout).
// A DFT miss that matches the CFT copies the action into a fresh DFT entry
// locally, with no controller round trip. Every node additionally holds a
// label table for transit forwarding; in legacy mode the same object tracks
// plain per-flow entries installed reactively.
//
// Flows are fluid, so "hits" are modeled with an active-flow count per
// entry: an entry cannot idle out while a flow is still transmitting, and
// its idle clock starts when the last flow using it goes quiet.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "flowmux/topology.hpp"

namespace flowmux {

using Label = std::uint32_t;
inline constexpr Label kNoLabel = 0;  // 0..15 reserved by MPLS convention
inline constexpr Label kLabelMin = 16;
inline constexpr Label kLabelEnd = Label(1) << 20;

inline constexpr double kInfiniteTimeout = std::numeric_limits<double>::infinity();

/// Network id (one destination-client network per PE) lives in the high
/// bits of the opaque addresses; hosts in the low 20 bits.
inline constexpr std::uint32_t kNetworkShift = 20;
inline std::uint32_t make_addr(NodeId network, std::uint32_t host) {
  return (network << kNetworkShift) | (host & ((1u << kNetworkShift) - 1));
}
inline NodeId network_of(std::uint32_t addr) { return addr >> kNetworkShift; }

struct FiveTuple {
  std::uint32_t src_addr = 0;
  std::uint32_t dst_addr = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t proto = 6;  // TCP

  auto operator<=>(const FiveTuple&) const = default;
};

struct FiveTupleHash {
  std::size_t operator()(const FiveTuple& t) const {
    std::uint64_t h = t.src_addr;
    h = h * 0x9E3779B97F4A7C15ull + t.dst_addr;
    h = h * 0x9E3779B97F4A7C15ull + (std::uint64_t(t.src_port) << 32 |
                                     std::uint64_t(t.dst_port) << 16 | t.proto);
    h ^= h >> 29;
    return std::size_t(h * 0xBF58476D1CE4E5B9ull);
  }
};

struct DftEntry {
  Label label = kNoLabel;
  LinkId out_link = kNoLink;
  double idle_timeout = 1.0;
  double last_hit = 0.0;
  bool flow_active = true;
};

struct CftRule {
  NodeId dest_network = kNoNode;
  bool match_dst_port = false;
  std::uint16_t dst_port = 0;
  int priority = 0;  // higher wins; extended rules default above plain ones
  Label label = kNoLabel;
  LinkId out_link = kNoLink;
};

struct PEntry {
  LinkId out_link = kNoLink;
  double idle_timeout = kInfiniteTimeout;
  double last_hit = 0.0;
  int active_flows = 0;
};

struct AdmitResult {
  enum Kind { DftHit, CftCopied, PacketIn, NoMatch } kind = NoMatch;
  Label label = kNoLabel;
  LinkId out_link = kNoLink;
};

struct GcReport {
  std::vector<std::pair<Label, NodeId>> expired_labels;  // (label, node)
  int dft_removed = 0;
  int legacy_removed = 0;
};

class SwitchState {
 public:
  SwitchState() = default;
  SwitchState(NodeId id, NodeRole role) : id_(id), role_(role) {}

  NodeId id() const { return id_; }
  NodeRole role() const { return role_; }

  // --- PE pipeline ---------------------------------------------------

  /// Fig.-4 style pipeline: DFT exact match, else CFT match (best rule by
  /// priority) which both forwards and clones a DFT entry, else Table-Miss
  /// Packet_IN if configured, else NoMatch.
  AdmitResult pe_admit(const FiveTuple& flow, double now, double dft_timeout) {
    if (role_ != NodeRole::PE) throw std::logic_error("pe_admit on a non-PE node");
    if (auto it = dft_.find(flow); it != dft_.end()) {
      it->second.last_hit = now;
      return {AdmitResult::DftHit, it->second.label, it->second.out_link};
    }
    const CftRule* best = nullptr;
    for (const CftRule& r : cft_) {
      if (r.dest_network != network_of(flow.dst_addr)) continue;
      if (r.match_dst_port && r.dst_port != flow.dst_port) continue;
      if (!best || r.priority > best->priority) best = &r;
    }
    if (!best) {
      if (cft_table_miss_) return {AdmitResult::PacketIn, kNoLabel, kNoLink};
      return {AdmitResult::NoMatch, kNoLabel, kNoLink};
    }
    dft_.emplace(flow, DftEntry{best->label, best->out_link, dft_timeout, now, true});
    return {AdmitResult::CftCopied, best->label, best->out_link};
  }

  /// Controller-side CFT maintenance: replaces the plain (non-extended) rule
  /// for a destination network, or inserts it.
  void cft_replace(NodeId dest_network, Label label, LinkId out_link) {
    for (CftRule& r : cft_) {
      if (r.dest_network == dest_network && !r.match_dst_port) {
        r.label = label;
        r.out_link = out_link;
        return;
      }
    }
    cft_.push_back({dest_network, false, 0, 0, label, out_link});
  }

  void cft_add_rule(const CftRule& rule) { cft_.push_back(rule); }
  void cft_set_table_miss(bool enabled) { cft_table_miss_ = enabled; }

  /// Marks the ingress DFT entry idle once its flow completes; the idle
  /// clock starts now.
  void dft_flow_done(const FiveTuple& flow, double now) {
    auto it = dft_.find(flow);
    if (it == dft_.end()) throw std::logic_error("dft_flow_done: no such entry");
    it->second.flow_active = false;
    it->second.last_hit = now;
    dft_expiry_.emplace(now + it->second.idle_timeout, flow);
  }

  // --- label table (all nodes) ----------------------------------------

  void install_label(Label label, LinkId out_link, double now) {
    labels_[label] = PEntry{out_link, kInfiniteTimeout, now, 0};
  }

  /// Timeout flip from infinite to finite; forwarding keeps working until
  /// the garbage collector expires the idle entry.
  bool demote_label(Label label, double timeout, double now) {
    auto it = labels_.find(label);
    if (it == labels_.end()) return false;
    it->second.idle_timeout = timeout;
    if (it->second.active_flows == 0) it->second.last_hit = now;
    return true;
  }

  bool remove_label(Label label) { return labels_.erase(label) > 0; }

  /// Label lookup; kNoLink signals a forwarding fault (unknown label).
  LinkId p_forward(Label label, double now) {
    auto it = labels_.find(label);
    if (it == labels_.end()) return kNoLink;
    it->second.last_hit = now;
    return it->second.out_link;
  }

  void label_flow_attach(Label label, double now) {
    auto it = labels_.find(label);
    if (it == labels_.end()) throw std::logic_error("label_flow_attach: unknown label");
    ++it->second.active_flows;
    it->second.last_hit = now;
  }

  void label_flow_detach(Label label, double now) {
    auto it = labels_.find(label);
    if (it == labels_.end()) throw std::logic_error("label_flow_detach: unknown label");
    if (--it->second.active_flows < 0)
      throw std::logic_error("label_flow_detach: negative flow count");
    it->second.last_hit = now;
  }

  // --- legacy reactive mode -------------------------------------------

  /// Reactive per-flow entry; one Packet_IN is accounted by the caller.
  void legacy_install(double) { ++legacy_entries_; }

  void legacy_flow_done(double now, double timeout) {
    legacy_expiry_.push(now + timeout);
  }

  // --- garbage collection ----------------------------------------------

  /// Removes every finite-timeout entry idle for at least its timeout.
  /// Expired label entries are reported so the controller can recycle a
  /// label once its entries vanish network-wide.
  GcReport gc_tick(double now) {
    GcReport report;
    while (!dft_expiry_.empty() && dft_expiry_.top().first <= now + 1e-12) {
      auto [when, flow] = dft_expiry_.top();
      dft_expiry_.pop();
      auto it = dft_.find(flow);
      if (it == dft_.end() || it->second.flow_active) continue;
      if (now - it->second.last_hit + 1e-12 < it->second.idle_timeout) continue;
      dft_.erase(it);
      ++report.dft_removed;
    }
    for (auto it = labels_.begin(); it != labels_.end();) {
      const PEntry& e = it->second;
      if (!std::isinf(e.idle_timeout) && e.active_flows == 0 &&
          now - e.last_hit + 1e-12 >= e.idle_timeout) {
        report.expired_labels.emplace_back(it->first, id_);
        it = labels_.erase(it);
      } else {
        ++it;
      }
    }
    while (!legacy_expiry_.empty() && legacy_expiry_.top() <= now + 1e-12) {
      legacy_expiry_.pop();
      --legacy_entries_;
      ++report.legacy_removed;
    }
    return report;
  }

  // --- inspection --------------------------------------------------------

  std::size_t dft_size() const { return dft_.size(); }
  std::size_t cft_size() const { return cft_.size(); }
  std::size_t label_count() const { return labels_.size(); }
  std::int64_t legacy_count() const { return legacy_entries_; }
  bool has_label(Label label) const { return labels_.count(label) > 0; }
  const PEntry* label_entry(Label label) const {
    auto it = labels_.find(label);
    return it == labels_.end() ? nullptr : &it->second;
  }

  /// One JSON object per table entry, one per line. Debug aid.
  std::string dump_json_lines() const {
    std::string out;
    char buf[256];
    for (const auto& [flow, e] : dft_) {
      std::snprintf(buf, sizeof buf,
                    R"({"node":%u,"table":"dft","src":%u,"dst":%u,"sport":%u,"dport":%u,)"
                    R"("label":%u,"out":%u,"active":%s})",
                    id_, flow.src_addr, flow.dst_addr, flow.src_port, flow.dst_port, e.label,
                    e.out_link, e.flow_active ? "true" : "false");
      out += buf;
      out += '\n';
    }
    for (const CftRule& r : cft_) {
      std::snprintf(buf, sizeof buf,
                    R"({"node":%u,"table":"cft","network":%u,"label":%u,"out":%u,"prio":%d})",
                    id_, r.dest_network, r.label, r.out_link, r.priority);
      out += buf;
      out += '\n';
    }
    for (const auto& [label, e] : labels_) {
      std::snprintf(buf, sizeof buf,
                    R"({"node":%u,"table":"label","label":%u,"out":%u,"timeout":%s,"flows":%d})",
                    id_, label, e.out_link, std::isinf(e.idle_timeout) ? "\"inf\"" : "\"gc\"",
                    e.active_flows);
      out += buf;
      out += '\n';
    }
    return out;
  }

 private:
  NodeId id_ = kNoNode;
  NodeRole role_ = NodeRole::P;

  std::unordered_map<FiveTuple, DftEntry, FiveTupleHash> dft_;
  std::priority_queue<std::pair<double, FiveTuple>,
                      std::vector<std::pair<double, FiveTuple>>,
                      std::greater<>> dft_expiry_;
  std::vector<CftRule> cft_;
  bool cft_table_miss_ = false;

  std::map<Label, PEntry> labels_;  // ordered for stable dumps

  std::int64_t legacy_entries_ = 0;
  std::priority_queue<double, std::vector<double>, std::greater<>> legacy_expiry_;
};

/// Legacy SDN admission: every switch on the path emits one Packet_IN and
/// installs one reactive per-flow entry. Returns the Packet_IN count.
inline int legacy_admit(std::vector<SwitchState>& switches, const std::vector<NodeId>& path,
                        double now) {
  for (NodeId n : path) switches.at(n).legacy_install(now);
  return int(path.size());
}

}  // namespace flowmux
