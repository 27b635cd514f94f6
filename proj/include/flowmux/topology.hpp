#pragma once
// Network model: nodes with PE/P roles, directed links with per-direction
// capacity/delay/metric, and the controller's view of current link state
// (the LSDB). Topologies load from a line-oriented text format:
//
//   node <id> <PE|P>
//   link <from> <to> <capacity_bps> <delay_s> <metric>
//   bilink <a> <b> <capacity_bps> <delay_s> <metric>
//
// '#' starts a comment. Node lines come first; node ids must be dense and
// start at 0. A bilink expands to two directed links with equal parameters;
// asymmetric metrics need two explicit link lines.

#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flowmux {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr LinkId kNoLink = std::numeric_limits<LinkId>::max();

enum class NodeRole : std::uint8_t { PE, P };

/// One direction of a physical link. A bidirectional cable is two of these.
struct DirectedLink {
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  double capacity_bps = 0.0;
  double delay_s = 0.0;
  std::uint32_t base_metric = 1;  // IGP metric while the link is in NORM state
};

/// Congestion state of a link as seen by the controller. NORM keeps the
/// link's own base metric; WARN and CONG override it with the configured
/// values below.
enum class MetricClass : std::uint8_t { NORM = 0, WARN = 1, CONG = 2 };

inline const char* to_string(MetricClass c) {
  switch (c) {
    case MetricClass::NORM: return "NORM";
    case MetricClass::WARN: return "WARN";
    case MetricClass::CONG: return "CONG";
  }
  return "?";
}

struct MetricValues {
  std::uint32_t norm = 1;
  std::uint32_t warn = 1000;
  std::uint32_t cong = 65535;

  void validate() const {
    if (!(norm >= 1 && norm < warn && warn < cong))
      throw std::invalid_argument("metric values must satisfy 1 <= NORM < WARN < CONG");
  }
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Topology {
 public:
  static Topology parse(std::istream& in, const std::string& source_name);

  static Topology parse_text(std::string_view text,
                             const std::string& source_name = "<string>") {
    std::istringstream in{std::string(text)};
    return parse(in, source_name);
  }

  static Topology load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TopologyError("cannot open topology file: " + path);
    return parse(in, path);
  }

  std::size_t node_count() const { return roles_.size(); }
  std::size_t link_count() const { return links_.size(); }

  NodeRole role(NodeId n) const { return roles_.at(n); }
  bool is_pe(NodeId n) const { return roles_.at(n) == NodeRole::PE; }
  const std::vector<NodeId>& pe_nodes() const { return pes_; }

  const DirectedLink& link(LinkId l) const { return links_.at(l); }
  const std::vector<DirectedLink>& links() const { return links_; }
  const std::vector<LinkId>& out_links(NodeId n) const { return out_.at(n); }
  const std::vector<LinkId>& in_links(NodeId n) const { return in_.at(n); }

  /// kNoLink when no such directed link exists.
  LinkId find_link(NodeId from, NodeId to) const {
    auto it = by_pair_.find(pair_key(from, to));
    return it == by_pair_.end() ? kNoLink : it->second;
  }

 private:
  static std::uint64_t pair_key(NodeId a, NodeId b) {
    return (std::uint64_t(a) << 32) | b;
  }

  std::vector<NodeRole> roles_;
  std::vector<NodeId> pes_;
  std::vector<DirectedLink> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<std::vector<LinkId>> in_;
  std::unordered_map<std::uint64_t, LinkId> by_pair_;
};

/// Link State Database: current metric class per link. set_metric reports
/// whether the class actually changed so callers can batch reactions.
class Lsdb {
 public:
  Lsdb() = default;

  Lsdb(const Topology& topo, MetricValues values) : values_(values) {
    values_.validate();
    class_.assign(topo.link_count(), MetricClass::NORM);
    base_.reserve(topo.link_count());
    for (const DirectedLink& l : topo.links()) base_.push_back(l.base_metric);
  }

  bool set_metric(LinkId link, MetricClass cls) {
    if (link >= class_.size()) throw std::logic_error("set_metric: unknown link");
    if (class_[link] == cls) return false;
    class_[link] = cls;
    return true;
  }

  MetricClass metric_class(LinkId link) const { return class_.at(link); }

  std::uint32_t effective_metric(LinkId link) const {
    switch (class_.at(link)) {
      case MetricClass::NORM: return base_[link];
      case MetricClass::WARN: return values_.warn;
      case MetricClass::CONG: return values_.cong;
    }
    return base_[link];
  }

  const MetricValues& values() const { return values_; }
  std::size_t link_count() const { return class_.size(); }

 private:
  std::vector<MetricClass> class_;
  std::vector<std::uint32_t> base_;
  MetricValues values_;
};

inline std::pair<Topology, Lsdb> load_topology(const std::string& path,
                                               MetricValues values = {}) {
  Topology topo = Topology::load_file(path);
  Lsdb lsdb(topo, values);
  return {std::move(topo), std::move(lsdb)};
}

namespace detail {

inline std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

inline double parse_double(const std::string& tok, const std::string& where) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw TopologyError(where + ": not a number: '" + tok + "'");
  }
  if (pos != tok.size()) throw TopologyError(where + ": not a number: '" + tok + "'");
  return v;
}

inline std::uint64_t parse_uint(const std::string& tok, const std::string& where) {
  if (tok.empty() || tok[0] == '-')
    throw TopologyError(where + ": not a non-negative integer: '" + tok + "'");
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    throw TopologyError(where + ": not a non-negative integer: '" + tok + "'");
  }
  if (pos != tok.size())
    throw TopologyError(where + ": not a non-negative integer: '" + tok + "'");
  return v;
}

}  // namespace detail

inline Topology Topology::parse(std::istream& in, const std::string& source_name) {
  Topology topo;
  std::unordered_map<NodeId, NodeRole> declared;
  NodeId max_id = 0;
  bool any_node = false;
  bool links_started = false;

  struct PendingLink {
    DirectedLink link;
    std::string where;
  };
  std::vector<PendingLink> pending;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    std::string where = source_name + ":" + std::to_string(lineno);

    if (toks[0] == "node") {
      if (links_started) throw TopologyError(where + ": node lines must precede link lines");
      if (toks.size() != 3) throw TopologyError(where + ": expected 'node <id> <PE|P>'");
      std::uint64_t id = detail::parse_uint(toks[1], where);
      if (id >= kNoNode) throw TopologyError(where + ": node id too large");
      NodeRole role;
      if (toks[2] == "PE") role = NodeRole::PE;
      else if (toks[2] == "P") role = NodeRole::P;
      else throw TopologyError(where + ": unknown role '" + toks[2] + "' (expected PE or P)");
      if (!declared.emplace(NodeId(id), role).second)
        throw TopologyError(where + ": duplicate node " + toks[1]);
      max_id = std::max<NodeId>(max_id, NodeId(id));
      any_node = true;
    } else if (toks[0] == "link" || toks[0] == "bilink") {
      links_started = true;
      if (toks.size() != 6)
        throw TopologyError(where + ": expected '" + toks[0] +
                            " <from> <to> <capacity_bps> <delay_s> <metric>'");
      std::uint64_t from = detail::parse_uint(toks[1], where);
      std::uint64_t to = detail::parse_uint(toks[2], where);
      if (!declared.count(NodeId(from)))
        throw TopologyError(where + ": unknown node " + toks[1]);
      if (!declared.count(NodeId(to)))
        throw TopologyError(where + ": unknown node " + toks[2]);
      if (from == to) throw TopologyError(where + ": self link on node " + toks[1]);
      double cap = detail::parse_double(toks[3], where);
      if (!(cap > 0.0)) throw TopologyError(where + ": capacity must be positive");
      double delay = detail::parse_double(toks[4], where);
      if (delay < 0.0) throw TopologyError(where + ": delay must be non-negative");
      std::uint64_t metric = detail::parse_uint(toks[5], where);
      if (metric < 1 || metric > std::numeric_limits<std::uint32_t>::max())
        throw TopologyError(where + ": metric must be a positive 32-bit integer");

      DirectedLink l{NodeId(from), NodeId(to), cap, delay, std::uint32_t(metric)};
      pending.push_back({l, where});
      if (toks[0] == "bilink") {
        DirectedLink r = l;
        std::swap(r.from, r.to);
        pending.push_back({r, where});
      }
    } else {
      throw TopologyError(where + ": unknown directive '" + toks[0] + "'");
    }
  }

  if (!any_node) throw TopologyError(source_name + ": no nodes declared");
  for (NodeId id = 0; id <= max_id; ++id)
    if (!declared.count(id))
      throw TopologyError(source_name + ": node ids must be dense from 0; missing " +
                          std::to_string(id));

  topo.roles_.resize(max_id + 1);
  for (auto& [id, role] : declared) topo.roles_[id] = role;
  for (NodeId id = 0; id <= max_id; ++id)
    if (topo.roles_[id] == NodeRole::PE) topo.pes_.push_back(id);

  topo.out_.resize(topo.roles_.size());
  topo.in_.resize(topo.roles_.size());
  for (auto& [l, where] : pending) {
    if (topo.by_pair_.count(pair_key(l.from, l.to)))
      throw TopologyError(where + ": duplicate link " + std::to_string(l.from) + " -> " +
                          std::to_string(l.to));
    LinkId id = LinkId(topo.links_.size());
    topo.links_.push_back(l);
    topo.by_pair_.emplace(pair_key(l.from, l.to), id);
    topo.out_[l.from].push_back(id);
    topo.in_[l.to].push_back(id);
  }
  return topo;
}

}  // namespace flowmux
