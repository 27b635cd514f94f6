#pragma once
// Shortest-path trees over the LSDB. Two orientations share one Dijkstra:
//
//   Forward     — classic tree from a source; next_hop[v] is v's predecessor,
//                 so the source->v path is read by walking v back to the root.
//   TowardRoot  — the tree is built from edges pointing at the root, i.e. the
//                 relaxation at node u scans u's incoming links. dist[u] is
//                 then the cheapest cost of a directed path u -> ... -> root,
//                 and next_hop[u] is u's forwarding successor toward the root.
//
// Tie-breaking is pinned for cross-run determinism: equal-distance nodes
// settle in ascending id order, and among equal-cost predecessors the lowest
// node id wins.

#include <queue>
#include <stdexcept>
#include <vector>

#include "flowmux/topology.hpp"

namespace flowmux {

struct SptTree {
  NodeId root = kNoNode;
  std::vector<NodeId> next_hop;        // kNoNode at the root and off-tree
  std::vector<std::uint64_t> dist;     // kUnreachable off-tree

  static constexpr std::uint64_t kUnreachable = ~std::uint64_t(0);

  bool reaches(NodeId n) const { return dist.at(n) != kUnreachable; }
};

enum class EdgeOrientation { Forward, TowardRoot };

inline SptTree shortest_path_tree(const Topology& topo, const Lsdb& lsdb, NodeId root,
                                  EdgeOrientation orient) {
  const std::size_t n = topo.node_count();
  if (root >= n) throw std::logic_error("shortest_path_tree: root not in topology");

  SptTree tree;
  tree.root = root;
  tree.next_hop.assign(n, kNoNode);
  tree.dist.assign(n, SptTree::kUnreachable);
  tree.dist[root] = 0;

  using Item = std::pair<std::uint64_t, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  std::vector<char> settled(n, 0);
  pq.emplace(0, root);

  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    const auto& edges =
        orient == EdgeOrientation::Forward ? topo.out_links(u) : topo.in_links(u);
    for (LinkId lid : edges) {
      const DirectedLink& l = topo.link(lid);
      NodeId v = orient == EdgeOrientation::Forward ? l.to : l.from;
      std::uint64_t nd = d + lsdb.effective_metric(lid);
      if (nd < tree.dist[v]) {
        tree.dist[v] = nd;
        tree.next_hop[v] = u;
        pq.emplace(nd, v);
      } else if (nd == tree.dist[v] && u < tree.next_hop[v]) {
        tree.next_hop[v] = u;  // equal cost: lowest-id next hop
      }
    }
  }
  return tree;
}

/// Tree rooted at a destination PE using the metrics of links oriented
/// toward the root; next_hop[u] is where u forwards traffic bound for root.
inline SptTree reverse_dijkstra(const Topology& topo, const Lsdb& lsdb, NodeId root) {
  if (root >= topo.node_count() || !topo.is_pe(root))
    throw std::logic_error("reverse_dijkstra: root must be a PE node");
  return shortest_path_tree(topo, lsdb, root, EdgeOrientation::TowardRoot);
}

/// Identical next-hop maps. Roots must match; distances are not compared
/// (equal next-hop maps under one LSDB imply equal distances).
inline bool trees_equal(const SptTree& a, const SptTree& b) {
  if (a.root != b.root) throw std::logic_error("trees_equal: different roots");
  return a.next_hop == b.next_hop;
}

/// Node sequence from `from` to the root, both inclusive. Throws if `from`
/// is off-tree or a cycle is detected (step budget = node count).
inline std::vector<NodeId> walk_to_root(const SptTree& tree, NodeId from) {
  if (!tree.reaches(from)) throw std::logic_error("walk_to_root: node unreachable");
  std::vector<NodeId> path{from};
  NodeId cur = from;
  std::size_t budget = tree.next_hop.size();
  while (cur != tree.root) {
    if (budget-- == 0) throw std::logic_error("walk_to_root: next_hop cycle");
    cur = tree.next_hop[cur];
    if (cur == kNoNode) throw std::logic_error("walk_to_root: broken chain");
    path.push_back(cur);
  }
  return path;
}

}  // namespace flowmux
