#ifndef GRAPHOPT_PATH_HPP
#define GRAPHOPT_PATH_HPP

#include <algorithm>
#include <deque>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphopt/backend.hpp"
#include "graphopt/graph.hpp"

namespace graphopt {

namespace detail {

/* Shared search core: FIFO breadth-first over the undirected view, goal
 * test at dequeue, first discoverer wins as parent. Both entry points below
 * run this exact traversal, so they return the same path for the same pair;
 * the only difference is the per-edge weight probe. With unit edge costs a
 * uniform-cost search with stable (distance, discovery order) tie-breaking
 * dequeues in FIFO order, which is why one core serves both.
 *
 * The goal test compares ids; node records are never fetched for it. Each
 * dequeued non-goal node costs exactly one get_neighbours call. */
inline std::optional<std::vector<NodeId>> undirected_search(
    NodeId s, NodeId e, Backend& backend, bool probe_edge_weights) {
  backend.node_labels(s);  // existence checks; throws on unknown ids
  backend.node_labels(e);
  if (s == e) return std::vector<NodeId>{s};

  std::deque<NodeId> queue{s};
  std::unordered_set<NodeId> discovered{s};
  std::unordered_map<NodeId, NodeId> parent;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    if (v == e) {
      std::vector<NodeId> path{e};
      for (NodeId at = e; at != s; at = parent.at(at)) path.push_back(parent.at(at));
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (const auto& nb : backend.get_neighbours(v, Direction::both)) {
      if (probe_edge_weights)
        backend.get_attribute(ElemRef::of_edge(nb.edge), "weight");
      if (discovered.insert(nb.other).second) {
        parent[nb.other] = v;
        queue.push_back(nb.other);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/* The engine's own client-side routine: pure breadth-first search over
 * elementary calls. Zero attribute accesses, at most one get_neighbours per
 * dequeued node. */
inline std::optional<std::vector<NodeId>> graph_bfs_shortest_path(NodeId s, NodeId e,
                                                                  Backend& backend) {
  return detail::undirected_search(s, e, backend, /*probe_edge_weights=*/false);
}

/* Emulation of the built-in shortest-path routine the naive strategy leans
 * on: a uniform-cost search that probes every examined edge for a "weight"
 * attribute that is never there. The length is still optimal; the probes
 * are the deliberate per-edge overhead. */
inline std::optional<std::vector<NodeId>> builtin_shortest_path(NodeId s, NodeId e,
                                                                Backend& backend) {
  return detail::undirected_search(s, e, backend, /*probe_edge_weights=*/true);
}

}  // namespace graphopt

#endif
