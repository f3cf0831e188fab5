#ifndef GRAPHOPT_GRAPH_HPP
#define GRAPHOPT_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphopt/value.hpp"

namespace graphopt {

using NodeId = std::uint64_t;
using EdgeId = std::uint64_t;

struct graph_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  NodeId id = 0;
  std::vector<std::string> labels;
  std::map<std::string, PropertyValue> props;

  bool has_label(const std::string& l) const {
    return std::find(labels.begin(), labels.end(), l) != labels.end();
  }
};

struct Edge {
  EdgeId id = 0;
  std::string type;
  NodeId start = 0;
  NodeId end = 0;
  std::map<std::string, PropertyValue> props;
};

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t max_degree = 0;  // in+out, over all nodes
  std::size_t min_degree = 0;
  double avg_degree = 0.0;
};

/* In-memory labeled property graph. Immutable once built: every index is
 * derived at freeze time and never mutated afterwards, which is what lets
 * the query backend hand out references without locking.
 *
 * Multi-edges between the same pair (same or different type) are allowed.
 * Node and edge ids live in separate id spaces. Adjacency lists keep
 * insertion order; the whole engine's determinism leans on that. */
class PropertyGraph {
 public:
  struct Adjacent {
    EdgeId edge;
    NodeId other;
  };

  PropertyGraph() = default;

  /* Building interface. add_* reject duplicate ids immediately; edge
   * endpoint existence is checked at freeze() so input order is free. */
  void add_node(Node n) {
    if (frozen_) throw graph_error("graph is frozen");
    if (node_index_.count(n.id))
      throw graph_error("duplicate node id " + std::to_string(n.id));
    node_index_.emplace(n.id, nodes_.size());
    nodes_.push_back(std::move(n));
  }

  void add_edge(Edge e) {
    if (frozen_) throw graph_error("graph is frozen");
    if (edge_index_.count(e.id))
      throw graph_error("duplicate edge id " + std::to_string(e.id));
    edge_index_.emplace(e.id, edges_.size());
    edges_.push_back(std::move(e));
  }

  void freeze() {
    if (frozen_) return;
    out_.assign(nodes_.size(), {});
    in_.assign(nodes_.size(), {});
    for (const Edge& e : edges_) {
      auto s = node_index_.find(e.start);
      auto t = node_index_.find(e.end);
      if (s == node_index_.end())
        throw graph_error("edge " + std::to_string(e.id) +
                          " references missing node " + std::to_string(e.start));
      if (t == node_index_.end())
        throw graph_error("edge " + std::to_string(e.id) +
                          " references missing node " + std::to_string(e.end));
      out_[s->second].push_back({e.id, e.end});
      in_[t->second].push_back({e.id, e.start});
    }
    for (const Node& n : nodes_) {
      for (const std::string& l : n.labels) {
        label_index_[l].push_back(n.id);
        for (const auto& [key, value] : n.props)
          prop_index_[l + '\x1f' + key + '\x1f' + value_repr(value)].push_back(n.id);
      }
    }
    frozen_ = true;
  }

  bool frozen() const { return frozen_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_node(NodeId id) const { return node_index_.count(id) != 0; }
  bool has_edge(EdgeId id) const { return edge_index_.count(id) != 0; }

  const Node& node(NodeId id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end())
      throw graph_error("unknown node id " + std::to_string(id));
    return nodes_[it->second];
  }

  const Edge& edge(EdgeId id) const {
    auto it = edge_index_.find(id);
    if (it == edge_index_.end())
      throw graph_error("unknown edge id " + std::to_string(id));
    return edges_[it->second];
  }

  /* Adjacency in insertion order. Valid only after freeze(). */
  const std::vector<Adjacent>& out_edges(NodeId id) const {
    return out_[slot(id)];
  }
  const std::vector<Adjacent>& in_edges(NodeId id) const {
    return in_[slot(id)];
  }

  /* Exact-match property index over (label, key, value). Unknown
   * combinations yield the empty list, never an error. */
  const std::vector<NodeId>& nodes_with(const std::string& label,
                                        const std::string& key,
                                        const PropertyValue& value) const {
    auto it = prop_index_.find(label + '\x1f' + key + '\x1f' + value_repr(value));
    return it == prop_index_.end() ? empty_ : it->second;
  }

  const std::vector<NodeId>& nodes_labeled(const std::string& label) const {
    auto it = label_index_.find(label);
    return it == label_index_.end() ? empty_ : it->second;
  }

  /* Index cardinality peek for entry-point selection. Planner statistics,
   * not a counted query. */
  std::size_t index_count(const std::string& label, const std::string& key,
                          const PropertyValue& value) const {
    return nodes_with(label, key, value).size();
  }

  friend bool operator==(const PropertyGraph& a, const PropertyGraph& b) {
    auto node_key = [](const Node& n) { return n.id; };
    auto edge_key = [](const Edge& e) { return e.id; };
    auto sorted_by = [](auto v, auto key) {
      std::sort(v.begin(), v.end(),
                [&](const auto& x, const auto& y) { return key(x) < key(y); });
      return v;
    };
    auto nodes_eq = [](const Node& x, const Node& y) {
      return x.id == y.id && x.labels == y.labels && x.props == y.props;
    };
    auto edges_eq = [](const Edge& x, const Edge& y) {
      return x.id == y.id && x.type == y.type && x.start == y.start &&
             x.end == y.end && x.props == y.props;
    };
    auto an = sorted_by(a.nodes_, node_key), bn = sorted_by(b.nodes_, node_key);
    auto ae = sorted_by(a.edges_, edge_key), be = sorted_by(b.edges_, edge_key);
    return std::equal(an.begin(), an.end(), bn.begin(), bn.end(), nodes_eq) &&
           an.size() == bn.size() && ae.size() == be.size() &&
           std::equal(ae.begin(), ae.end(), be.begin(), be.end(), edges_eq);
  }

 private:
  std::size_t slot(NodeId id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end())
      throw graph_error("unknown node id " + std::to_string(id));
    return it->second;
  }

  bool frozen_ = false;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<NodeId, std::size_t> node_index_;
  std::unordered_map<EdgeId, std::size_t> edge_index_;
  std::vector<std::vector<Adjacent>> out_;
  std::vector<std::vector<Adjacent>> in_;
  std::unordered_map<std::string, std::vector<NodeId>> label_index_;
  std::unordered_map<std::string, std::vector<NodeId>> prop_index_;
  inline static const std::vector<NodeId> empty_{};
};

inline GraphStats graph_stats(const PropertyGraph& g) {
  GraphStats s;
  s.node_count = g.node_count();
  s.edge_count = g.edge_count();
  if (s.node_count == 0) return s;
  std::size_t mx = 0, mn = SIZE_MAX, total = 0;
  for (const Node& n : g.nodes()) {
    std::size_t d = g.out_edges(n.id).size() + g.in_edges(n.id).size();
    mx = std::max(mx, d);
    mn = std::min(mn, d);
    total += d;
  }
  s.max_degree = mx;
  s.min_degree = mn;
  s.avg_degree = static_cast<double>(total) / static_cast<double>(s.node_count);
  return s;
}

}  // namespace graphopt

#endif
