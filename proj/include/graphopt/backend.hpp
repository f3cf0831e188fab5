#ifndef GRAPHOPT_BACKEND_HPP
#define GRAPHOPT_BACKEND_HPP

#include <atomic>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphopt/graph.hpp"
#include "graphopt/value.hpp"

namespace graphopt {

enum class Direction { out, in, both };

/* Plain value snapshot of the counters; supports arithmetic so per-run
 * deltas fall out of two reads. */
struct CounterSnapshot {
  std::uint64_t node_lookup = 0;
  std::uint64_t index_lookup = 0;
  std::uint64_t neighbours = 0;
  std::uint64_t attribute_access = 0;
  std::uint64_t edges_between = 0;
  std::uint64_t rows_transferred = 0;
  std::uint64_t kv_lookup = 0;

  friend bool operator==(const CounterSnapshot&, const CounterSnapshot&) = default;

  CounterSnapshot& operator+=(const CounterSnapshot& o) {
    node_lookup += o.node_lookup;
    index_lookup += o.index_lookup;
    neighbours += o.neighbours;
    attribute_access += o.attribute_access;
    edges_between += o.edges_between;
    rows_transferred += o.rows_transferred;
    kv_lookup += o.kv_lookup;
    return *this;
  }
  friend CounterSnapshot operator+(CounterSnapshot a, const CounterSnapshot& b) {
    return a += b;
  }
  friend CounterSnapshot operator-(const CounterSnapshot& a,
                                   const CounterSnapshot& b) {
    CounterSnapshot d;
    d.node_lookup = a.node_lookup - b.node_lookup;
    d.index_lookup = a.index_lookup - b.index_lookup;
    d.neighbours = a.neighbours - b.neighbours;
    d.attribute_access = a.attribute_access - b.attribute_access;
    d.edges_between = a.edges_between - b.edges_between;
    d.rows_transferred = a.rows_transferred - b.rows_transferred;
    d.kv_lookup = a.kv_lookup - b.kv_lookup;
    return d;
  }
};

/* Monotonic per-operation tallies. Increments are atomic so concurrent
 * readers never lose counts; there is no reset, callers diff snapshots. */
class ElementaryCounter {
 public:
  void count_node_lookup() { node_lookup_.fetch_add(1, std::memory_order_relaxed); }
  void count_index_lookup() { index_lookup_.fetch_add(1, std::memory_order_relaxed); }
  void count_neighbours() { neighbours_.fetch_add(1, std::memory_order_relaxed); }
  void count_attribute_access() {
    attribute_access_.fetch_add(1, std::memory_order_relaxed);
  }
  void count_edges_between() { edges_between_.fetch_add(1, std::memory_order_relaxed); }
  void count_rows(std::uint64_t n) {
    rows_transferred_.fetch_add(n, std::memory_order_relaxed);
  }
  void count_kv_lookup() { kv_lookup_.fetch_add(1, std::memory_order_relaxed); }

  CounterSnapshot snapshot() const {
    CounterSnapshot s;
    s.node_lookup = node_lookup_.load(std::memory_order_relaxed);
    s.index_lookup = index_lookup_.load(std::memory_order_relaxed);
    s.neighbours = neighbours_.load(std::memory_order_relaxed);
    s.attribute_access = attribute_access_.load(std::memory_order_relaxed);
    s.edges_between = edges_between_.load(std::memory_order_relaxed);
    s.rows_transferred = rows_transferred_.load(std::memory_order_relaxed);
    s.kv_lookup = kv_lookup_.load(std::memory_order_relaxed);
    return s;
  }

 private:
  std::atomic<std::uint64_t> node_lookup_{0};
  std::atomic<std::uint64_t> index_lookup_{0};
  std::atomic<std::uint64_t> neighbours_{0};
  std::atomic<std::uint64_t> attribute_access_{0};
  std::atomic<std::uint64_t> edges_between_{0};
  std::atomic<std::uint64_t> rows_transferred_{0};
  std::atomic<std::uint64_t> kv_lookup_{0};
};

/* Latency model in microseconds per primitive plus a per-row transfer
 * charge. Defaults follow the round-trip profile the engine is tuned
 * against; any value can be overridden from a JSON config. The key-value
 * path must stay cheaper than an attribute access, that inequality is the
 * whole point of offloading, so loads assert it. */
struct CostModel {
  double node_lookup_us = 50.0;
  double index_lookup_us = 200.0;
  double neighbours_us = 100.0;
  double attribute_access_us = 150.0;
  double edges_between_us = 100.0;
  double row_transfer_us = 5.0;
  double kv_lookup_us = 20.0;

  friend bool operator==(const CostModel&, const CostModel&) = default;

  void validate() const {
    const double vals[] = {node_lookup_us,   index_lookup_us, neighbours_us,
                           attribute_access_us, edges_between_us, row_transfer_us,
                           kv_lookup_us};
    for (double v : vals)
      if (!(v >= 0.0)) throw config_error("cost model latencies must be >= 0");
    if (!(kv_lookup_us < attribute_access_us))
      throw config_error("cost model requires kv_lookup_us < attribute_access_us");
  }
};

inline CostModel cost_model_from_json(const nlohmann::json& j) {
  CostModel m;
  static const std::pair<const char*, double CostModel::*> keys[] = {
      {"node_lookup_us", &CostModel::node_lookup_us},
      {"index_lookup_us", &CostModel::index_lookup_us},
      {"neighbours_us", &CostModel::neighbours_us},
      {"attribute_access_us", &CostModel::attribute_access_us},
      {"edges_between_us", &CostModel::edges_between_us},
      {"row_transfer_us", &CostModel::row_transfer_us},
      {"kv_lookup_us", &CostModel::kv_lookup_us},
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& [name, field] : keys)
      if (it.key() == name) {
        if (!it.value().is_number())
          throw config_error("cost model key " + it.key() + " must be a number");
        m.*field = it.value().get<double>();
        known = true;
        break;
      }
    if (!known) throw config_error("unknown cost model key " + it.key());
  }
  m.validate();
  return m;
}

inline CostModel load_cost_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open cost model " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("cost model " + path + ": " + e.what());
  }
  return cost_model_from_json(j);
}

/* modeled cost = dot(counts, latencies) + rows * row_transfer. Linear in
 * the counters by construction. */
inline double modeled_cost(const CounterSnapshot& c, const CostModel& m) {
  return static_cast<double>(c.node_lookup) * m.node_lookup_us +
         static_cast<double>(c.index_lookup) * m.index_lookup_us +
         static_cast<double>(c.neighbours) * m.neighbours_us +
         static_cast<double>(c.attribute_access) * m.attribute_access_us +
         static_cast<double>(c.edges_between) * m.edges_between_us +
         static_cast<double>(c.rows_transferred) * m.row_transfer_us +
         static_cast<double>(c.kv_lookup) * m.kv_lookup_us;
}

/* Node or edge reference for attribute reads; the two id spaces overlap. */
struct ElemRef {
  enum Kind { node, edge } kind = node;
  std::uint64_t id = 0;

  friend bool operator==(const ElemRef&, const ElemRef&) = default;
  static ElemRef of_node(NodeId id) { return {node, id}; }
  static ElemRef of_edge(EdgeId id) { return {edge, id}; }
};

/* The elementary query boundary. Every piece of graph access an executor
 * performs goes through one of these five calls, each bumping its counter:
 *
 *   get_node       node_lookup + 1
 *   find_nodes     index_lookup + 1, rows += result size
 *   get_neighbours neighbours   + 1, rows += result size
 *   get_attribute  attribute_access + 1
 *   edges_between  edges_between + 1
 *
 * Labels and edge types are not attributes: they live in the primary node
 * and edge records and travel with the ids, so node_labels/edge_type_of
 * are free structural peeks. Attributes are the thing that costs.
 *
 * No operation mutates the graph; identical calls return identical results.
 */
class Backend {
 public:
  Backend(const PropertyGraph& g, CostModel model = {})
      : graph_(g), model_(model) {
    model_.validate();
    if (!g.frozen()) throw graph_error("backend requires a frozen graph");
  }

  const PropertyGraph& graph() const { return graph_; }
  const CostModel& model() const { return model_; }
  ElementaryCounter& counter() { return counter_; }
  CounterSnapshot snapshot() const { return counter_.snapshot(); }
  double modeled_us(const CounterSnapshot& delta) const {
    return modeled_cost(delta, model_);
  }

  /* Unknown node id is an error, distinct from any empty result. */
  const Node& get_node(NodeId id) {
    counter_.count_node_lookup();
    return graph_.node(id);  // throws graph_error on unknown id
  }

  /* Index lookup. With key/value: exact (label, key, value) matches.
   * Without: every node carrying the label (the degenerate index). Unknown
   * labels/keys/values give the empty list. */
  std::vector<NodeId> find_nodes(const std::string& label,
                                 const std::optional<std::string>& key = {},
                                 const std::optional<PropertyValue>& value = {}) {
    counter_.count_index_lookup();
    if (key.has_value() != value.has_value())
      throw graph_error("find_nodes: key and value must be given together");
    const std::vector<NodeId>& hits =
        key ? graph_.nodes_with(label, *key, *value) : graph_.nodes_labeled(label);
    counter_.count_rows(hits.size());
    return hits;
  }

  struct Neighbour {
    EdgeId edge;
    NodeId other;
  };

  /* Adjacency of a known node, optionally filtered by edge type. Direction
   * both returns the out list then the in list; a self-loop shows up once
   * per stored edge per direction it matches. Unknown node id is an error,
   * distinct from an isolated node's empty list. */
  std::vector<Neighbour> get_neighbours(NodeId id, Direction dir = Direction::both,
                                        const std::optional<std::string>& edge_type = {}) {
    counter_.count_neighbours();
    if (!graph_.has_node(id))
      throw graph_error("get_neighbours: unknown node id " + std::to_string(id));
    std::vector<Neighbour> result;
    auto take = [&](const std::vector<PropertyGraph::Adjacent>& adj) {
      for (const auto& a : adj)
        if (!edge_type || graph_.edge(a.edge).type == *edge_type)
          result.push_back({a.edge, a.other});
    };
    if (dir == Direction::out || dir == Direction::both) take(graph_.out_edges(id));
    if (dir == Direction::in || dir == Direction::both) take(graph_.in_edges(id));
    counter_.count_rows(result.size());
    return result;
  }

  /* Single attribute read. Missing key on a known element is a legitimate
   * empty answer; unknown element id is an error. */
  std::optional<PropertyValue> get_attribute(ElemRef ref, const std::string& key) {
    counter_.count_attribute_access();
    const auto& props = ref.kind == ElemRef::node ? graph_.node(ref.id).props
                                                  : graph_.edge(ref.id).props;
    auto it = props.find(key);
    if (it == props.end()) return std::nullopt;
    return it->second;
  }

  /* All directed edges a -> b, optionally type-filtered, in insertion
   * order. Either endpoint unknown is an error. */
  std::vector<Edge> edges_between(NodeId a, NodeId b,
                                  const std::optional<std::string>& edge_type = {}) {
    counter_.count_edges_between();
    if (!graph_.has_node(a))
      throw graph_error("edges_between: unknown node id " + std::to_string(a));
    if (!graph_.has_node(b))
      throw graph_error("edges_between: unknown node id " + std::to_string(b));
    std::vector<Edge> result;
    for (const auto& adj : graph_.out_edges(a))
      if (adj.other == b) {
        const Edge& e = graph_.edge(adj.edge);
        if (!edge_type || e.type == *edge_type) result.push_back(e);
      }
    return result;
  }

  /* Free structural peeks; see the class comment. */
  const std::vector<std::string>& node_labels(NodeId id) const {
    return graph_.node(id).labels;
  }
  bool node_has_label(NodeId id, const std::string& label) const {
    return graph_.node(id).has_label(label);
  }
  const std::string& edge_type_of(EdgeId id) const { return graph_.edge(id).type; }

  /* Planner statistics (index cardinalities), uncounted. */
  std::size_t stat_index_count(const std::string& label, const std::string& key,
                               const PropertyValue& value) const {
    return graph_.index_count(label, key, value);
  }
  std::size_t stat_label_count(const std::string& label) const {
    return graph_.nodes_labeled(label).size();
  }

 private:
  const PropertyGraph& graph_;
  CostModel model_;
  ElementaryCounter counter_;
};

}  // namespace graphopt

#endif
