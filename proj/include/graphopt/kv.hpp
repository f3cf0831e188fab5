#ifndef GRAPHOPT_KV_HPP
#define GRAPHOPT_KV_HPP

#include <atomic>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphopt/graph.hpp"
#include "graphopt/jsonl.hpp"
#include "graphopt/value.hpp"

namespace graphopt {

struct kv_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Key-value attribute store: a flat (node id, key) -> value map ingested
 * from the graph ahead of time. Coverage is total per (label, key) pair --
 * a node bearing a covered label always has an entry, an explicit absent
 * marker when the property is missing. That makes "uncovered" (an error)
 * distinguishable from "absent" (a legitimate answer).
 *
 * Lookups bump their own counter; the per-lookup latency lives in the cost
 * model and must stay below the graph's attribute_access latency. */
class KVStore {
 public:
  KVStore() = default;
  // Movable despite the atomic counter; the count travels with the store.
  KVStore(KVStore&& other) noexcept
      : entries_(std::move(other.entries_)),
        coverage_(std::move(other.coverage_)),
        lookups_(other.lookups_.load(std::memory_order_relaxed)) {}
  KVStore& operator=(KVStore&& other) noexcept {
    entries_ = std::move(other.entries_);
    coverage_ = std::move(other.coverage_);
    lookups_.store(other.lookups_.load(std::memory_order_relaxed),
                   std::memory_order_relaxed);
    return *this;
  }

  void insert(NodeId id, const std::string& key,
              std::optional<PropertyValue> value) {
    entries_[{id, key}] = std::move(value);
  }
  void add_coverage(const std::string& label, const std::string& key) {
    coverage_.insert({label, key});
  }

  bool covers(const std::string& label, const std::string& key) const {
    return coverage_.count({label, key}) != 0;
  }
  const std::set<std::pair<std::string, std::string>>& coverage() const {
    return coverage_;
  }
  std::size_t size() const { return entries_.size(); }

  /* Counted lookup. A missing entry means the pair was never ingested:
   * that is a planning bug (coverage should have been checked), not data. */
  std::optional<PropertyValue> kv_get(NodeId id, const std::string& key) const {
    auto it = entries_.find({id, key});
    if (it == entries_.end())
      throw kv_error("kv_get: uncovered (node " + std::to_string(id) + ", key " +
                     key + ")");
    lookups_.fetch_add(1, std::memory_order_relaxed);
    return it->second;
  }

  std::uint64_t lookups() const {
    return lookups_.load(std::memory_order_relaxed);
  }

  template <typename Fn>  // Fn(NodeId, const std::string&, const std::optional<PropertyValue>&)
  void for_each_entry(Fn&& fn) const {
    for (const auto& [ik, value] : entries_) fn(ik.first, ik.second, value);
  }

 private:
  std::map<std::pair<NodeId, std::string>, std::optional<PropertyValue>> entries_;
  std::set<std::pair<std::string, std::string>> coverage_;
  mutable std::atomic<std::uint64_t> lookups_{0};
};

/* Offline ingestion; reads the graph directly (this is ETL, not query
 * execution, so nothing is counted). Every requested (label, key) pair must
 * name a label that exists in the graph. */
inline KVStore build_from_graph(const PropertyGraph& graph,
                                const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) throw kv_error("build_from_graph: no (label, key) pairs");
  KVStore store;
  for (const auto& [label, key] : pairs) {
    const std::vector<NodeId>& ids = graph.nodes_labeled(label);
    if (ids.empty()) throw kv_error("build_from_graph: unknown label " + label);
    for (NodeId id : ids) {
      const auto& props = graph.node(id).props;
      auto it = props.find(key);
      store.insert(id, key,
                   it == props.end() ? std::nullopt
                                     : std::optional<PropertyValue>(it->second));
    }
    store.add_coverage(label, key);
  }
  return store;
}

/* JSONL round-trip: one coverage manifest line, then one line per entry in
 * (node id, key) order. Absent markers serialize as null values. */
inline void save_kv(const KVStore& store, std::ostream& os) {
  nlohmann::json cov = nlohmann::json::array();
  for (const auto& [label, key] : store.coverage())
    cov.push_back(nlohmann::json::array({label, key}));
  os << nlohmann::json{{"kind", "coverage"}, {"pairs", cov}}.dump() << '\n';
  store.for_each_entry([&](NodeId id, const std::string& key,
                           const std::optional<PropertyValue>& value) {
    nlohmann::json line{{"id", id}, {"key", key}};
    line["value"] = value ? detail::value_to_json(*value) : nlohmann::json();
    os << line.dump() << '\n';
  });
}

inline KVStore load_kv(std::istream& is) {
  KVStore store;
  std::string line;
  std::size_t lineno = 0;
  bool saw_coverage = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw kv_error("line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (j.contains("kind") && j["kind"] == "coverage") {
        for (const auto& pair : j.at("pairs"))
          store.add_coverage(pair.at(0).get<std::string>(),
                             pair.at(1).get<std::string>());
        saw_coverage = true;
      } else {
        store.insert(j.at("id").get<NodeId>(), j.at("key").get<std::string>(),
                     j.at("value").is_null()
                         ? std::nullopt
                         : std::optional<PropertyValue>(detail::value_from_json(
                               j.at("value"),
                               "line " + std::to_string(lineno))));
      }
    } catch (const nlohmann::json::exception& e) {
      throw kv_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!saw_coverage) throw kv_error("kv stream has no coverage manifest line");
  return store;
}

inline void save_kv(const KVStore& store, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw kv_error("cannot open " + path + " for writing");
  save_kv(store, os);
}

inline KVStore load_kv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw kv_error("cannot open " + path);
  return load_kv(is);
}

}  // namespace graphopt

#endif
