#ifndef GRAPHOPT_CLASSIFY_HPP
#define GRAPHOPT_CLASSIFY_HPP

#include <set>
#include <string>
#include <utility>

#include "graphopt/ast.hpp"

namespace graphopt {

/* Structural taxonomy for the query subset, plus the workload-facing
 * criteria the optimizer keys off: whether there is an index entry point,
 * and how many distinct attribute reads the query implies. */

enum class QueryScope { local, local_and_global };

enum class QueryCategory {
  adjacency,
  reachability_fixed_length,
  reachability_regular_simple_path,
  reachability_shortest_path,
  pattern_cq,
  pattern_rpq,
  pattern_crpq,
  pattern_ecrpq,
  summarization,
};

inline const char* to_string(QueryScope s) {
  return s == QueryScope::local ? "local" : "local_and_global";
}

inline const char* to_string(QueryCategory c) {
  switch (c) {
    case QueryCategory::adjacency: return "adjacency";
    case QueryCategory::reachability_fixed_length: return "reachability/fixed-length";
    case QueryCategory::reachability_regular_simple_path:
      return "reachability/regular-simple-path";
    case QueryCategory::reachability_shortest_path:
      return "reachability/shortest-path";
    case QueryCategory::pattern_cq: return "pattern/CQ";
    case QueryCategory::pattern_rpq: return "pattern/RPQ";
    case QueryCategory::pattern_crpq: return "pattern/CRPQ";
    case QueryCategory::pattern_ecrpq: return "pattern/ECRPQ";
    case QueryCategory::summarization: return "summarization";
  }
  return "?";
}

struct QueryClassification {
  QueryScope scope = QueryScope::local;
  QueryCategory category = QueryCategory::pattern_cq;
  bool has_entry_point = false;
  std::size_t attribute_access_count = 0;       // distinct (variable, key) reads
  std::set<std::string> node_labels;
  std::set<std::string> edge_types;
  std::set<std::string> attribute_datatypes;    // variants of literal filters

  friend bool operator==(const QueryClassification&,
                         const QueryClassification&) = default;
};

inline QueryClassification classify(const Query& q) {
  QueryClassification c;

  std::set<std::pair<std::string, std::string>> reads;
  auto note_filters = [&](const std::optional<std::string>& var,
                          const std::vector<PropFilter>& filters) {
    for (const PropFilter& f : filters) {
      if (var) reads.insert({*var, f.key});
      if (const auto* lit = std::get_if<PropertyValue>(&f.value))
        c.attribute_datatypes.insert(variant_name(*lit));
      else {
        const auto& ref = std::get<CrossRef>(f.value);
        reads.insert({ref.var, ref.key});
      }
    }
  };

  bool var_reuse = false;
  bool cross_ref = false;
  std::set<std::string> seen_vars;
  auto note_var = [&](const std::optional<std::string>& var) {
    if (var && !seen_vars.insert(*var).second) var_reuse = true;
  };

  for (const Chain& chain : q.chains) {
    for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
      const NodePattern& n = chain.nodes[i];
      if (n.label) c.node_labels.insert(*n.label);
      note_var(n.var);
      note_filters(n.var, n.filters);
      for (const PropFilter& f : n.filters)
        if (std::holds_alternative<CrossRef>(f.value)) cross_ref = true;
      if (n.label)
        for (const PropFilter& f : n.filters)
          if (std::holds_alternative<PropertyValue>(f.value))
            c.has_entry_point = true;  // literal equality over an indexed (label, key)
      if (i > 0) {
        const RelPattern& r = chain.rels[i - 1];
        if (r.type) c.edge_types.insert(*r.type);
        note_var(r.var);
        note_filters(r.var, r.filters);
        for (const PropFilter& f : r.filters)
          if (std::holds_alternative<CrossRef>(f.value)) cross_ref = true;
      }
    }
  }

  for (const auto& item : q.ret.items)
    if (const auto* attr = std::get_if<ReturnAttr>(&item.what))
      reads.insert({attr->var, attr->key});
  if (q.ret.order_by)
    if (const auto* attr = std::get_if<ReturnAttr>(&q.ret.order_by->key))
      reads.insert({attr->var, attr->key});
  c.attribute_access_count = reads.size();

  // Category decision. shortestPath dominates; then chain structure.
  bool aggregates_only = !q.ret.items.empty();
  for (const auto& item : q.ret.items)
    if (!std::holds_alternative<ReturnCount>(item.what)) aggregates_only = false;
  const bool trivial_pattern =
      q.chains.size() == 1 && q.chains[0].nodes.size() <= 2;

  if (q.has_shortest_path()) {
    c.category = QueryCategory::reachability_shortest_path;
    c.scope = QueryScope::local_and_global;
  } else if (aggregates_only && trivial_pattern) {
    c.category = QueryCategory::summarization;
    c.scope = QueryScope::local_and_global;
  } else if (var_reuse || cross_ref) {
    // joins across chains (shared variables or cross-references) lift a
    // conjunctive pattern into the conjunctive-regular class
    c.category = QueryCategory::pattern_crpq;
    c.scope = QueryScope::local;
  } else {
    c.category = QueryCategory::pattern_cq;
    c.scope = QueryScope::local;
  }
  return c;
}

}  // namespace graphopt

#endif
