#ifndef GRAPHOPT_AST_HPP
#define GRAPHOPT_AST_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphopt/value.hpp"

namespace graphopt {

/* Query model for the declarative subset: MATCH over chains of node and
 * relationship patterns, plus a RETURN clause with DISTINCT, count(),
 * ORDER BY and LIMIT, and an optional shortestPath(a, b) return item. */

struct CrossRef {
  std::string var;
  std::string key;
  friend bool operator==(const CrossRef&, const CrossRef&) = default;
};

/* Filter values are literals or references to an attribute of a variable
 * bound earlier in the query (`documentID: r.context`). */
using FilterValue = std::variant<PropertyValue, CrossRef>;

struct PropFilter {
  std::string key;
  FilterValue value;
  friend bool operator==(const PropFilter&, const PropFilter&) = default;
};

struct NodePattern {
  std::optional<std::string> var;
  std::optional<std::string> label;
  std::vector<PropFilter> filters;
  friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

enum class Arrow { right, left };  // -[]-> vs <-[]-

struct RelPattern {
  std::optional<std::string> var;
  std::optional<std::string> type;
  std::vector<PropFilter> filters;
  Arrow arrow = Arrow::right;
  friend bool operator==(const RelPattern&, const RelPattern&) = default;
};

/* A chain is n0 (r0) n1 (r1) n2 ...: always one more node than rels. */
struct Chain {
  std::vector<NodePattern> nodes;
  std::vector<RelPattern> rels;
  friend bool operator==(const Chain&, const Chain&) = default;
};

struct ReturnVar {
  std::string var;
  friend bool operator==(const ReturnVar&, const ReturnVar&) = default;
};
struct ReturnAttr {
  std::string var;
  std::string key;
  friend bool operator==(const ReturnAttr&, const ReturnAttr&) = default;
};
struct ReturnCount {
  std::string var;
  friend bool operator==(const ReturnCount&, const ReturnCount&) = default;
};
struct ReturnShortestPath {
  std::string from;
  std::string to;
  friend bool operator==(const ReturnShortestPath&, const ReturnShortestPath&) = default;
};

struct ReturnItem {
  std::variant<ReturnVar, ReturnAttr, ReturnCount, ReturnShortestPath> what;
  std::optional<std::string> alias;
  friend bool operator==(const ReturnItem&, const ReturnItem&) = default;
};

struct OrderKey {
  std::variant<ReturnAttr, ReturnCount> key;  // var.key or count(var)
  bool descending = false;
  friend bool operator==(const OrderKey&, const OrderKey&) = default;
};

struct ReturnClause {
  bool distinct = false;
  std::vector<ReturnItem> items;
  std::optional<OrderKey> order_by;
  std::optional<std::uint64_t> limit;
  friend bool operator==(const ReturnClause&, const ReturnClause&) = default;
};

struct Query {
  std::vector<Chain> chains;
  ReturnClause ret;
  friend bool operator==(const Query&, const Query&) = default;

  bool has_shortest_path() const {
    for (const auto& item : ret.items)
      if (std::holds_alternative<ReturnShortestPath>(item.what)) return true;
    return false;
  }
  bool has_aggregate() const {
    for (const auto& item : ret.items)
      if (std::holds_alternative<ReturnCount>(item.what)) return true;
    return false;
  }
};

/* Canonical text form; parse(print(q)) == q. */
inline std::string print_value_literal(const PropertyValue& v) {
  switch (v.index()) {
    case 0: {
      std::string out = "\"";
      for (char c : std::get<std::string>(v)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case 1: return std::to_string(std::get<std::int64_t>(v));
    case 2: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
      std::string s = buf;
      // keep a float marker so the literal round-trips as a float
      if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
          s.find("inf") == std::string::npos)
        s += ".0";
      return s;
    }
    default: return "date(\"" + format_date(std::get<Date>(v)) + "\")";
  }
}

inline std::string print_filters(const std::vector<PropFilter>& filters) {
  if (filters.empty()) return "";
  std::string out = " {";
  bool first = true;
  for (const auto& f : filters) {
    if (!first) out += ", ";
    first = false;
    out += f.key + ": ";
    if (const auto* lit = std::get_if<PropertyValue>(&f.value))
      out += print_value_literal(*lit);
    else {
      const auto& ref = std::get<CrossRef>(f.value);
      out += ref.var + "." + ref.key;
    }
  }
  return out + "}";
}

inline std::string print_node_pattern(const NodePattern& n) {
  std::string out = "(";
  if (n.var) out += *n.var;
  if (n.label) out += ":" + *n.label;
  out += print_filters(n.filters);
  return out + ")";
}

inline std::string print_rel_pattern(const RelPattern& r) {
  std::string body = "[";
  if (r.var) body += *r.var;
  if (r.type) body += ":" + *r.type;
  body += print_filters(r.filters);
  body += "]";
  return r.arrow == Arrow::right ? "-" + body + "->" : "<-" + body + "-";
}

inline std::string print_return_item(const ReturnItem& item) {
  std::string out;
  if (const auto* v = std::get_if<ReturnVar>(&item.what)) out = v->var;
  else if (const auto* a = std::get_if<ReturnAttr>(&item.what))
    out = a->var + "." + a->key;
  else if (const auto* c = std::get_if<ReturnCount>(&item.what))
    out = "count(" + c->var + ")";
  else {
    const auto& sp = std::get<ReturnShortestPath>(item.what);
    out = "shortestPath(" + sp.from + ", " + sp.to + ")";
  }
  if (item.alias) out += " AS `" + *item.alias + "`";
  return out;
}

inline std::string print_query(const Query& q) {
  std::string out = "MATCH ";
  bool first_chain = true;
  for (const Chain& c : q.chains) {
    if (!first_chain) out += ", ";
    first_chain = false;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      if (i > 0) out += " " + print_rel_pattern(c.rels[i - 1]) + " ";
      out += print_node_pattern(c.nodes[i]);
    }
  }
  out += " RETURN ";
  if (q.ret.distinct) out += "DISTINCT ";
  bool first_item = true;
  for (const auto& item : q.ret.items) {
    if (!first_item) out += ", ";
    first_item = false;
    out += print_return_item(item);
  }
  if (q.ret.order_by) {
    out += " ORDER BY ";
    if (const auto* a = std::get_if<ReturnAttr>(&q.ret.order_by->key))
      out += a->var + "." + a->key;
    else
      out += "count(" + std::get<ReturnCount>(q.ret.order_by->key).var + ")";
    out += q.ret.order_by->descending ? " DESC" : " ASC";
  }
  if (q.ret.limit) out += " LIMIT " + std::to_string(*q.ret.limit);
  return out;
}

}  // namespace graphopt

#endif
