#ifndef GRAPHOPT_AGGREGATE_HPP
#define GRAPHOPT_AGGREGATE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "graphopt/ast.hpp"
#include "graphopt/backend.hpp"
#include "graphopt/kv.hpp"
#include "graphopt/table.hpp"

namespace graphopt {

struct exec_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* One surviving structural match: variable bindings, a per-row attribute
 * cache (eagerly filled by the naive engine, lazily by the optimized one)
 * and any shortest paths computed for the row. */
struct MatchRow {
  std::map<std::string, ElemRef> bind;
  std::map<std::pair<std::string, std::string>, std::optional<PropertyValue>> attrs;
  std::map<std::pair<std::string, std::string>, std::optional<std::vector<NodeId>>>
      paths;
  /* (chain, position) -> node id, so anonymous patterns stay addressable
   * while a chain is being expanded. Matching bookkeeping only; result
   * assembly never reads it. */
  std::map<std::pair<std::size_t, std::size_t>, NodeId> pos_bind;
};

/* Where result-assembly attribute reads go. Pairs absent from the map read
 * from the graph; pairs mapped true read from the key-value store. */
using AttrSourceMap = std::map<std::pair<std::string, std::string>, bool>;

namespace detail {

/* Memoized per-row attribute read. cache_only is the naive contract: the
 * eager policy already fetched (and paid for) everything the query names,
 * so a miss here is an engine bug, not a data condition. */
inline std::optional<PropertyValue> resolve_attr(MatchRow& row, const std::string& var,
                                                 const std::string& key,
                                                 Backend& backend, const KVStore* kv,
                                                 const AttrSourceMap& sources,
                                                 bool cache_only) {
  const std::pair<std::string, std::string> at{var, key};
  auto hit = row.attrs.find(at);
  if (hit != row.attrs.end()) return hit->second;
  if (cache_only)
    throw exec_error("internal: attribute " + var + "." + key +
                     " missing from eager row cache");
  auto bind = row.bind.find(var);
  if (bind == row.bind.end())
    throw exec_error("internal: unbound variable " + var + " at result assembly");
  std::optional<PropertyValue> value;
  auto src = sources.find(at);
  if (src != sources.end() && src->second) {
    if (!kv) throw kv_error("result assembly needs a key-value store for " + var +
                            "." + key);
    value = kv->kv_get(bind->second.id, key);
  } else {
    value = backend.get_attribute(bind->second, key);
  }
  row.attrs.emplace(at, value);
  return value;
}

inline Cell cell_of_binding(const ElemRef& ref) {
  if (ref.kind == ElemRef::node) return NodeRefCell{ref.id};
  return EdgeRefCell{ref.id};
}

inline std::string column_name(const ReturnItem& item) {
  if (item.alias) return *item.alias;
  ReturnItem bare{item.what, std::nullopt};
  return print_return_item(bare);
}

/* Order comparator pieces: a missing key sorts last ascending and first
 * descending; equal keys fall back to the canonical ascending row order,
 * regardless of direction, so LIMIT prefixes are deterministic. */
inline int order_key_compare(const std::optional<Cell>& a,
                             const std::optional<Cell>& b, bool descending) {
  const bool a_null = !a || std::holds_alternative<std::monostate>(*a);
  const bool b_null = !b || std::holds_alternative<std::monostate>(*b);
  if (a_null || b_null) {
    if (a_null && b_null) return 0;
    const int miss = descending ? -1 : 1;  // missing last in ASC, first in DESC
    return a_null ? miss : -miss;
  }
  int c = cell_compare(*a, *b);
  return descending ? -c : c;
}

}  // namespace detail

/* Client-side "first by attribute": one attribute resolution per input row,
 * minimum wins (maximum when descending); ties break by the canonical
 * ascending row order, so equal keys yield the lower id in the first
 * column. An unresolvable key is an error naming the row. */
inline ResultTable client_first_by(
    const ResultTable& rows,
    const std::function<std::optional<PropertyValue>(const Row&)>& resolve_key,
    bool descending = false) {
  ResultTable out;
  out.columns = rows.columns;
  if (rows.rows.empty()) return out;
  const Row* best = nullptr;
  std::optional<Cell> best_key;
  for (const Row& row : rows.rows) {
    std::optional<PropertyValue> v = resolve_key(row);  // exactly one per row
    if (!v)
      throw exec_error("first-by key unresolvable for row " +
                       (row.empty() ? std::string("<empty>") : cell_repr(row[0])));
    Cell key = *v;
    if (!best || detail::order_key_compare(key, best_key, descending) < 0 ||
        (detail::order_key_compare(key, best_key, descending) == 0 &&
         row_compare(row, *best) < 0)) {
      best = &row;
      best_key = key;
    }
  }
  out.rows.push_back(*best);
  return out;
}

/* Full result assembly: project items per match row, group when count() is
 * present (count = group size), apply DISTINCT, order, always finish with a
 * canonical sort and the deterministic tie-break, then LIMIT.
 *
 * Attribute reads happen once per input row for projected attributes and
 * once per output row for an ORDER BY key that is not already a column;
 * under cache_only (the naive engine) every read must hit the row cache. */
inline ResultTable apply_return(const Query& q, std::vector<MatchRow>& rows,
                                Backend& backend, const KVStore* kv,
                                const AttrSourceMap& sources, bool cache_only) {
  auto resolve = [&](MatchRow& row, const std::string& var, const std::string& key) {
    return detail::resolve_attr(row, var, key, backend, kv, sources, cache_only);
  };

  ResultTable table;
  for (const auto& item : q.ret.items)
    table.columns.push_back(detail::column_name(item));

  // project per input row; count() cells are placeholders until grouping
  struct Projected {
    Row cells;
    MatchRow* origin;
  };
  std::vector<Projected> projected;
  projected.reserve(rows.size());
  for (MatchRow& row : rows) {
    Row cells;
    cells.reserve(q.ret.items.size());
    for (const auto& item : q.ret.items) {
      if (const auto* v = std::get_if<ReturnVar>(&item.what)) {
        cells.push_back(detail::cell_of_binding(row.bind.at(v->var)));
      } else if (const auto* a = std::get_if<ReturnAttr>(&item.what)) {
        auto val = resolve(row, a->var, a->key);
        cells.push_back(val ? Cell(*val) : Cell(std::monostate{}));
      } else if (std::holds_alternative<ReturnCount>(item.what)) {
        cells.push_back(std::monostate{});
      } else {
        const auto& sp = std::get<ReturnShortestPath>(item.what);
        const auto& path = row.paths.at({sp.from, sp.to});
        cells.push_back(path ? Cell(PathCell{*path}) : Cell(std::monostate{}));
      }
    }
    projected.push_back({std::move(cells), &row});
  }

  // group on non-count cells when aggregating; first appearance order
  struct OutRow {
    Row cells;
    MatchRow* rep;
  };
  std::vector<OutRow> out_rows;
  if (q.has_aggregate()) {
    std::vector<std::size_t> key_cols, count_cols;
    for (std::size_t i = 0; i < q.ret.items.size(); ++i)
      (std::holds_alternative<ReturnCount>(q.ret.items[i].what) ? count_cols
                                                                : key_cols)
          .push_back(i);
    std::map<std::string, std::size_t> group_of;  // serialized key -> out index
    std::vector<std::uint64_t> sizes;
    for (Projected& p : projected) {
      std::string key;
      for (std::size_t i : key_cols) key += cell_repr(p.cells[i]) + '\x1f';
      auto [it, fresh] = group_of.emplace(key, out_rows.size());
      if (fresh) {
        out_rows.push_back({p.cells, p.origin});
        sizes.push_back(0);
      }
      ++sizes[it->second];
    }
    for (std::size_t g = 0; g < out_rows.size(); ++g)
      for (std::size_t i : count_cols)
        out_rows[g].cells[i] = PropertyValue(static_cast<std::int64_t>(sizes[g]));
  } else {
    out_rows.reserve(projected.size());
    for (Projected& p : projected) out_rows.push_back({std::move(p.cells), p.origin});
  }

  if (q.ret.distinct) {
    std::set<std::string> seen;
    std::vector<OutRow> unique;
    for (OutRow& r : out_rows) {
      std::string key;
      for (const Cell& c : r.cells) key += cell_repr(c) + '\x1f';
      if (seen.insert(key).second) unique.push_back(std::move(r));
    }
    out_rows = std::move(unique);
  }

  // attach the order key to each output row
  std::vector<std::optional<Cell>> keys(out_rows.size());
  bool descending = false;
  if (q.ret.order_by) {
    descending = q.ret.order_by->descending;
    if (std::holds_alternative<ReturnCount>(q.ret.order_by->key)) {
      // every count() cell in a row carries the same group size
      std::size_t col = 0;
      for (std::size_t i = 0; i < q.ret.items.size(); ++i)
        if (std::holds_alternative<ReturnCount>(q.ret.items[i].what)) col = i;
      for (std::size_t r = 0; r < out_rows.size(); ++r)
        keys[r] = out_rows[r].cells[col];
    } else {
      const auto& attr = std::get<ReturnAttr>(q.ret.order_by->key);
      std::optional<std::size_t> col;
      for (std::size_t i = 0; i < q.ret.items.size(); ++i)
        if (const auto* a = std::get_if<ReturnAttr>(&q.ret.items[i].what))
          if (a->var == attr.var && a->key == attr.key && !col) col = i;
      for (std::size_t r = 0; r < out_rows.size(); ++r) {
        if (col) {
          keys[r] = out_rows[r].cells[*col];
        } else {
          auto v = resolve(*out_rows[r].rep, attr.var, attr.key);
          keys[r] = v ? Cell(*v) : Cell(std::monostate{});
        }
      }
    }
  }

  std::vector<std::size_t> idx(out_rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (q.ret.order_by) {
      int c = detail::order_key_compare(keys[a], keys[b], descending);
      if (c) return c < 0;
    }
    return row_compare(out_rows[a].cells, out_rows[b].cells) < 0;
  });

  std::size_t take = idx.size();
  if (q.ret.limit && *q.ret.limit < take) take = *q.ret.limit;
  table.rows.reserve(take);
  for (std::size_t i = 0; i < take; ++i)
    table.rows.push_back(std::move(out_rows[idx[i]].cells));
  return table;
}

}  // namespace graphopt

#endif
