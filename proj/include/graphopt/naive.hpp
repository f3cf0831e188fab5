#ifndef GRAPHOPT_NAIVE_HPP
#define GRAPHOPT_NAIVE_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphopt/aggregate.hpp"
#include "graphopt/ast.hpp"
#include "graphopt/backend.hpp"
#include "graphopt/path.hpp"
#include "graphopt/schedule.hpp"
#include "graphopt/table.hpp"

namespace graphopt {

struct ExecOutcome {
  ResultTable table;
  CounterSnapshot counters;  // delta attributable to this execution
  double modeled_us = 0.0;
};

namespace detail {

/* Fragment of attribute values fetched for one candidate element. Values
 * are read through get_attribute even when a transport record (an Edge from
 * edges_between) happens to carry them: attribute reads are the priced
 * operation, and no engine gets to bypass the meter. */
using AttrFragment = std::map<std::string, std::optional<PropertyValue>>;

inline AttrFragment fetch_fragment(Backend& b, ElemRef ref,
                                   const std::set<std::string>& keys) {
  AttrFragment out;
  for (const std::string& k : keys) out.emplace(k, b.get_attribute(ref, k));
  return out;
}

inline bool literal_filters_pass(const std::vector<PropFilter>& filters,
                                 const AttrFragment& values) {
  for (const PropFilter& f : filters) {
    const auto* lit = std::get_if<PropertyValue>(&f.value);
    if (!lit) continue;
    auto it = values.find(f.key);
    if (it == values.end() || !it->second || !value_equal(*it->second, *lit))
      return false;
  }
  return true;
}

/* Cross-reference filters compare the candidate's fetched value with the
 * source variable's cached value; either side absent fails the match. */
inline bool ref_filters_pass(const std::vector<PropFilter>& filters,
                             const AttrFragment& values, const MatchRow& row) {
  for (const PropFilter& f : filters) {
    const auto* ref = std::get_if<CrossRef>(&f.value);
    if (!ref) continue;
    auto own = values.find(f.key);
    if (own == values.end() || !own->second) return false;
    auto src = row.attrs.find({ref->var, ref->key});
    if (src == row.attrs.end() || !src->second) return false;
    if (!value_equal(*own->second, *src->second)) return false;
  }
  return true;
}

inline void merge_fragment(MatchRow& row, const std::string& var,
                           const AttrFragment& values) {
  for (const auto& [k, v] : values) row.attrs[{var, k}] = v;
}

/* The naive policy, in one engine: eager attribute materialization at every
 * fresh candidate binding event (discarded candidates included), index use
 * only for plan-time literals, disconnected sub-patterns materialized once
 * and re-filtered per outer row, cross-references never pushed into the
 * index, and the weight-probing built-in for shortest paths. */
class NaiveEngine {
 public:
  NaiveEngine(const Query& q, Backend& b)
      : q_(q), b_(b), attrs_(analyze_attrs(q)), schedule_(build_schedule(q, b)) {}

  ResultTable run() {
    std::vector<MatchRow> rows(1);
    for (const ChainSchedule& cs : schedule_.chains) rows = eval_chain(cs, rows);
    attach_paths(rows);
    return apply_return(q_, rows, b_, nullptr, {}, /*cache_only=*/true);
  }

 private:
  struct WorkRow {
    MatchRow row;
    std::vector<std::optional<NodeId>> pos_id;  // bindings by chain position
  };
  struct SeedCandidate {
    NodeId id;
    AttrFragment values;
  };

  std::vector<MatchRow> eval_chain(const ChainSchedule& cs,
                                   std::vector<MatchRow>& in_rows) {
    const Chain& chain = q_.chains[cs.chain];
    const NodePattern& anchor = chain.nodes[cs.seed.pos];

    std::vector<WorkRow> work;
    if (cs.seed.mode == SeedMode::bound_anchor) {
      for (MatchRow& row : in_rows) {
        NodeId id = row.bind.at(*anchor.var).id;
        if (anchor.label && !b_.node_has_label(id, *anchor.label)) continue;
        if (!bound_filters_pass(anchor, row)) continue;
        WorkRow w{std::move(row), {}};
        w.pos_id.assign(chain.nodes.size(), std::nullopt);
        w.pos_id[cs.seed.pos] = id;
        work.push_back(std::move(w));
      }
    } else {
      // one materialized scan per disconnected sub-pattern, reused across
      // outer rows; cross-reference filters re-apply per row
      const std::vector<SeedCandidate>* candidates = nullptr;
      for (MatchRow& row : in_rows) {
        if (!candidates) candidates = &materialize_seed(cs.seed, anchor);
        for (const SeedCandidate& cand : *candidates) {
          if (!ref_filters_pass(anchor.filters, cand.values, row)) continue;
          WorkRow w;
          w.row = row;
          if (anchor.var) {
            w.row.bind[*anchor.var] = ElemRef::of_node(cand.id);
            merge_fragment(w.row, *anchor.var, cand.values);
          }
          w.pos_id.assign(chain.nodes.size(), std::nullopt);
          w.pos_id[cs.seed.pos] = cand.id;
          work.push_back(std::move(w));
        }
      }
    }

    for (const ExpandSpec& step : cs.steps) work = expand(chain, step, work);

    std::vector<MatchRow> out;
    out.reserve(work.size());
    for (WorkRow& w : work) out.push_back(std::move(w.row));
    return out;
  }

  /* Filters of a re-binding occurrence check against already-cached values;
   * a repeat binding of a bound variable is not a fresh candidate event, so
   * nothing new is fetched. */
  bool bound_filters_pass(const NodePattern& pat, const MatchRow& row) {
    for (const PropFilter& f : pat.filters) {
      auto own = row.attrs.find({*pat.var, f.key});
      if (own == row.attrs.end() || !own->second) return false;
      if (const auto* lit = std::get_if<PropertyValue>(&f.value)) {
        if (!value_equal(*own->second, *lit)) return false;
      } else {
        const auto& ref = std::get<CrossRef>(f.value);
        auto src = row.attrs.find({ref.var, ref.key});
        if (src == row.attrs.end() || !src->second) return false;
        if (!value_equal(*own->second, *src->second)) return false;
      }
    }
    return true;
  }

  const std::vector<SeedCandidate>& materialize_seed(const SeedSpec& seed,
                                                     const NodePattern& pat) {
    auto key = std::make_pair(seed.chain, seed.pos);
    auto it = seeds_.find(key);
    if (it != seeds_.end()) return it->second;

    // literal seeds hit the index; a cross-reference has no plan-time value,
    // so its pattern falls back to a label scan filtered after the fact
    std::vector<NodeId> ids =
        seed.mode == SeedMode::index_literal
            ? b_.find_nodes(seed.label, seed.key, seed.value)
            : b_.find_nodes(seed.label);
    std::set<std::string> keys = position_keys(pat.var, pat.filters, attrs_);
    std::vector<SeedCandidate> out;
    for (NodeId id : ids) {
      AttrFragment values = fetch_fragment(b_, ElemRef::of_node(id), keys);
      if (!literal_filters_pass(pat.filters, values)) continue;
      out.push_back({id, std::move(values)});
    }
    return seeds_.emplace(key, std::move(out)).first->second;
  }

  std::vector<WorkRow> expand(const Chain& chain, const ExpandSpec& step,
                              std::vector<WorkRow>& in_work) {
    const RelPattern& rel = chain.rels[step.rel];
    const std::size_t src_pos = step.leftward ? step.rel + 1 : step.rel;
    const std::size_t dst_pos = step.leftward ? step.rel : step.rel + 1;
    const NodePattern& target = chain.nodes[dst_pos];
    const std::set<std::string> rel_keys =
        position_keys(rel.var, rel.filters, attrs_);
    const std::set<std::string> node_keys =
        position_keys(target.var, target.filters, attrs_);

    std::vector<WorkRow> out;
    for (WorkRow& w : in_work) {
      const NodeId src = *w.pos_id[src_pos];
      if (step.target_bound) {
        const NodeId dst = w.row.bind.at(*target.var).id;
        // both endpoints fixed: ask for the edges between them, oriented by
        // the arrow, regardless of travel direction
        const NodeId left_id = step.leftward ? dst : src;
        const NodeId right_id = step.leftward ? src : dst;
        const NodeId edge_from = rel.arrow == Arrow::right ? left_id : right_id;
        const NodeId edge_to = rel.arrow == Arrow::right ? right_id : left_id;
        for (const Edge& e : b_.edges_between(edge_from, edge_to, rel.type)) {
          AttrFragment values = fetch_fragment(b_, ElemRef::of_edge(e.id), rel_keys);
          if (!literal_filters_pass(rel.filters, values)) continue;
          if (!ref_filters_pass(rel.filters, values, w.row)) continue;
          WorkRow nw = w;
          if (rel.var) {
            nw.row.bind[*rel.var] = ElemRef::of_edge(e.id);
            merge_fragment(nw.row, *rel.var, values);
          }
          // the re-binding must still satisfy this occurrence's own label
          // and filters; values come from the row cache, never a new fetch
          if (target.label && !b_.node_has_label(dst, *target.label)) continue;
          if (!bound_filters_pass(target, nw.row)) continue;
          nw.pos_id[dst_pos] = dst;
          out.push_back(std::move(nw));
        }
      } else {
        const Direction dir = step.leftward == (rel.arrow == Arrow::right)
                                  ? Direction::in
                                  : Direction::out;
        for (const auto& nb : b_.get_neighbours(src, dir, rel.type)) {
          AttrFragment rel_values =
              fetch_fragment(b_, ElemRef::of_edge(nb.edge), rel_keys);
          if (!literal_filters_pass(rel.filters, rel_values)) continue;
          if (!ref_filters_pass(rel.filters, rel_values, w.row)) continue;

          AttrFragment node_values =
              fetch_fragment(b_, ElemRef::of_node(nb.other), node_keys);
          if (target.label && !b_.node_has_label(nb.other, *target.label)) continue;
          if (!literal_filters_pass(target.filters, node_values)) continue;
          // node cross-refs may reference the relationship just bound
          WorkRow nw = w;
          if (rel.var) {
            nw.row.bind[*rel.var] = ElemRef::of_edge(nb.edge);
            merge_fragment(nw.row, *rel.var, rel_values);
          }
          if (!ref_filters_pass(target.filters, node_values, nw.row)) continue;
          if (target.var) {
            nw.row.bind[*target.var] = ElemRef::of_node(nb.other);
            merge_fragment(nw.row, *target.var, node_values);
          }
          nw.pos_id[dst_pos] = nb.other;
          out.push_back(std::move(nw));
        }
      }
    }
    return out;
  }

  void attach_paths(std::vector<MatchRow>& rows) {
    if (!q_.has_shortest_path()) return;
    for (MatchRow& row : rows)
      for (const auto& item : q_.ret.items)
        if (const auto* sp = std::get_if<ReturnShortestPath>(&item.what)) {
          std::pair<std::string, std::string> key{sp->from, sp->to};
          if (row.paths.count(key)) continue;
          row.paths[key] = builtin_shortest_path(row.bind.at(sp->from).id,
                                                 row.bind.at(sp->to).id, b_);
        }
  }

  const Query& q_;
  Backend& b_;
  QueryAttrs attrs_;
  Schedule schedule_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<SeedCandidate>> seeds_;
};

}  // namespace detail

/* Approach 1: hand the whole declarative query to the "server" and emulate
 * its observed behavior faithfully, pathologies included. Results are
 * correct; the cost profile is the point. */
inline ExecOutcome execute_naive(const Query& q, Backend& backend) {
  CounterSnapshot before = backend.snapshot();
  detail::NaiveEngine engine(q, backend);
  ExecOutcome out;
  out.table = engine.run();
  out.counters = backend.snapshot() - before;
  out.modeled_us = backend.modeled_us(out.counters);
  return out;
}

}  // namespace graphopt

#endif
