#ifndef GRAPHOPT_OPTIMIZER_HPP
#define GRAPHOPT_OPTIMIZER_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "graphopt/aggregate.hpp"
#include "graphopt/ast.hpp"
#include "graphopt/backend.hpp"
#include "graphopt/classify.hpp"
#include "graphopt/kv.hpp"
#include "graphopt/naive.hpp"
#include "graphopt/path.hpp"
#include "graphopt/schedule.hpp"

namespace graphopt {

/* The three execution strategies: hand the query to the server as-is; run a
 * client-side algorithm over elementary queries; same, plus key-value
 * offload for result-assembly attributes. */
enum class Strategy { naive, client_algorithm, polyglot };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::naive: return "naive";
    case Strategy::client_algorithm: return "opt1";
    default: return "opt2";
  }
}

inline std::optional<Strategy> parse_strategy(const std::string& name) {
  if (name == "naive") return Strategy::naive;
  if (name == "opt1" || name == "client_algorithm") return Strategy::client_algorithm;
  if (name == "opt2" || name == "polyglot") return Strategy::polyglot;
  return std::nullopt;
}

/* Plan steps. Two plans are equal when their step lists are equal; that is
 * the whole structural story, including where each attribute read resolves
 * (graph or key-value store). */
struct DelegateStep {
  friend bool operator==(const DelegateStep&, const DelegateStep&) = default;
};
struct PrefetchMembershipStep {
  MembershipSpec spec;
  friend bool operator==(const PrefetchMembershipStep&,
                         const PrefetchMembershipStep&) = default;
};
struct EntryLookupStep {
  SeedSpec seed;
  friend bool operator==(const EntryLookupStep&, const EntryLookupStep&) = default;
};
struct LabelScanStep {
  SeedSpec seed;
  friend bool operator==(const LabelScanStep&, const LabelScanStep&) = default;
};
struct IndexSeekByRefStep {
  SeedSpec seed;
  friend bool operator==(const IndexSeekByRefStep&,
                         const IndexSeekByRefStep&) = default;
};
struct ExpandStep {
  ExpandSpec spec;
  friend bool operator==(const ExpandStep&, const ExpandStep&) = default;
};
/* Repeat occurrence of an already-bound variable that carries its own label
 * or filters: nothing binds, but the constraints must still hold. Emitted
 * only when there is something to check. */
struct AnchorCheckStep {
  std::size_t chain = 0;
  std::size_t pos = 0;
  friend bool operator==(const AnchorCheckStep&, const AnchorCheckStep&) = default;
};
struct BfsStep {
  std::string from;
  std::string to;
  friend bool operator==(const BfsStep&, const BfsStep&) = default;
};
struct AttrSource {
  std::string var;
  std::string key;
  bool via_kv = false;
  friend bool operator==(const AttrSource&, const AttrSource&) = default;
  friend bool operator<(const AttrSource& a, const AttrSource& b) {
    return std::tie(a.var, a.key, a.via_kv) < std::tie(b.var, b.key, b.via_kv);
  }
};
/* The one client-side result-assembly step every optimized plan ends with:
 * grouping, distinct, order, limit and projection happen here, never on the
 * server. first_by marks the ORDER BY .. LIMIT 1 shape. */
struct ClientAggregateStep {
  std::string ret_repr;
  bool first_by = false;
  std::vector<AttrSource> sources;
  friend bool operator==(const ClientAggregateStep&,
                         const ClientAggregateStep&) = default;
};

using PlanStep = std::variant<DelegateStep, PrefetchMembershipStep, EntryLookupStep,
                              LabelScanStep, IndexSeekByRefStep, ExpandStep,
                              AnchorCheckStep, BfsStep, ClientAggregateStep>;

struct Plan {
  Query query;
  std::vector<PlanStep> steps;
  friend bool operator==(const Plan& a, const Plan& b) { return a.steps == b.steps; }
};

namespace detail {

inline std::string print_return_clause(const ReturnClause& ret) {
  std::string out;
  if (ret.distinct) out += "DISTINCT ";
  bool first = true;
  for (const auto& item : ret.items) {
    if (!first) out += ", ";
    first = false;
    out += print_return_item(item);
  }
  if (ret.order_by) {
    out += " ORDER BY ";
    if (const auto* a = std::get_if<ReturnAttr>(&ret.order_by->key))
      out += a->var + "." + a->key;
    else
      out += "count(" + std::get<ReturnCount>(ret.order_by->key).var + ")";
    out += ret.order_by->descending ? " DESC" : " ASC";
  }
  if (ret.limit) out += " LIMIT " + std::to_string(*ret.limit);
  return out;
}

inline std::string step_repr(const Query& q, const PlanStep& step) {
  if (std::holds_alternative<DelegateStep>(step)) return "delegate to naive engine";
  if (const auto* p = std::get_if<PrefetchMembershipStep>(&step))
    return "prefetch membership " + p->spec.label + "." + p->spec.key + " = " +
           print_value_literal(p->spec.value);
  if (const auto* e = std::get_if<EntryLookupStep>(&step))
    return "entry lookup " + e->seed.label + "." + e->seed.key + " = " +
           print_value_literal(e->seed.value);
  if (const auto* l = std::get_if<LabelScanStep>(&step))
    return "label scan :" + l->seed.label;
  if (const auto* s = std::get_if<IndexSeekByRefStep>(&step))
    return "index seek " + s->seed.label + "." + s->seed.key + " = " +
           s->seed.ref.var + "." + s->seed.ref.key + " per row";
  if (const auto* x = std::get_if<ExpandStep>(&step)) {
    const RelPattern& rel = q.chains[x->spec.chain].rels[x->spec.rel];
    std::string out = x->spec.target_bound ? "edges between bound endpoints"
                                           : "expand";
    if (rel.type) out += " [:" + *rel.type + "]";
    out += x->spec.leftward ? " leftward" : " rightward";
    return out;
  }
  if (const auto* a = std::get_if<AnchorCheckStep>(&step))
    return "re-check bound " + *q.chains[a->chain].nodes[a->pos].var;
  if (const auto* b = std::get_if<BfsStep>(&step))
    return "graph bfs " + b->from + " -> " + b->to;
  const auto& agg = std::get<ClientAggregateStep>(step);
  std::string out = agg.first_by ? "client first-by: " : "client aggregate: ";
  out += agg.ret_repr;
  for (const AttrSource& s : agg.sources)
    out += std::string("; ") + s.var + "." + s.key + (s.via_kv ? " via kv" : " via graph");
  return out;
}

}  // namespace detail

inline std::string plan_repr(const Plan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.steps.size(); ++i)
    out += std::to_string(i + 1) + ". " + detail::step_repr(plan.query, plan.steps[i]) +
           "\n";
  return out;
}

/* Build the execution plan. naive delegates wholesale; the optimized
 * strategies lower the shared schedule to explicit steps, and polyglot
 * additionally retags result-assembly attribute reads to the key-value
 * store (which must cover them; missing coverage is a planning error
 * naming the gaps). The classification is advisory input from the query
 * taxonomy; the plan shape is derived from the query itself. */
inline Plan plan(const Query& q, Strategy strategy, const QueryClassification& cls,
                 const Backend& backend, const KVStore* kv = nullptr) {
  (void)cls;
  if (strategy == Strategy::naive) return {q, {DelegateStep{}}};

  Schedule schedule = build_schedule(q, backend);
  std::vector<OffloadPair> offload =
      strategy == Strategy::polyglot ? offload_pairs(q) : std::vector<OffloadPair>{};
  if (!offload.empty()) {
    std::string missing;
    for (const OffloadPair& p : offload)
      if (!kv || !kv->covers(p.label, p.key))
        missing += (missing.empty() ? "" : ", ") + p.label + "." + p.key;
    if (!missing.empty())
      throw plan_error("polyglot plan needs key-value coverage for: " + missing);
  }
  std::set<std::pair<std::string, std::string>> offloaded;
  for (const OffloadPair& p : offload) offloaded.insert({p.var, p.key});

  Plan out{q, {}};
  for (const MembershipSpec& m : schedule.prefetch)
    out.steps.push_back(PrefetchMembershipStep{m});
  for (const ChainSchedule& cs : schedule.chains) {
    switch (cs.seed.mode) {
      case SeedMode::bound_anchor: {
        // the row already binds it; a step appears only if this occurrence
        // adds constraints of its own
        const NodePattern& n = q.chains[cs.chain].nodes[cs.seed.pos];
        if (n.label || !n.filters.empty())
          out.steps.push_back(AnchorCheckStep{cs.chain, cs.seed.pos});
        break;
      }
      case SeedMode::index_literal: out.steps.push_back(EntryLookupStep{cs.seed}); break;
      case SeedMode::index_by_ref: out.steps.push_back(IndexSeekByRefStep{cs.seed}); break;
      case SeedMode::label_scan: out.steps.push_back(LabelScanStep{cs.seed}); break;
    }
    for (const ExpandSpec& e : cs.steps) out.steps.push_back(ExpandStep{e});
  }
  std::set<std::pair<std::string, std::string>> seen_pairs;
  for (const auto& item : q.ret.items)
    if (const auto* sp = std::get_if<ReturnShortestPath>(&item.what))
      if (seen_pairs.insert({sp->from, sp->to}).second)
        out.steps.push_back(BfsStep{sp->from, sp->to});

  ClientAggregateStep agg;
  agg.ret_repr = detail::print_return_clause(q.ret);
  agg.first_by = q.ret.order_by && q.ret.limit && *q.ret.limit == 1 &&
                 !q.ret.distinct && !q.has_aggregate();
  std::set<AttrSource> sources;
  for (const auto& item : q.ret.items)
    if (const auto* a = std::get_if<ReturnAttr>(&item.what))
      sources.insert({a->var, a->key, offloaded.count({a->var, a->key}) != 0});
  if (q.ret.order_by)
    if (const auto* a = std::get_if<ReturnAttr>(&q.ret.order_by->key))
      sources.insert({a->var, a->key, offloaded.count({a->var, a->key}) != 0});
  agg.sources.assign(sources.begin(), sources.end());
  out.steps.push_back(std::move(agg));
  return out;
}

namespace detail {

/* Lazy interpreter for optimized plans. Same candidate enumeration order as
 * the naive engine (both come from the shared schedule); the difference is
 * cost policy: free checks first (labels, prefetched membership), attribute
 * fetches only when a filter or the final assembly actually needs the
 * value, memoized so nothing is paid for twice. */
class PlanRunner {
 public:
  PlanRunner(const Plan& plan, Backend& b, const KVStore* kv)
      : plan_(plan), q_(plan.query), b_(b), kv_(kv) {}

  ResultTable run() {
    std::vector<MatchRow> rows(1);
    ResultTable table;
    bool aggregated = false;
    for (const PlanStep& step : plan_.steps) {
      if (std::holds_alternative<DelegateStep>(step)) {
        return execute_naive(q_, b_).table;
      } else if (const auto* p = std::get_if<PrefetchMembershipStep>(&step)) {
        run_prefetch(*p);
      } else if (const auto* e = std::get_if<EntryLookupStep>(&step)) {
        rows = run_seed(e->seed, rows);
      } else if (const auto* l = std::get_if<LabelScanStep>(&step)) {
        rows = run_seed(l->seed, rows);
      } else if (const auto* s = std::get_if<IndexSeekByRefStep>(&step)) {
        rows = run_seek_by_ref(s->seed, rows);
      } else if (const auto* x = std::get_if<ExpandStep>(&step)) {
        rows = run_expand(x->spec, rows);
      } else if (const auto* a = std::get_if<AnchorCheckStep>(&step)) {
        rows = run_anchor_check(*a, rows);
      } else if (const auto* bfs = std::get_if<BfsStep>(&step)) {
        for (MatchRow& row : rows)
          row.paths[{bfs->from, bfs->to}] = graph_bfs_shortest_path(
              row.bind.at(bfs->from).id, row.bind.at(bfs->to).id, b_);
      } else {
        const auto& agg = std::get<ClientAggregateStep>(step);
        AttrSourceMap sources;
        for (const AttrSource& s : agg.sources) {
          sources[{s.var, s.key}] = s.via_kv;
          if (s.via_kv && !kv_)
            throw kv_error("plan resolves " + s.var + "." + s.key +
                           " via kv but no key-value store was supplied");
        }
        table = apply_return(q_, rows, b_, kv_, sources, /*cache_only=*/false);
        aggregated = true;
      }
    }
    if (!aggregated) return ResultTable{};  // zero-step (or headless) plan
    return table;
  }

 private:
  using PosKey = std::pair<std::size_t, std::size_t>;  // (chain, position)

  void run_prefetch(const PrefetchMembershipStep& p) {
    std::unordered_set<NodeId> set;
    for (NodeId id : b_.find_nodes(p.spec.label, p.spec.key, p.spec.value))
      set.insert(id);
    membership_[{p.spec.chain, p.spec.pos}].push_back(std::move(set));
  }

  bool membership_pass(PosKey at, NodeId id) const {
    auto it = membership_.find(at);
    if (it == membership_.end()) return true;
    for (const auto& set : it->second)
      if (!set.count(id)) return false;
    return true;
  }

  std::optional<PropertyValue> row_attr(MatchRow& row, const std::string& var,
                                        const std::string& key) {
    return resolve_attr(row, var, key, b_, nullptr, {}, /*cache_only=*/false);
  }

  /* Label and filters of a repeat occurrence of an already-bound variable.
   * The label peek is free; attribute values resolve through the row cache,
   * paying at most one lazy fetch per (variable, key). */
  bool bound_pattern_pass(const NodePattern& pat, MatchRow& row) {
    const NodeId id = row.bind.at(*pat.var).id;
    if (pat.label && !b_.node_has_label(id, *pat.label)) return false;
    for (const PropFilter& f : pat.filters) {
      auto own = row_attr(row, *pat.var, f.key);
      if (!own) return false;
      if (const auto* lit = std::get_if<PropertyValue>(&f.value)) {
        if (!value_equal(*own, *lit)) return false;
      } else {
        const auto& ref = std::get<CrossRef>(f.value);
        auto src = row_attr(row, ref.var, ref.key);
        if (!src || !value_equal(*own, *src)) return false;
      }
    }
    return true;
  }

  std::vector<MatchRow> run_anchor_check(const AnchorCheckStep& c,
                                         std::vector<MatchRow>& in) {
    const NodePattern& pat = q_.chains[c.chain].nodes[c.pos];
    std::vector<MatchRow> out;
    for (MatchRow& row : in) {
      if (!bound_pattern_pass(pat, row)) continue;
      MatchRow nw = std::move(row);
      nw.pos_bind[{c.chain, c.pos}] = nw.bind.at(*pat.var).id;
      out.push_back(std::move(nw));
    }
    return out;
  }

  /* Evaluate one pattern's filters against a candidate, fetching lazily and
   * short-circuiting. Membership-covered literals are free; every fetched
   * value lands in `fetched` so survivors can keep it. A nullptr memo means
   * fetches are not shared across rows. */
  bool filters_pass(const std::vector<PropFilter>& filters, ElemRef candidate,
                    bool membership_covered, PosKey at, MatchRow& row,
                    AttrFragment& fetched,
                    std::map<std::pair<std::uint64_t, std::string>,
                             std::optional<PropertyValue>>* memo) {
    for (const PropFilter& f : filters) {
      if (const auto* lit = std::get_if<PropertyValue>(&f.value)) {
        if (membership_covered) continue;  // already enforced by the id set
        auto v = fetch_once(candidate, f.key, fetched, memo);
        if (!v || !value_equal(*v, *lit)) return false;
      } else {
        const auto& ref = std::get<CrossRef>(f.value);
        auto own = fetch_once(candidate, f.key, fetched, memo);
        if (!own) return false;
        auto src = row_attr(row, ref.var, ref.key);
        if (!src || !value_equal(*own, *src)) return false;
      }
    }
    (void)at;
    return true;
  }

  std::optional<PropertyValue> fetch_once(
      ElemRef candidate, const std::string& key, AttrFragment& fetched,
      std::map<std::pair<std::uint64_t, std::string>, std::optional<PropertyValue>>*
          memo) {
    auto local = fetched.find(key);
    if (local != fetched.end()) return local->second;
    if (memo) {
      auto m = memo->find({candidate.id, key});
      if (m != memo->end()) {
        fetched.emplace(key, m->second);
        return m->second;
      }
    }
    auto v = b_.get_attribute(candidate, key);
    fetched.emplace(key, v);
    if (memo) memo->emplace(std::make_pair(candidate.id, key), v);
    return v;
  }

  static void keep_values(MatchRow& row, const std::optional<std::string>& var,
                          const AttrFragment& fetched) {
    if (!var) return;
    for (const auto& [k, v] : fetched) row.attrs.emplace(std::make_pair(*var, k), v);
  }

  /* EntryLookup and LabelScan: materialize the id list once, then nested-
   * loop it against the incoming rows. Cross-reference filters (possible on
   * non-entry literal seeds) fetch through a per-step memo so a candidate
   * attribute is read at most once across all rows. */
  std::vector<MatchRow> run_seed(const SeedSpec& seed, std::vector<MatchRow>& in) {
    const NodePattern& pat = q_.chains[seed.chain].nodes[seed.pos];
    std::vector<NodeId> ids = seed.mode == SeedMode::index_literal
                                  ? b_.find_nodes(seed.label, seed.key, seed.value)
                                  : b_.find_nodes(seed.label);
    std::map<std::pair<std::uint64_t, std::string>, std::optional<PropertyValue>> memo;
    const PosKey at{seed.chain, seed.pos};
    std::vector<MatchRow> out;
    for (MatchRow& row : in) {
      for (NodeId id : ids) {
        if (!membership_pass(at, id)) continue;
        AttrFragment fetched;
        MatchRow candidate_row = row;  // filters may consult earlier bindings
        if (!filters_pass(pat.filters, ElemRef::of_node(id),
                          /*membership_covered=*/true, at, candidate_row, fetched,
                          &memo))
          continue;
        if (pat.var) {
          candidate_row.bind[*pat.var] = ElemRef::of_node(id);
          keep_values(candidate_row, pat.var, fetched);
        }
        candidate_row.pos_bind = row.pos_bind;
        candidate_row.pos_bind[at] = id;
        out.push_back(std::move(candidate_row));
      }
    }
    return out;
  }

  std::vector<MatchRow> run_seek_by_ref(const SeedSpec& seed,
                                        std::vector<MatchRow>& in) {
    const NodePattern& pat = q_.chains[seed.chain].nodes[seed.pos];
    const PosKey at{seed.chain, seed.pos};
    std::vector<MatchRow> out;
    for (MatchRow& row : in) {
      auto src = row_attr(row, seed.ref.var, seed.ref.key);
      if (!src) continue;  // unsatisfiable reference: this row matches nothing
      for (NodeId id : b_.find_nodes(seed.label, seed.key, *src)) {
        if (!membership_pass(at, id)) continue;
        AttrFragment fetched;
        fetched.emplace(seed.key, src);  // the seek key is known, not refetched
        MatchRow candidate_row = row;
        if (!filters_pass(pat.filters, ElemRef::of_node(id),
                          /*membership_covered=*/true, at, candidate_row, fetched,
                          nullptr))
          continue;
        if (pat.var) {
          candidate_row.bind[*pat.var] = ElemRef::of_node(id);
          keep_values(candidate_row, pat.var, fetched);
        }
        candidate_row.pos_bind = row.pos_bind;
        candidate_row.pos_bind[at] = id;
        out.push_back(std::move(candidate_row));
      }
    }
    return out;
  }

  std::vector<MatchRow> run_expand(const ExpandSpec& spec, std::vector<MatchRow>& in) {
    const Chain& chain = q_.chains[spec.chain];
    const RelPattern& rel = chain.rels[spec.rel];
    const std::size_t src_pos = spec.leftward ? spec.rel + 1 : spec.rel;
    const std::size_t dst_pos = spec.leftward ? spec.rel : spec.rel + 1;
    const NodePattern& target = chain.nodes[dst_pos];
    const PosKey src_at{spec.chain, src_pos};
    const PosKey dst_at{spec.chain, dst_pos};

    std::vector<MatchRow> out;
    for (MatchRow& row : in) {
      /* Bound-anchor chains emit no seed step, so their anchor position is
       * found through the variable binding instead. */
      const auto src_it = row.pos_bind.find(src_at);
      const NodeId src = src_it != row.pos_bind.end()
                             ? src_it->second
                             : row.bind.at(*chain.nodes[src_pos].var).id;
      if (spec.target_bound) {
        const NodeId dst = row.bind.at(*target.var).id;
        const NodeId left_id = spec.leftward ? dst : src;
        const NodeId right_id = spec.leftward ? src : dst;
        const NodeId edge_from = rel.arrow == Arrow::right ? left_id : right_id;
        const NodeId edge_to = rel.arrow == Arrow::right ? right_id : left_id;
        for (const Edge& e : b_.edges_between(edge_from, edge_to, rel.type)) {
          AttrFragment fetched;
          if (!filters_pass(rel.filters, ElemRef::of_edge(e.id), false,
                            {spec.chain, spec.rel}, row, fetched, nullptr))
            continue;
          MatchRow nw = row;
          if (rel.var) {
            nw.bind[*rel.var] = ElemRef::of_edge(e.id);
            keep_values(nw, rel.var, fetched);
          }
          // the re-binding must still satisfy this occurrence's own
          // label and filters (which may reference the relationship)
          if (!bound_pattern_pass(target, nw)) continue;
          nw.pos_bind[dst_at] = dst;
          out.push_back(std::move(nw));
        }
      } else {
        const Direction dir = spec.leftward == (rel.arrow == Arrow::right)
                                  ? Direction::in
                                  : Direction::out;
        for (const auto& nb : b_.get_neighbours(src, dir, rel.type)) {
          AttrFragment rel_fetched;
          if (!filters_pass(rel.filters, ElemRef::of_edge(nb.edge), false,
                            {spec.chain, spec.rel}, row, rel_fetched, nullptr))
            continue;
          if (target.label && !b_.node_has_label(nb.other, *target.label)) continue;
          if (!membership_pass(dst_at, nb.other)) continue;

          MatchRow nw = row;
          if (rel.var) {
            nw.bind[*rel.var] = ElemRef::of_edge(nb.edge);
            keep_values(nw, rel.var, rel_fetched);
          }
          AttrFragment node_fetched;
          const bool covered = target.label != std::nullopt;
          if (!filters_pass(target.filters, ElemRef::of_node(nb.other), covered,
                            dst_at, nw, node_fetched, nullptr))
            continue;
          if (target.var) {
            nw.bind[*target.var] = ElemRef::of_node(nb.other);
            keep_values(nw, target.var, node_fetched);
          }
          nw.pos_bind[dst_at] = nb.other;
          out.push_back(std::move(nw));
        }
      }
    }
    return out;
  }

  const Plan& plan_;
  const Query& q_;
  Backend& b_;
  const KVStore* kv_;
  std::map<PosKey, std::vector<std::unordered_set<NodeId>>> membership_;
};

}  // namespace detail

inline ExecOutcome execute_plan(const Plan& plan, Backend& backend,
                                const KVStore* kv = nullptr) {
  CounterSnapshot before = backend.snapshot();
  const std::uint64_t kv_before = kv ? kv->lookups() : 0;
  detail::PlanRunner runner(plan, backend, kv);
  ExecOutcome out;
  out.table = runner.run();
  out.counters = backend.snapshot() - before;
  if (kv) out.counters.kv_lookup += kv->lookups() - kv_before;
  out.modeled_us = backend.modeled_us(out.counters);
  return out;
}

/* One-call convenience: classify, plan, execute. */
inline ExecOutcome execute(const Query& q, Strategy strategy, Backend& backend,
                           const KVStore* kv = nullptr) {
  Plan p = plan(q, strategy, classify(q), backend, kv);
  return execute_plan(p, backend, kv);
}

}  // namespace graphopt

#endif
