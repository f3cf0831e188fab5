#ifndef GRAPHOPT_SCHEDULE_HPP
#define GRAPHOPT_SCHEDULE_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphopt/ast.hpp"
#include "graphopt/backend.hpp"

namespace graphopt {

struct plan_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Both execution engines enumerate candidate bindings in exactly the same
 * order; they differ only in what each binding event costs. This header is
 * that shared order: which chain runs first, where each chain is seeded,
 * and which direction expansion travels. Keeping it in one place is what
 * makes strategy equivalence structural instead of coincidental. */

enum class SeedMode {
  bound_anchor,   // anchor variable already bound by an earlier chain
  index_literal,  // exact (label, key, literal) index lookup
  index_by_ref,   // (label, key) with the value taken from an earlier binding
  label_scan,     // every node with the label
};

struct SeedSpec {
  SeedMode mode = SeedMode::label_scan;
  std::size_t chain = 0;
  std::size_t pos = 0;
  std::string label;      // all modes except bound_anchor
  std::string key;        // index_literal / index_by_ref
  PropertyValue value;    // index_literal
  CrossRef ref;           // index_by_ref
  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/* One relationship traversal. rel r sits between nodes r and r+1 of its
 * chain; leftward means travel from node r+1 to node r. When the target
 * variable is already bound the traversal degenerates to edges_between. */
struct ExpandSpec {
  std::size_t chain = 0;
  std::size_t rel = 0;
  bool leftward = false;
  bool target_bound = false;
  friend bool operator==(const ExpandSpec&, const ExpandSpec&) = default;
};

struct ChainSchedule {
  std::size_t chain = 0;
  SeedSpec seed;
  std::vector<ExpandSpec> steps;
};

/* A literal node filter that one up-front index lookup can turn into a free
 * membership test. Only labeled patterns qualify (the index is per label);
 * the filter a seed already consumed is excluded. */
struct MembershipSpec {
  std::size_t chain = 0;
  std::size_t pos = 0;
  std::string label;
  std::string key;
  PropertyValue value;
  friend bool operator==(const MembershipSpec&, const MembershipSpec&) = default;
};

struct Schedule {
  std::vector<ChainSchedule> chains;     // evaluation order
  std::vector<MembershipSpec> prefetch;  // textual order
};

/* Which keys each variable is asked for anywhere in the query: its own
 * pattern filters, cross-reference sources, RETURN attributes and the
 * ORDER BY key. The naive policy fetches exactly this set at every fresh
 * candidate binding event. */
struct QueryAttrs {
  std::map<std::string, std::set<std::string>> var_keys;
  std::map<std::string, std::string> var_label;  // first labeled occurrence
  std::set<std::string> node_vars;
  std::set<std::string> rel_vars;
};

inline QueryAttrs analyze_attrs(const Query& q) {
  QueryAttrs out;
  auto note_filters = [&](const std::optional<std::string>& var,
                          const std::vector<PropFilter>& filters) {
    for (const PropFilter& f : filters) {
      if (var) out.var_keys[*var].insert(f.key);
      if (const auto* ref = std::get_if<CrossRef>(&f.value))
        out.var_keys[ref->var].insert(ref->key);
    }
  };
  for (const Chain& chain : q.chains) {
    for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
      const NodePattern& n = chain.nodes[i];
      if (n.var) {
        out.node_vars.insert(*n.var);
        if (n.label && !out.var_label.count(*n.var)) out.var_label[*n.var] = *n.label;
      }
      note_filters(n.var, n.filters);
      if (i > 0) {
        const RelPattern& r = chain.rels[i - 1];
        if (r.var) out.rel_vars.insert(*r.var);
        note_filters(r.var, r.filters);
      }
    }
  }
  for (const auto& item : q.ret.items)
    if (const auto* attr = std::get_if<ReturnAttr>(&item.what))
      out.var_keys[attr->var].insert(attr->key);
  if (q.ret.order_by)
    if (const auto* attr = std::get_if<ReturnAttr>(&q.ret.order_by->key))
      out.var_keys[attr->var].insert(attr->key);
  return out;
}

/* Keys materialized at a binding event of one pattern occurrence: the
 * occurrence's own filter keys, plus everything named for its variable. */
inline std::set<std::string> position_keys(const std::optional<std::string>& var,
                                           const std::vector<PropFilter>& filters,
                                           const QueryAttrs& attrs) {
  std::set<std::string> keys;
  for (const PropFilter& f : filters) keys.insert(f.key);
  if (var) {
    auto it = attrs.var_keys.find(*var);
    if (it != attrs.var_keys.end()) keys.insert(it->second.begin(), it->second.end());
  }
  return keys;
}

/* Attributes eligible for key-value offload: read only at result-assembly
 * time (RETURN / ORDER BY), never as a filter input, on a labeled node
 * variable. Aggregation queries offload nothing: their group keys are part
 * of the match product, not of result assembly. */
struct OffloadPair {
  std::string var;
  std::string label;
  std::string key;
  friend bool operator==(const OffloadPair&, const OffloadPair&) = default;
};

inline std::vector<OffloadPair> offload_pairs(const Query& q) {
  if (q.has_aggregate()) return {};
  QueryAttrs attrs = analyze_attrs(q);

  // keys consumed by the match phase, per variable
  std::map<std::string, std::set<std::string>> match_keys;
  for (const Chain& chain : q.chains) {
    for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
      auto note = [&](const std::optional<std::string>& var,
                      const std::vector<PropFilter>& filters) {
        for (const PropFilter& f : filters) {
          if (var) match_keys[*var].insert(f.key);
          if (const auto* ref = std::get_if<CrossRef>(&f.value))
            match_keys[ref->var].insert(ref->key);
        }
      };
      note(chain.nodes[i].var, chain.nodes[i].filters);
      if (i > 0) note(chain.rels[i - 1].var, chain.rels[i - 1].filters);
    }
  }

  std::set<std::pair<std::string, std::string>> wanted;
  for (const auto& item : q.ret.items)
    if (const auto* attr = std::get_if<ReturnAttr>(&item.what))
      wanted.insert({attr->var, attr->key});
  if (q.ret.order_by)
    if (const auto* attr = std::get_if<ReturnAttr>(&q.ret.order_by->key))
      wanted.insert({attr->var, attr->key});

  std::vector<OffloadPair> out;
  for (const auto& [var, key] : wanted) {
    if (!attrs.node_vars.count(var)) continue;
    auto lab = attrs.var_label.find(var);
    if (lab == attrs.var_label.end()) continue;
    auto used = match_keys.find(var);
    if (used != match_keys.end() && used->second.count(key)) continue;
    out.push_back({var, lab->second, key});
  }
  return out;
}

namespace detail {

inline const PropFilter* first_literal_filter(const NodePattern& n) {
  for (const PropFilter& f : n.filters)
    if (std::holds_alternative<PropertyValue>(f.value)) return &f;
  return nullptr;
}

inline const PropFilter* first_ref_filter(const NodePattern& n) {
  for (const PropFilter& f : n.filters)
    if (std::holds_alternative<CrossRef>(f.value)) return &f;
  return nullptr;
}

inline bool chain_has_cross_ref(const Chain& c) {
  auto any = [](const std::vector<PropFilter>& fs) {
    for (const PropFilter& f : fs)
      if (std::holds_alternative<CrossRef>(f.value)) return true;
    return false;
  };
  for (const NodePattern& n : c.nodes)
    if (any(n.filters)) return true;
  for (const RelPattern& r : c.rels)
    if (any(r.filters)) return true;
  return false;
}

/* Expansion from an anchor visits the right side first, then the left; a
 * cross-reference inside the chain is evaluable only if its source binds
 * before its user in that sequence. Returns the binding sequence order
 * index per node position and per rel, or nullopt if some cross-reference
 * would read an unbound variable. Sources bound by earlier chains are
 * always fine. */
inline bool anchor_is_valid(const Chain& chain, std::size_t anchor,
                            const std::set<std::string>& bound_before) {
  const std::size_t n = chain.nodes.size();
  // order[i] = step at which node i binds; rel_order[r] likewise
  std::vector<std::size_t> node_at(n, 0), rel_at(n > 0 ? n - 1 : 0, 0);
  std::size_t t = 0;
  node_at[anchor] = t++;
  for (std::size_t r = anchor; r + 1 < n; ++r) {
    rel_at[r] = t++;
    node_at[r + 1] = t++;
  }
  for (std::size_t r = anchor; r-- > 0;) {
    rel_at[r] = t++;
    node_at[r] = t++;
  }

  // first binding step of each variable named in this chain
  std::map<std::string, std::size_t> first_bind;
  auto note = [&](const std::optional<std::string>& var, std::size_t at) {
    if (!var) return;
    auto it = first_bind.find(*var);
    if (it == first_bind.end() || at < it->second) first_bind[*var] = at;
  };
  for (std::size_t i = 0; i < n; ++i) note(chain.nodes[i].var, node_at[i]);
  for (std::size_t r = 0; r + 1 < n; ++r) note(chain.rels[r].var, rel_at[r]);

  auto refs_ok = [&](const std::vector<PropFilter>& fs, std::size_t user_at) {
    for (const PropFilter& f : fs) {
      const auto* ref = std::get_if<CrossRef>(&f.value);
      if (!ref) continue;
      if (bound_before.count(ref->var)) continue;
      auto it = first_bind.find(ref->var);
      if (it == first_bind.end() || it->second >= user_at) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < n; ++i)
    if (!refs_ok(chain.nodes[i].filters, node_at[i])) return false;
  for (std::size_t r = 0; r + 1 < n; ++r)
    if (!refs_ok(chain.rels[r].filters, rel_at[r])) return false;
  return true;
}

}  // namespace detail

/* Build the shared schedule. Entry point: over chains free of
 * cross-references, the labeled literal-filtered node pattern whose index
 * slice is smallest (planner statistics are free); ties break textually.
 * The entry chain runs first, the rest keep textual order, which preserves
 * the parser's cross-reference ordering guarantee. Per chain the anchor
 * preference is: an already-bound variable, then a literal index seed, then
 * an index seek keyed by an earlier binding, then a label scan. A chain
 * offering none of these cannot be seeded: there is deliberately no
 * all-nodes scan. */
inline Schedule build_schedule(const Query& q, const Backend& backend) {
  struct Entry {
    std::size_t est, chain, pos;
    const PropFilter* filter;
  };
  std::optional<Entry> entry;
  for (std::size_t c = 0; c < q.chains.size(); ++c) {
    if (detail::chain_has_cross_ref(q.chains[c])) continue;
    for (std::size_t p = 0; p < q.chains[c].nodes.size(); ++p) {
      const NodePattern& n = q.chains[c].nodes[p];
      if (!n.label) continue;
      const PropFilter* f = detail::first_literal_filter(n);
      if (!f) continue;
      std::size_t est = backend.stat_index_count(
          *n.label, f->key, std::get<PropertyValue>(f->value));
      if (!entry || est < entry->est) entry = Entry{est, c, p, f};
    }
  }

  std::vector<std::size_t> order;
  if (entry) order.push_back(entry->chain);
  for (std::size_t c = 0; c < q.chains.size(); ++c)
    if (!entry || c != entry->chain) order.push_back(c);

  Schedule schedule;
  std::set<std::string> bound;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t ci = order[oi];
    const Chain& chain = q.chains[ci];
    ChainSchedule cs;
    cs.chain = ci;

    // anchor candidates in preference order
    struct Candidate {
      std::size_t pos;
      SeedSpec seed;
    };
    std::vector<Candidate> candidates;
    auto add = [&](std::size_t pos, SeedSpec seed) {
      seed.chain = ci;
      seed.pos = pos;
      candidates.push_back({pos, std::move(seed)});
    };
    if (entry && oi == 0 && ci == entry->chain) {
      const NodePattern& n = chain.nodes[entry->pos];
      add(entry->pos, {SeedMode::index_literal, 0, 0, *n.label, entry->filter->key,
                       std::get<PropertyValue>(entry->filter->value), {}});
    } else {
      for (std::size_t p = 0; p < chain.nodes.size(); ++p)
        if (chain.nodes[p].var && bound.count(*chain.nodes[p].var))
          add(p, {SeedMode::bound_anchor, 0, 0, "", "", {}, {}});
      for (std::size_t p = 0; p < chain.nodes.size(); ++p) {
        const NodePattern& n = chain.nodes[p];
        if (!n.label) continue;
        if (const PropFilter* f = detail::first_literal_filter(n))
          add(p, {SeedMode::index_literal, 0, 0, *n.label, f->key,
                  std::get<PropertyValue>(f->value), {}});
      }
      for (std::size_t p = 0; p < chain.nodes.size(); ++p) {
        const NodePattern& n = chain.nodes[p];
        if (!n.label) continue;
        const PropFilter* f = detail::first_ref_filter(n);
        if (f && bound.count(std::get<CrossRef>(f->value).var))
          add(p, {SeedMode::index_by_ref, 0, 0, *n.label, f->key, {},
                  std::get<CrossRef>(f->value)});
      }
      for (std::size_t p = 0; p < chain.nodes.size(); ++p)
        if (chain.nodes[p].label)
          add(p, {SeedMode::label_scan, 0, 0, *chain.nodes[p].label, "", {}, {}});
    }

    bool seeded = false;
    for (const Candidate& cand : candidates) {
      if (!detail::anchor_is_valid(chain, cand.pos, bound)) continue;
      cs.seed = cand.seed;
      seeded = true;
      break;
    }
    if (!seeded)
      throw plan_error("cannot seed pattern " + std::to_string(ci + 1) +
                       ": no bound variable, label or usable filter");

    // expansion: rightward from the anchor, then leftward, tracking
    // which target variables are bound at each step
    std::set<std::string> bound_now = bound;
    auto bind_node = [&](std::size_t p) {
      if (chain.nodes[p].var) bound_now.insert(*chain.nodes[p].var);
    };
    auto bind_rel = [&](std::size_t r) {
      if (chain.rels[r].var) bound_now.insert(*chain.rels[r].var);
    };
    bind_node(cs.seed.pos);
    for (std::size_t r = cs.seed.pos; r + 1 < chain.nodes.size(); ++r) {
      const auto& tv = chain.nodes[r + 1].var;
      cs.steps.push_back({ci, r, false, tv && bound_now.count(*tv) != 0});
      bind_rel(r);
      bind_node(r + 1);
    }
    for (std::size_t r = cs.seed.pos; r-- > 0;) {
      const auto& tv = chain.nodes[r].var;
      cs.steps.push_back({ci, r, true, tv && bound_now.count(*tv) != 0});
      bind_rel(r);
      bind_node(r);
    }
    bound = std::move(bound_now);
    schedule.chains.push_back(std::move(cs));
  }

  // membership prefetches: every labeled literal filter a seed didn't consume
  for (std::size_t ci = 0; ci < q.chains.size(); ++ci) {
    for (std::size_t p = 0; p < q.chains[ci].nodes.size(); ++p) {
      const NodePattern& n = q.chains[ci].nodes[p];
      if (!n.label) continue;
      const SeedSpec* seed = nullptr;
      for (const ChainSchedule& cs : schedule.chains)
        if (cs.chain == ci && cs.seed.pos == p &&
            cs.seed.mode == SeedMode::index_literal)
          seed = &cs.seed;
      for (const PropFilter& f : n.filters) {
        const auto* lit = std::get_if<PropertyValue>(&f.value);
        if (!lit) continue;
        if (seed && seed->key == f.key && value_equal(seed->value, *lit)) {
          seed = nullptr;  // the seed consumes exactly one filter occurrence
          continue;
        }
        schedule.prefetch.push_back({ci, p, *n.label, f.key, *lit});
      }
    }
  }
  return schedule;
}

}  // namespace graphopt

#endif
