#ifndef GRAPHOPT_GENERATE_HPP
#define GRAPHOPT_GENERATE_HPP

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphopt/graph.hpp"
#include "graphopt/value.hpp"

namespace graphopt {

/* Self-contained 64-bit generator (splitmix64 seeded xoshiro256**) with an
 * unbiased bounded draw. std::mt19937 + distributions would be simpler, but
 * distribution output is implementation-defined and the generator contract
 * is byte-identical graphs for a given seed, wherever the suite runs. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /* Uniform in [0, n), rejection-free multiply-shift with correction. */
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw config_error("Rng::below(0)");
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    std::uint64_t l = static_cast<std::uint64_t>(m);
    if (l < n) {
      std::uint64_t t = -n % n;
      while (l < t) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        l = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double unit() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t s_[4];
};

struct GeneratorConfig {
  std::size_t entity_count = 5000;
  std::size_t document_count = 2000;
  std::size_t author_count = 500;
  std::size_t relation_count = 40000;
  double authorship_per_doc = 4.0;  // mean isAuthor edges per document
  double contradiction_fraction = 0.05;
  std::vector<std::pair<std::string, double>> function_values = {
      {"increases", 1.0}, {"decreases", 1.0}};
  Date date_min{2000, 1, 1};
  Date date_max{2015, 12, 31};
  std::uint64_t seed = 42;
};

/* Node ids the generator pins when the graph is big enough to carry them.
 * The two path anchors sit at graph distance exactly 3 (their only edges are
 * the spine entity_a - spine0 - spine1 - entity_b); the two document anchors
 * sit at distance exactly 4 through their dedicated authors and a shared
 * middle document. Q1's pair is joined by `q1_doc_count` increases edges,
 * one per distinct context document. */
struct SyntheticAnchors {
  static constexpr const char* entity_a_label = "axonal transport";
  static constexpr const char* entity_b_label = "LRP3";
  static constexpr const char* q1_source_label = "APP";
  static constexpr const char* q1_target_label = "gamma Secretase Complex";
  static constexpr const char* doc_a_id = "PMID:16160056";
  static constexpr const char* doc_b_id = "PMID:16160050";
  static constexpr std::size_t q1_doc_count = 12;
  static constexpr std::size_t q1_decoy_count = 60;

  NodeId entity_a = 0, spine0 = 2, spine1 = 3, entity_b = 1;
  NodeId q1_source = 4, q1_target = 5;
  NodeId doc_a = 0, doc_b = 0, doc_middle = 0;  // filled in by the generator
  NodeId author_a = 0, author_b = 0;
};

/* Anchor wiring needs a handful of each node kind plus edge budget:
 * 3 spine edges + q1 edges + decoys. */
inline bool anchors_fit(const GeneratorConfig& c) {
  return c.entity_count >= 8 && c.document_count >= 3 + SyntheticAnchors::q1_doc_count &&
         c.author_count >= 3 &&
         c.relation_count >=
             3 + SyntheticAnchors::q1_doc_count + SyntheticAnchors::q1_decoy_count +
                 2 * static_cast<std::size_t>(
                         std::ceil(c.contradiction_fraction *
                                   static_cast<double>(c.relation_count)));
}

struct SyntheticGraph {
  PropertyGraph graph;
  bool has_anchors = false;
  SyntheticAnchors anchors;
};

/* Deterministic synthetic corpus: Entity nodes joined by hasRelation edges
 * (props: function, context), Document/Author nodes joined by isAuthor
 * edges. `context` always holds the documentID of an existing document.
 * Same seed and config give a byte-identical graph. */
inline SyntheticGraph generate_synthetic(const GeneratorConfig& cfg) {
  if (cfg.contradiction_fraction < 0.0 || cfg.contradiction_fraction > 1.0)
    throw config_error("contradiction_fraction must be in [0, 1]");
  if (cfg.function_values.empty())
    throw config_error("function_values must not be empty");
  for (const auto& [name, w] : cfg.function_values)
    if (w < 0.0) throw config_error("negative weight for function value " + name);
  if (cfg.date_max < cfg.date_min)
    throw config_error("date range is empty");
  if (cfg.relation_count > 0 && cfg.entity_count < 2)
    throw config_error("relations need at least two entities");
  const std::size_t contradictions = static_cast<std::size_t>(
      std::ceil(cfg.contradiction_fraction * static_cast<double>(cfg.relation_count)));
  if (2 * contradictions > cfg.relation_count)
    throw config_error(
        "contradiction_fraction infeasible: " + std::to_string(contradictions) +
        " contradictory pairs need " + std::to_string(2 * contradictions) +
        " edges but relation_count is " + std::to_string(cfg.relation_count));
  SyntheticGraph out;
  out.has_anchors = anchors_fit(cfg);
  {
    // Contradiction pairs draw from entities that are allowed random edges.
    const std::size_t drawable =
        cfg.entity_count - (out.has_anchors ? 2 : 0);
    const std::size_t pair_budget =
        drawable < 2 ? 0 : drawable * (drawable - 1) / 2;
    if (contradictions > pair_budget)
      throw config_error("contradiction_fraction asks for more distinct entity "
                         "pairs than the entity count allows");
  }
  SyntheticAnchors& a = out.anchors;
  PropertyGraph& g = out.graph;
  Rng rng(cfg.seed);

  const std::int64_t day_lo = days_from_civil(cfg.date_min);
  const std::int64_t day_hi = days_from_civil(cfg.date_max);
  auto random_date = [&]() {
    return civil_from_days(
        day_lo + static_cast<std::int64_t>(
                     rng.below(static_cast<std::uint64_t>(day_hi - day_lo + 1))));
  };

  auto pad = [](std::size_t i, int width) {
    std::string s = std::to_string(i);
    return std::string(s.size() >= static_cast<std::size_t>(width)
                           ? 0
                           : width - s.size(), '0') + s;
  };

  // Entities: ids [0, E)
  for (std::size_t i = 0; i < cfg.entity_count; ++i) {
    Node n;
    n.id = i;
    n.labels = {"Entity"};
    std::string label = "E" + pad(i, 6);
    if (out.has_anchors) {
      if (i == a.entity_a) label = SyntheticAnchors::entity_a_label;
      else if (i == a.entity_b) label = SyntheticAnchors::entity_b_label;
      else if (i == a.q1_source) label = SyntheticAnchors::q1_source_label;
      else if (i == a.q1_target) label = SyntheticAnchors::q1_target_label;
    }
    n.props.emplace("preferredLabel", label);
    g.add_node(std::move(n));
  }

  // Documents: ids [E, E+D)
  const NodeId doc_base = cfg.entity_count;
  std::vector<std::string> doc_ids(cfg.document_count);
  if (out.has_anchors) {
    a.doc_a = doc_base + 0;
    a.doc_b = doc_base + 1;
    a.doc_middle = doc_base + 2;
  }
  for (std::size_t i = 0; i < cfg.document_count; ++i) {
    Node n;
    n.id = doc_base + i;
    n.labels = {"Document"};
    std::string did = "PMID:" + pad(16200000 + i, 8);
    Date pub = random_date();
    if (out.has_anchors) {
      if (i == 0) did = SyntheticAnchors::doc_a_id;
      else if (i == 1) did = SyntheticAnchors::doc_b_id;
      // Q1 context documents get distinct, deterministic dates so the
      // earliest one is unique.
      else if (i >= 3 && i < 3 + SyntheticAnchors::q1_doc_count)
        pub = civil_from_days(days_from_civil(Date{2001, 3, 15}) +
                              static_cast<std::int64_t>(37 * (i - 3)));
    }
    doc_ids[i] = did;
    n.props.emplace("documentID", did);
    n.props.emplace("publicationDate", pub);
    g.add_node(std::move(n));
  }

  // Authors: ids [E+D, E+D+A)
  const NodeId author_base = doc_base + cfg.document_count;
  if (out.has_anchors) {
    a.author_a = author_base + 0;
    a.author_b = author_base + 1;
  }
  for (std::size_t i = 0; i < cfg.author_count; ++i) {
    Node n;
    n.id = author_base + i;
    n.labels = {"Author"};
    n.props.emplace("name", "Author " + pad(i, 4));
    g.add_node(std::move(n));
  }

  EdgeId next_edge = 0;
  auto add_edge = [&](const std::string& type, NodeId s, NodeId t,
                      std::map<std::string, PropertyValue> props) {
    Edge e;
    e.id = next_edge++;
    e.type = type;
    e.start = s;
    e.end = t;
    e.props = std::move(props);
    g.add_edge(std::move(e));
  };

  // isAuthor edges (author -> document). Anchor documents keep exactly one
  // dedicated author each so their graph distance stays pinned; the shared
  // middle document links the two dedicated authors.
  if (out.has_anchors) {
    add_edge("isAuthor", a.author_a, a.doc_a, {});
    add_edge("isAuthor", a.author_a, a.doc_middle, {});
    add_edge("isAuthor", a.author_b, a.doc_middle, {});
    add_edge("isAuthor", a.author_b, a.doc_b, {});
  }
  if (cfg.author_count > 0) {
    const std::size_t whole = static_cast<std::size_t>(cfg.authorship_per_doc);
    const double frac = cfg.authorship_per_doc - static_cast<double>(whole);
    for (std::size_t i = 0; i < cfg.document_count; ++i) {
      if (out.has_anchors && i < 2) continue;  // doc_a, doc_b stay degree 1
      std::size_t k = whole + (rng.unit() < frac ? 1 : 0);
      k = std::min(k, cfg.author_count);
      std::set<NodeId> picked;
      while (picked.size() < k) {
        NodeId au = author_base + rng.below(cfg.author_count);
        if (picked.insert(au).second) add_edge("isAuthor", au, doc_base + i, {});
      }
    }
  }

  // hasRelation edges (entity -> entity), relation_count in total.
  double total_weight = 0.0;
  for (const auto& [name, w] : cfg.function_values) total_weight += w;
  if (total_weight <= 0.0)
    throw config_error("function_values weights sum to zero");
  auto random_function = [&]() -> const std::string& {
    double x = rng.unit() * total_weight;
    for (const auto& [name, w] : cfg.function_values) {
      x -= w;
      if (x < 0.0) return name;
    }
    return cfg.function_values.back().first;
  };
  auto random_context = [&]() -> PropertyValue {
    return doc_ids[rng.below(cfg.document_count)];
  };
  auto relation_props = [&](const std::string& fn, PropertyValue ctx) {
    std::map<std::string, PropertyValue> p;
    p.emplace("function", fn);
    p.emplace("context", std::move(ctx));
    return p;
  };

  std::size_t remaining = cfg.relation_count;
  // Entities eligible for random endpoints: everything except the two path
  // anchors, whose degree must stay exactly 1.
  const std::size_t first_free = out.has_anchors ? 2 : 0;
  const std::size_t free_entities = cfg.entity_count - first_free;
  auto random_entity = [&]() { return first_free + rng.below(free_entities); };

  if (out.has_anchors) {
    // Spine: entity_a - spine0 - spine1 - entity_b, distance exactly 3.
    add_edge("hasRelation", a.entity_a, a.spine0,
             relation_props(random_function(), random_context()));
    add_edge("hasRelation", a.spine0, a.spine1,
             relation_props(random_function(), random_context()));
    add_edge("hasRelation", a.spine1, a.entity_b,
             relation_props(random_function(), random_context()));
    // Q1 pair: one increases edge per context document, dates distinct.
    for (std::size_t i = 0; i < SyntheticAnchors::q1_doc_count; ++i)
      add_edge("hasRelation", a.q1_source, a.q1_target,
               relation_props("increases", doc_ids[3 + i]));
    // Decoy fan-out from the Q1 source: same shape, other targets, so the
    // source's neighbourhood is dominated by non-answers.
    for (std::size_t i = 0; i < SyntheticAnchors::q1_decoy_count; ++i) {
      NodeId t;
      do { t = random_entity(); } while (t == a.q1_source || t == a.q1_target);
      add_edge("hasRelation", a.q1_source, t,
               relation_props(i % 2 == 0 ? "increases" : "decreases",
                              random_context()));
    }
    remaining -= 3 + SyntheticAnchors::q1_doc_count + SyntheticAnchors::q1_decoy_count;
  }

  // Guaranteed contradictory pairs: both an increases and a decreases edge.
  std::set<std::pair<NodeId, NodeId>> used_pairs;
  for (std::size_t i = 0; i < contradictions; ++i) {
    NodeId s, t;
    for (;;) {
      s = random_entity();
      t = random_entity();
      if (s != t && used_pairs.insert({s, t}).second) break;
    }
    add_edge("hasRelation", s, t, relation_props("increases", random_context()));
    add_edge("hasRelation", s, t, relation_props("decreases", random_context()));
  }
  remaining -= 2 * contradictions;

  while (remaining > 0) {
    NodeId s = random_entity();
    NodeId t = random_entity();
    if (s == t) continue;
    add_edge("hasRelation", s, t,
             relation_props(random_function(), random_context()));
    --remaining;
  }

  g.freeze();
  return out;
}

}  // namespace graphopt

#endif
