// Synthetic corpus generator: determinism, the pinned anchor wiring, edge
// budgets, and config validation.

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "graphopt/generate.hpp"
#include "graphopt/jsonl.hpp"
#include "test_support.hpp"

using namespace graphopt;
using Catch::Matchers::ContainsSubstring;

namespace {

GeneratorConfig desk_config() {
  GeneratorConfig c;
  c.entity_count = 100;
  c.document_count = 50;
  c.author_count = 20;
  c.relation_count = 400;
  c.contradiction_fraction = 0.1;
  c.seed = 1;
  return c;
}

}  // namespace

TEST_CASE("same seed, same bytes; different seed, different graph", "[generator]") {
  const GeneratorConfig cfg = desk_config();
  const auto a = generate_synthetic(cfg);
  const auto b = generate_synthetic(cfg);
  CHECK(graph_to_string(a.graph) == graph_to_string(b.graph));
  CHECK(a.graph == b.graph);

  GeneratorConfig other = cfg;
  other.seed = 2;
  CHECK(graph_to_string(generate_synthetic(other).graph) != graph_to_string(a.graph));
}

TEST_CASE("node id layout and exact counts", "[generator]") {
  const GeneratorConfig cfg = desk_config();
  const auto syn = generate_synthetic(cfg);
  const PropertyGraph& g = syn.graph;
  REQUIRE(g.node_count() == cfg.entity_count + cfg.document_count + cfg.author_count);

  // entities occupy [0, E), documents [E, E+D), authors [E+D, E+D+A)
  for (NodeId id = 0; id < cfg.entity_count; ++id)
    REQUIRE(g.node(id).has_label("Entity"));
  for (NodeId id = cfg.entity_count; id < cfg.entity_count + cfg.document_count; ++id)
    REQUIRE(g.node(id).has_label("Document"));
  for (NodeId id = cfg.entity_count + cfg.document_count; id < g.node_count(); ++id)
    REQUIRE(g.node(id).has_label("Author"));

  std::size_t relations = 0;
  for (const Edge& e : g.edges())
    if (e.type == "hasRelation") ++relations;
  CHECK(relations == cfg.relation_count);

  // every document carries an id and a date inside the configured range
  for (NodeId id = cfg.entity_count; id < cfg.entity_count + cfg.document_count; ++id) {
    const Node& d = g.node(id);
    REQUIRE(d.props.count("documentID") == 1);
    REQUIRE(d.props.count("publicationDate") == 1);
  }
}

TEST_CASE("default-scale corpus carries the documented volume", "[generator][slow]") {
  const auto syn = generate_synthetic(GeneratorConfig{});
  const PropertyGraph& g = syn.graph;
  REQUIRE(syn.has_anchors);
  CHECK(g.node_count() == 5000 + 2000 + 500);
  std::size_t relations = 0, authorships = 0;
  for (const Edge& e : g.edges())
    (e.type == "hasRelation" ? relations : authorships) += 1;
  CHECK(relations == 40000);
  // every document is authored: anchor docs by their dedicated authors,
  // the rest by exactly authorship_per_doc = 4 distinct authors
  std::map<NodeId, std::size_t> in_isauthor;
  for (const Edge& e : g.edges())
    if (e.type == "isAuthor") ++in_isauthor[e.end];
  for (NodeId id = 5000; id < 7000; ++id) REQUIRE(in_isauthor[id] >= 1);
  CHECK(in_isauthor[syn.anchors.doc_a] == 1);
  CHECK(in_isauthor[syn.anchors.doc_b] == 1);
}

TEST_CASE("path anchors sit at the pinned distances", "[generator]") {
  const auto syn = generate_synthetic(desk_config());
  REQUIRE(syn.has_anchors);
  const SyntheticAnchors& a = syn.anchors;
  const PropertyGraph& g = syn.graph;

  CHECK(g.node(a.entity_a).props.at("preferredLabel") ==
        PropertyValue{std::string(SyntheticAnchors::entity_a_label)});
  CHECK(g.node(a.entity_b).props.at("preferredLabel") ==
        PropertyValue{std::string(SyntheticAnchors::entity_b_label)});
  CHECK(g.node(a.doc_a).props.at("documentID") ==
        PropertyValue{std::string(SyntheticAnchors::doc_a_id)});
  CHECK(g.node(a.doc_b).props.at("documentID") ==
        PropertyValue{std::string(SyntheticAnchors::doc_b_id)});

  // spine keeps the entity pair at distance exactly 3, the dedicated
  // author wiring keeps the document pair at exactly 4
  CHECK(testsupport::oracle_distance(g, a.entity_a, a.entity_b) == 3);
  CHECK(testsupport::oracle_distance(g, a.doc_a, a.doc_b) == 4);

  // the path anchors own exactly one edge each (their spine edge)
  CHECK(g.out_edges(a.entity_a).size() + g.in_edges(a.entity_a).size() == 1);
  CHECK(g.out_edges(a.entity_b).size() + g.in_edges(a.entity_b).size() == 1);
}

TEST_CASE("the q1 pair is joined once per context document", "[generator]") {
  const auto syn = generate_synthetic(desk_config());
  REQUIRE(syn.has_anchors);
  const SyntheticAnchors& a = syn.anchors;
  const PropertyGraph& g = syn.graph;

  CHECK(g.node(a.q1_source).props.at("preferredLabel") ==
        PropertyValue{std::string(SyntheticAnchors::q1_source_label)});
  CHECK(g.node(a.q1_target).props.at("preferredLabel") ==
        PropertyValue{std::string(SyntheticAnchors::q1_target_label)});

  std::vector<const Edge*> joining;
  for (const auto& adj : g.out_edges(a.q1_source))
    if (adj.other == a.q1_target) joining.push_back(&g.edge(adj.edge));
  REQUIRE(joining.size() == SyntheticAnchors::q1_doc_count);

  std::set<PropertyValue> contexts;
  Date earliest{9999, 12, 31};
  for (const Edge* e : joining) {
    CHECK(e->props.at("function") == PropertyValue{std::string("increases")});
    contexts.insert(e->props.at("context"));
    // context names an existing document; track its publication date
    bool found = false;
    for (NodeId id = 100; id < 150; ++id) {
      const Node& d = g.node(id);
      if (value_equal(d.props.at("documentID"), e->props.at("context"))) {
        found = true;
        earliest = std::min(earliest, std::get<Date>(d.props.at("publicationDate")));
      }
    }
    REQUIRE(found);
  }
  CHECK(contexts.size() == SyntheticAnchors::q1_doc_count);  // all distinct
  CHECK(earliest == Date{2001, 3, 15});  // deterministic date ladder
}

TEST_CASE("every relation context names a real document", "[generator][property]") {
  GeneratorConfig cfg = desk_config();
  cfg.seed = 7;
  const auto syn = generate_synthetic(cfg);
  std::set<PropertyValue> doc_ids;
  for (const Node& n : syn.graph.nodes())
    if (n.has_label("Document")) doc_ids.insert(n.props.at("documentID"));
  for (const Edge& e : syn.graph.edges()) {
    if (e.type != "hasRelation") continue;
    REQUIRE(e.props.count("function") == 1);
    REQUIRE(doc_ids.count(e.props.at("context")) == 1);
  }
}

TEST_CASE("contradictory pair floor scales with the fraction", "[generator]") {
  auto contradictions = [](const PropertyGraph& g) {
    std::map<std::pair<NodeId, NodeId>, std::pair<bool, bool>> seen;
    for (const Edge& e : g.edges()) {
      if (e.type != "hasRelation") continue;
      auto& [inc, dec] = seen[{e.start, e.end}];
      if (e.props.at("function") == PropertyValue{std::string("increases")}) inc = true;
      if (e.props.at("function") == PropertyValue{std::string("decreases")}) dec = true;
    }
    std::size_t n = 0;
    for (const auto& [pair, flags] : seen)
      if (flags.first && flags.second) ++n;
    return n;
  };

  // desk scale: ceil(0.1 * 400) = 40 guaranteed pairs
  CHECK(contradictions(generate_synthetic(desk_config()).graph) >= 40);

  // default scale: ceil(0.05 * 40000) = 2000 guaranteed pairs
  CHECK(contradictions(generate_synthetic(GeneratorConfig{}).graph) >= 2000);
}

TEST_CASE("anchors are dropped when the graph cannot carry them", "[generator]") {
  GeneratorConfig tiny;
  tiny.entity_count = 4;
  tiny.document_count = 2;
  tiny.author_count = 1;
  tiny.relation_count = 4;
  tiny.contradiction_fraction = 0.0;
  REQUIRE(!anchors_fit(tiny));
  const auto syn = generate_synthetic(tiny);
  CHECK(!syn.has_anchors);
  CHECK(syn.graph.node_count() == 7);
  std::size_t relations = 0;
  for (const Edge& e : syn.graph.edges())
    if (e.type == "hasRelation") ++relations;
  CHECK(relations == 4);
}

TEST_CASE("degenerate and invalid configs", "[generator]") {
  SECTION("empty config yields an empty frozen graph") {
    GeneratorConfig cfg;
    cfg.entity_count = 0;
    cfg.document_count = 0;
    cfg.author_count = 0;
    cfg.relation_count = 0;
    const auto syn = generate_synthetic(cfg);
    CHECK(syn.graph.node_count() == 0);
    CHECK(syn.graph.edge_count() == 0);
    CHECK(syn.graph.frozen());
    CHECK(!syn.has_anchors);
  }
  SECTION("fraction out of range") {
    GeneratorConfig cfg;
    cfg.contradiction_fraction = 1.5;
    CHECK_THROWS_WITH(generate_synthetic(cfg),
                      ContainsSubstring("contradiction_fraction"));
  }
  SECTION("no function values") {
    GeneratorConfig cfg;
    cfg.function_values.clear();
    CHECK_THROWS_AS(generate_synthetic(cfg), config_error);
  }
  SECTION("negative function weight") {
    GeneratorConfig cfg;
    cfg.function_values = {{"increases", -1.0}};
    CHECK_THROWS_WITH(generate_synthetic(cfg), ContainsSubstring("negative weight"));
  }
  SECTION("empty date range") {
    GeneratorConfig cfg;
    cfg.date_min = Date{2010, 1, 1};
    cfg.date_max = Date{2009, 12, 31};
    CHECK_THROWS_WITH(generate_synthetic(cfg), ContainsSubstring("date range"));
  }
  SECTION("relations without enough entities") {
    GeneratorConfig cfg;
    cfg.entity_count = 1;
    cfg.relation_count = 5;
    CHECK_THROWS_WITH(generate_synthetic(cfg),
                      ContainsSubstring("at least two entities"));
  }
  SECTION("contradiction demand above the edge budget") {
    GeneratorConfig cfg;
    cfg.entity_count = 10;
    cfg.document_count = 1;
    cfg.author_count = 0;
    cfg.relation_count = 3;
    cfg.contradiction_fraction = 1.0;  // 3 pairs need 6 edges
    CHECK_THROWS_WITH(generate_synthetic(cfg), ContainsSubstring("infeasible"));
  }
  SECTION("contradiction demand above the distinct pair budget") {
    GeneratorConfig cfg;
    cfg.entity_count = 2;  // one ordered pair either way, budget 1
    cfg.document_count = 1;
    cfg.author_count = 0;
    cfg.relation_count = 4;
    cfg.contradiction_fraction = 0.5;  // asks for 2 distinct pairs
    CHECK_THROWS_WITH(generate_synthetic(cfg),
                      ContainsSubstring("more distinct entity pairs"));
  }
}
