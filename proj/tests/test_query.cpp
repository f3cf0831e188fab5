// Query text layer: lexer/parser/printer round trips, semantic validation,
// and the structural classifier.

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "graphopt/bench.hpp"
#include "graphopt/classify.hpp"
#include "graphopt/parse.hpp"
#include "test_support.hpp"

using namespace graphopt;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string canonical_text(const std::string& name) {
  for (const auto& [n, text] : canonical_queries())
    if (n == name) return text;
  FAIL("no canonical query named " << name);
  return {};
}

}  // namespace

TEST_CASE("contradiction aggregation parses to the exact tree", "[parse]") {
  const Query q = parse_query(canonical_text("q15"));

  Query want;
  Chain first;
  first.nodes.push_back({"e1", "Entity", {}});
  first.rels.push_back({"r1",
                        "hasRelation",
                        {{"function", FilterValue{PropertyValue{std::string("increases")}}}},
                        Arrow::right});
  first.nodes.push_back({"e2", "Entity", {}});
  Chain second;
  second.nodes.push_back({"e1", std::nullopt, {}});
  second.rels.push_back({"r2",
                         "hasRelation",
                         {{"function", FilterValue{PropertyValue{std::string("decreases")}}}},
                         Arrow::right});
  second.nodes.push_back({"e2", std::nullopt, {}});
  want.chains = {first, second};
  want.ret.distinct = true;
  want.ret.items = {{ReturnAttr{"e1", "preferredLabel"}, std::nullopt},
                    {ReturnAttr{"e2", "preferredLabel"}, std::nullopt},
                    {ReturnCount{"r1"}, "increases"},
                    {ReturnCount{"r2"}, "decreases"}};
  want.ret.order_by = OrderKey{ReturnCount{"r1"}, true};

  CHECK(q == want);
  CHECK(q.has_aggregate());
  CHECK(!q.has_shortest_path());
}

TEST_CASE("entry-point join parses with cross-reference and limit", "[parse]") {
  const Query q = parse_query(canonical_text("q1"));
  REQUIRE(q.chains.size() == 2);
  REQUIRE(q.chains[0].nodes.size() == 2);
  REQUIRE(q.chains[1].nodes.size() == 2);

  // (doc:Document {documentID: r.context}) <-[r2:isAuthor]- (author:Author)
  const NodePattern& doc = q.chains[1].nodes[0];
  CHECK(doc.var == "doc");
  CHECK(doc.label == "Document");
  REQUIRE(doc.filters.size() == 1);
  CHECK(doc.filters[0].key == "documentID");
  CHECK(doc.filters[0].value == FilterValue{CrossRef{"r", "context"}});
  CHECK(q.chains[1].rels[0].arrow == Arrow::left);
  CHECK(q.chains[1].rels[0].type == "isAuthor");

  CHECK(q.ret.limit == 1);
  REQUIRE(q.ret.order_by.has_value());
  CHECK(!q.ret.order_by->descending);
  CHECK(q.ret.order_by->key == std::variant<ReturnAttr, ReturnCount>{
                                   ReturnAttr{"doc", "publicationDate"}});
}

TEST_CASE("shortest-path queries parse to path items", "[parse]") {
  for (const char* name : {"q4", "q12"}) {
    const Query q = parse_query(canonical_text(name));
    REQUIRE(q.chains.size() == 2);
    CHECK(q.chains[0].nodes.size() == 1);
    CHECK(q.chains[1].nodes.size() == 1);
    REQUIRE(q.ret.items.size() == 1);
    CHECK(std::holds_alternative<ReturnShortestPath>(q.ret.items[0].what));
    CHECK(q.has_shortest_path());
  }
}

TEST_CASE("print and parse are inverse on the canonical set", "[parse]") {
  for (const auto& [name, text] : canonical_queries()) {
    INFO(name);
    const Query q = parse_query(text);
    const Query again = parse_query(print_query(q));
    CHECK(again == q);
    CHECK(print_query(again) == print_query(q));  // printing is canonical
  }
}

TEST_CASE("print and parse are inverse on random queries", "[parse][property]") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const PropertyGraph g = testsupport::random_schema_graph(rng);
    testsupport::RandomQueryGen gen(rng, g);
    for (int i = 0; i < 50; ++i) {
      const Query q = gen();
      const std::string text = print_query(q);
      INFO(text);
      REQUIRE(parse_query(text) == q);
    }
  }
}

TEST_CASE("literal forms cover all four variants", "[parse]") {
  const Query q = parse_query(
      "MATCH (n:L {s: \"x \\\"y\\\"\", i: -3, f: 2.5, d: date(\"2001-02-03\")}) RETURN n");
  const auto& fs = q.chains[0].nodes[0].filters;
  REQUIRE(fs.size() == 4);
  CHECK(fs[0].value == FilterValue{PropertyValue{std::string("x \"y\"")}});
  CHECK(fs[1].value == FilterValue{PropertyValue{std::int64_t{-3}}});
  CHECK(fs[2].value == FilterValue{PropertyValue{2.5}});
  CHECK(fs[3].value == FilterValue{PropertyValue{Date{2001, 2, 3}}});
  // and every one of them survives a print round trip
  CHECK(parse_query(print_query(q)) == q);
}

TEST_CASE("lexical and grammatical failures carry the position", "[parse]") {
  SECTION("missing RETURN") {
    CHECK_THROWS_AS(parse_query("MATCH (n)"), parse_error);
  }
  SECTION("bad date literal") {
    CHECK_THROWS_WITH(parse_query("MATCH (n {d: date(\"2001-02-30\")}) RETURN n"),
                      ContainsSubstring("bad date literal") &&
                          ContainsSubstring("YYYY-MM-DD"));
  }
  SECTION("negative limit") {
    CHECK_THROWS_WITH(parse_query("MATCH (n) RETURN n LIMIT -1"),
                      ContainsSubstring("negative LIMIT"));
  }
  SECTION("trailing input") {
    CHECK_THROWS_WITH(parse_query("MATCH (n) RETURN n n"),
                      ContainsSubstring("trailing input"));
  }
  SECTION("unexpected character") {
    CHECK_THROWS_WITH(parse_query("MATCH (n) RETURN n %"),
                      ContainsSubstring("unexpected character"));
  }
  SECTION("position is line and column") {
    try {
      parse_query("MATCH (n)\nRETURN n LIMIT -4");
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line == 2);
      CHECK(e.column > 1);
      CHECK_THAT(e.what(), ContainsSubstring("parse error at 2:"));
    }
  }
}

TEST_CASE("semantic validation rejects inconsistent bindings", "[parse]") {
  SECTION("variable used as node and relationship") {
    CHECK_THROWS_AS(parse_query("MATCH (x)-[x]->(y) RETURN y"), parse_error);
  }
  SECTION("relationship variable bound twice") {
    CHECK_THROWS_AS(
        parse_query("MATCH (a)-[r]->(b), (c)-[r]->(d) RETURN a"), parse_error);
  }
  SECTION("cross-reference to a variable bound later") {
    CHECK_THROWS_WITH(
        parse_query("MATCH (d {k: r.context}), (a)-[r]->(b) RETURN d"),
        ContainsSubstring("before it is bound"));
  }
  SECTION("cross-reference to an unknown variable") {
    CHECK_THROWS_WITH(parse_query("MATCH (d {k: ghost.attr}) RETURN d"),
                      ContainsSubstring("unbound variable ghost"));
  }
  SECTION("unbound variable in RETURN") {
    CHECK_THROWS_WITH(parse_query("MATCH (n) RETURN m"),
                      ContainsSubstring("unbound variable m"));
  }
  SECTION("shortestPath arguments must be nodes") {
    CHECK_THROWS_WITH(
        parse_query("MATCH (a)-[r]->(b) RETURN shortestPath(a, r)"),
        ContainsSubstring("node variables"));
  }
  SECTION("at most one shortestPath item") {
    CHECK_THROWS_WITH(
        parse_query("MATCH (a), (b) RETURN shortestPath(a, b), shortestPath(b, a)"),
        ContainsSubstring("at most one"));
  }
  SECTION("ORDER BY count() needs a count item") {
    CHECK_THROWS_WITH(parse_query("MATCH (a)-[r]->(b) RETURN a ORDER BY count(r)"),
                      ContainsSubstring("count()"));
  }
  SECTION("ORDER BY attribute under DISTINCT must be derivable") {
    CHECK_THROWS_WITH(
        parse_query("MATCH (a)-[r]->(b) RETURN DISTINCT a.name ORDER BY b.name"),
        ContainsSubstring("derivable"));
    CHECK_THROWS_WITH(
        parse_query("MATCH (a)-[r]->(b) RETURN a.name, count(r) ORDER BY a.size"),
        ContainsSubstring("derivable"));
    // returning the attribute makes the same sort legal
    CHECK_NOTHROW(
        parse_query("MATCH (a) RETURN DISTINCT a.name ORDER BY a.name"));
    // returning the variable itself determines every attribute of it
    CHECK_NOTHROW(parse_query("MATCH (a) RETURN DISTINCT a ORDER BY a.name"));
    // without DISTINCT the representative row resolves it
    CHECK_NOTHROW(parse_query("MATCH (a) RETURN a.name ORDER BY a.size"));
  }
  SECTION("conflicting literal variants on one attribute") {
    CHECK_THROWS_WITH(
        parse_query("MATCH (a {k: 1}), (b {m: a.k})-[]->(c {j: 2}), (d)-[]->(a {k: \"x\"}) RETURN a"),
        ContainsSubstring("conflicting literal types"));
  }
}

TEST_CASE("classifier goldens for the canonical four", "[classify]") {
  SECTION("entry-point join: conjunctive-regular, local, six reads") {
    const auto c = classify(parse_query(canonical_text("q1")));
    CHECK(c.category == QueryCategory::pattern_crpq);
    CHECK(c.scope == QueryScope::local);
    CHECK(c.has_entry_point);
    CHECK(c.attribute_access_count == 6);
    CHECK(c.node_labels == std::set<std::string>{"Author", "Document", "Entity"});
    CHECK(c.edge_types == std::set<std::string>{"hasRelation", "isAuthor"});
    CHECK(c.attribute_datatypes == std::set<std::string>{"text"});
  }
  SECTION("contradiction aggregation: conjunctive-regular, local, four reads") {
    const auto c = classify(parse_query(canonical_text("q15")));
    CHECK(c.category == QueryCategory::pattern_crpq);
    CHECK(c.scope == QueryScope::local);
    CHECK(!c.has_entry_point);  // no literal filter sits on a labeled node
    CHECK(c.attribute_access_count == 4);
    CHECK(c.node_labels == std::set<std::string>{"Entity"});
    CHECK(c.edge_types == std::set<std::string>{"hasRelation"});
  }
  SECTION("the join reads more attributes than the aggregation") {
    CHECK(classify(parse_query(canonical_text("q1"))).attribute_access_count >
          classify(parse_query(canonical_text("q15"))).attribute_access_count);
  }
  SECTION("shortest-path pair: global reach with an entry point") {
    for (const char* name : {"q4", "q12"}) {
      const auto c = classify(parse_query(canonical_text(name)));
      CHECK(c.category == QueryCategory::reachability_shortest_path);
      CHECK(c.scope == QueryScope::local_and_global);
      CHECK(c.has_entry_point);
      CHECK(c.attribute_access_count == 2);
      CHECK(c.edge_types.empty());
    }
  }
}

TEST_CASE("classifier edges: summarization, CQ and entry points", "[classify]") {
  SECTION("bare aggregate over a trivial pattern is summarization") {
    const auto c = classify(parse_query("MATCH (n:Entity)-[r]->(m) RETURN count(r)"));
    CHECK(c.category == QueryCategory::summarization);
    CHECK(c.scope == QueryScope::local_and_global);
  }
  SECTION("aggregate over a longer chain is not") {
    const auto c =
        classify(parse_query("MATCH (n)-[r]->(m)-[s]->(o) RETURN count(r)"));
    CHECK(c.category == QueryCategory::pattern_cq);
  }
  SECTION("plain pattern without joins is CQ") {
    const auto c = classify(
        parse_query("MATCH (n:Entity {preferredLabel: \"x\"})-[:hasRelation]->(m) RETURN m"));
    CHECK(c.category == QueryCategory::pattern_cq);
    CHECK(c.scope == QueryScope::local);
    CHECK(c.has_entry_point);
    CHECK(c.attribute_datatypes == std::set<std::string>{"text"});
  }
  SECTION("literal on an unlabeled node is no entry point") {
    const auto c = classify(parse_query("MATCH (n {preferredLabel: \"x\"}) RETURN n"));
    CHECK(!c.has_entry_point);
  }
  SECTION("variable reuse alone lifts CQ to CRPQ") {
    const auto c = classify(parse_query("MATCH (a)-[]->(b), (b)-[]->(a) RETURN a"));
    CHECK(c.category == QueryCategory::pattern_crpq);
  }
  SECTION("shortestPath dominates every other signal") {
    const auto c = classify(parse_query(
        "MATCH (a:Entity {preferredLabel: \"x\"}), (b:Entity {preferredLabel: \"y\"}), "
        "(a)-[r:hasRelation]->(b) RETURN shortestPath(a, b), count(r)"));
    CHECK(c.category == QueryCategory::reachability_shortest_path);
    CHECK(c.scope == QueryScope::local_and_global);
  }
  SECTION("distinct filter variants accumulate") {
    const auto c = classify(parse_query(
        "MATCH (n:L {a: 1, b: \"s\", c: 1.5, d: date(\"2001-01-01\")}) RETURN n"));
    CHECK(c.attribute_datatypes ==
          std::set<std::string>{"date", "float", "integer", "text"});
    CHECK(c.attribute_access_count == 4);
  }
}

TEST_CASE("category and scope names are stable", "[classify]") {
  CHECK(std::string(to_string(QueryCategory::reachability_shortest_path)) ==
        "reachability/shortest-path");
  CHECK(std::string(to_string(QueryCategory::pattern_crpq)) == "pattern/CRPQ");
  CHECK(std::string(to_string(QueryCategory::pattern_cq)) == "pattern/CQ");
  CHECK(std::string(to_string(QueryCategory::summarization)) == "summarization");
  CHECK(std::string(to_string(QueryScope::local)) == "local");
  CHECK(std::string(to_string(QueryScope::local_and_global)) == "local_and_global");
}
