// Key-value attribute store: total coverage per (label, key), absent
// markers, counted lookups, and the JSONL round trip.

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "graphopt/backend.hpp"
#include "graphopt/kv.hpp"
#include "test_support.hpp"

using namespace graphopt;
using Catch::Matchers::ContainsSubstring;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

std::map<std::pair<NodeId, std::string>, std::optional<PropertyValue>> dump(
    const KVStore& s) {
  std::map<std::pair<NodeId, std::string>, std::optional<PropertyValue>> out;
  s.for_each_entry([&](NodeId id, const std::string& key,
                       const std::optional<PropertyValue>& v) {
    out[{id, key}] = v;
  });
  return out;
}

}  // namespace

TEST_CASE("ingestion covers every node of the label, absents included", "[kv]") {
  std::mt19937_64 rng(41);
  const PropertyGraph g = testsupport::random_schema_graph(rng);
  const KVStore kv =
      build_from_graph(g, Pairs{{"Document", "publicationDate"}, {"Entity", "weight"}});

  CHECK(kv.covers("Document", "publicationDate"));
  CHECK(kv.covers("Entity", "weight"));
  CHECK(!kv.covers("Entity", "preferredLabel"));
  CHECK(kv.coverage().size() == 2);

  std::size_t docs = 0, entities = 0, absents = 0;
  for (const Node& n : g.nodes()) {
    if (n.has_label("Document")) {
      ++docs;
      const auto v = kv.kv_get(n.id, "publicationDate");
      const auto it = n.props.find("publicationDate");
      if (it == n.props.end()) {
        CHECK(!v.has_value());  // explicit absent marker, not an error
        ++absents;
      } else {
        REQUIRE(v.has_value());
        CHECK(value_equal(*v, it->second));
      }
    }
    if (n.has_label("Entity")) ++entities;
  }
  CHECK(kv.size() == docs + entities);
  // the schema graph drops publicationDate on roughly half its documents,
  // so the absent-marker path genuinely ran
  CHECK(absents > 0);
}

TEST_CASE("kv answers match the graph attribute read everywhere", "[kv][property]") {
  std::mt19937_64 rng(43);
  testsupport::SchemaGraphParams big;
  big.entities = 60;
  big.documents = 40;
  big.authors = 10;
  const PropertyGraph g = testsupport::random_schema_graph(rng, big);
  const KVStore kv = build_from_graph(
      g, Pairs{{"Entity", "preferredLabel"}, {"Entity", "weight"},
               {"Document", "publicationDate"}, {"Document", "documentID"}});
  Backend b(g);

  std::uniform_int_distribution<NodeId> pick(0, g.node_count() - 1);
  const std::vector<std::pair<std::string, std::string>> keys = {
      {"Entity", "preferredLabel"},
      {"Entity", "weight"},
      {"Document", "publicationDate"},
      {"Document", "documentID"}};
  std::size_t checked = 0;
  while (checked < 1000) {
    const NodeId id = pick(rng);
    for (const auto& [label, key] : keys) {
      if (!g.node(id).has_label(label)) continue;
      const auto direct = b.get_attribute(ElemRef::of_node(id), key);
      const auto cached = kv.kv_get(id, key);
      REQUIRE(direct.has_value() == cached.has_value());
      if (direct) REQUIRE(value_equal(*direct, *cached));
      ++checked;
    }
  }
}

TEST_CASE("uncovered is an error, absent is an answer", "[kv]") {
  KVStore kv;
  kv.add_coverage("Entity", "weight");
  kv.insert(3, "weight", std::nullopt);          // absent marker
  kv.insert(4, "weight", PropertyValue{std::int64_t{9}});

  CHECK(!kv.kv_get(3, "weight").has_value());
  CHECK(kv.kv_get(4, "weight") == std::optional<PropertyValue>{PropertyValue{std::int64_t{9}}});
  CHECK_THROWS_WITH(kv.kv_get(5, "weight"),
                    ContainsSubstring("uncovered") && ContainsSubstring("node 5"));
  CHECK_THROWS_AS(kv.kv_get(3, "color"), kv_error);
}

TEST_CASE("lookups count successful reads only", "[kv]") {
  KVStore kv;
  kv.insert(0, "k", PropertyValue{std::int64_t{1}});
  kv.insert(1, "k", std::nullopt);
  CHECK(kv.lookups() == 0);
  kv.kv_get(0, "k");
  kv.kv_get(1, "k");  // absent still costs a lookup
  kv.kv_get(0, "k");
  CHECK(kv.lookups() == 3);
  CHECK_THROWS_AS(kv.kv_get(9, "k"), kv_error);
  CHECK(kv.lookups() == 3);  // the refused read never reached the store
}

TEST_CASE("kv survives a JSONL round trip", "[kv]") {
  std::mt19937_64 rng(47);
  const PropertyGraph g = testsupport::random_schema_graph(rng);
  const KVStore kv =
      build_from_graph(g, Pairs{{"Document", "publicationDate"}, {"Entity", "weight"}});

  std::ostringstream os;
  save_kv(kv, os);
  std::istringstream is(os.str());
  const KVStore back = load_kv(is);

  CHECK(back.coverage() == kv.coverage());
  CHECK(back.size() == kv.size());
  CHECK(dump(back) == dump(kv));
  CHECK(back.lookups() == 0);  // the counter is runtime state, not data

  // serialization is canonical: saving the reload reproduces the bytes
  std::ostringstream os2;
  save_kv(back, os2);
  CHECK(os2.str() == os.str());
}

TEST_CASE("kv stream rejects bad input", "[kv]") {
  SECTION("missing coverage manifest") {
    std::istringstream is("{\"id\":0,\"key\":\"k\",\"value\":1}\n");
    CHECK_THROWS_WITH(load_kv(is), ContainsSubstring("no coverage manifest"));
  }
  SECTION("malformed line is reported by number") {
    std::istringstream is(
        "{\"kind\":\"coverage\",\"pairs\":[[\"L\",\"k\"]]}\n"
        "{\"id\":0,\"key\":\"k\"\n");
    CHECK_THROWS_WITH(load_kv(is), ContainsSubstring("line 2"));
  }
  SECTION("entry without a value field") {
    std::istringstream is(
        "{\"kind\":\"coverage\",\"pairs\":[]}\n"
        "{\"id\":0,\"key\":\"k\"}\n");
    CHECK_THROWS_AS(load_kv(is), kv_error);
  }
  SECTION("null value loads as the absent marker") {
    std::istringstream is(
        "{\"kind\":\"coverage\",\"pairs\":[[\"L\",\"k\"]]}\n"
        "{\"id\":7,\"key\":\"k\",\"value\":null}\n");
    const KVStore kv = load_kv(is);
    CHECK(!kv.kv_get(7, "k").has_value());
  }
}

TEST_CASE("ingestion preconditions", "[kv]") {
  std::mt19937_64 rng(53);
  const PropertyGraph g = testsupport::random_schema_graph(rng);
  CHECK_THROWS_WITH(build_from_graph(g, Pairs{}),
                    ContainsSubstring("no (label, key) pairs"));
  CHECK_THROWS_WITH(build_from_graph(g, Pairs{{"Ghost", "k"}}),
                    ContainsSubstring("unknown label Ghost"));
  // a key nobody carries is fine: total coverage in absent markers
  const KVStore kv = build_from_graph(g, Pairs{{"Author", "shoe_size"}});
  CHECK(kv.covers("Author", "shoe_size"));
  for (const Node& n : g.nodes())
    if (n.has_label("Author")) CHECK(!kv.kv_get(n.id, "shoe_size").has_value());
}
