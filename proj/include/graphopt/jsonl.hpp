#ifndef GRAPHOPT_JSONL_HPP
#define GRAPHOPT_JSONL_HPP

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "graphopt/graph.hpp"
#include "graphopt/value.hpp"

namespace graphopt {

/* Graphs serialize as JSON Lines: one object per line, node lines first,
 * then edge lines, each block ordered by id. Dates are tagged objects:
 *   {"$date": "2005-09-14"}
 * so a round trip never turns a date into a plain string. */

namespace detail {

inline nlohmann::json value_to_json(const PropertyValue& v) {
  switch (v.index()) {
    case 0: return std::get<std::string>(v);
    case 1: return std::get<std::int64_t>(v);
    case 2: return std::get<double>(v);
    default: return nlohmann::json{{"$date", format_date(std::get<Date>(v))}};
  }
}

inline PropertyValue value_from_json(const nlohmann::json& j,
                                     const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer() || j.is_number_unsigned())
    return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_object() && j.size() == 1 && j.contains("$date") &&
      j["$date"].is_string()) {
    auto d = parse_date(j["$date"].get<std::string>());
    if (!d) throw graph_error(where + ": bad $date value " + j["$date"].dump());
    return *d;
  }
  throw graph_error(where + ": unsupported property value " + j.dump());
}

inline std::map<std::string, PropertyValue> props_from_json(
    const nlohmann::json& j, const std::string& where) {
  std::map<std::string, PropertyValue> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out.emplace(it.key(), value_from_json(it.value(), where));
  return out;
}

}  // namespace detail

inline void save_graph(const PropertyGraph& g, std::ostream& os) {
  using nlohmann::json;
  std::vector<const Node*> ns;
  for (const Node& n : g.nodes()) ns.push_back(&n);
  std::sort(ns.begin(), ns.end(),
            [](const Node* a, const Node* b) { return a->id < b->id; });
  for (const Node* n : ns) {
    json j;
    j["kind"] = "node";
    j["id"] = n->id;
    j["labels"] = n->labels;
    json props = json::object();
    for (const auto& [k, v] : n->props) props[k] = detail::value_to_json(v);
    j["props"] = props;
    os << j.dump() << '\n';
  }
  std::vector<const Edge*> es;
  for (const Edge& e : g.edges()) es.push_back(&e);
  std::sort(es.begin(), es.end(),
            [](const Edge* a, const Edge* b) { return a->id < b->id; });
  for (const Edge* e : es) {
    json j;
    j["kind"] = "edge";
    j["id"] = e->id;
    j["type"] = e->type;
    j["start"] = e->start;
    j["end"] = e->end;
    json props = json::object();
    for (const auto& [k, v] : e->props) props[k] = detail::value_to_json(v);
    j["props"] = props;
    os << j.dump() << '\n';
  }
}

inline void save_graph(const PropertyGraph& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw graph_error("cannot open " + path + " for writing");
  save_graph(g, os);
}

/* Node and edge lines may arrive in any order; endpoints are resolved after
 * the full read. Errors carry the 1-based line number. */
inline PropertyGraph load_graph(std::istream& is) {
  PropertyGraph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw graph_error(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("kind"))
      throw graph_error(where + ": expected an object with a \"kind\" field");
    const std::string kind = j["kind"].get<std::string>();
    try {
      if (kind == "node") {
        Node n;
        n.id = j.at("id").get<NodeId>();
        n.labels = j.at("labels").get<std::vector<std::string>>();
        n.props = detail::props_from_json(j.value("props", nlohmann::json::object()), where);
        g.add_node(std::move(n));
      } else if (kind == "edge") {
        Edge e;
        e.id = j.at("id").get<EdgeId>();
        e.type = j.at("type").get<std::string>();
        e.start = j.at("start").get<NodeId>();
        e.end = j.at("end").get<NodeId>();
        e.props = detail::props_from_json(j.value("props", nlohmann::json::object()), where);
        g.add_edge(std::move(e));
      } else {
        throw graph_error("unknown kind \"" + kind + "\"");
      }
    } catch (const nlohmann::json::exception& e) {
      throw graph_error(where + ": " + e.what());
    } catch (const graph_error& e) {
      throw graph_error(where + ": " + e.what());
    }
  }
  g.freeze();  // reports dangling edge endpoints
  return g;
}

inline PropertyGraph load_graph(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw graph_error("cannot open " + path);
  return load_graph(is);
}

inline std::string graph_to_string(const PropertyGraph& g) {
  std::ostringstream os;
  save_graph(g, os);
  return os.str();
}

}  // namespace graphopt

#endif
