#ifndef GRAPHOPT_TABLE_HPP
#define GRAPHOPT_TABLE_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "graphopt/graph.hpp"
#include "graphopt/value.hpp"

namespace graphopt {

/* Result cells: null, a node reference, an edge reference, a node path, or
 * a property value. References carry ids only; rendering an id is free,
 * rendering an attribute is what executors pay for. */

struct NodeRefCell {
  NodeId id;
  friend bool operator==(const NodeRefCell&, const NodeRefCell&) = default;
};
struct EdgeRefCell {
  EdgeId id;
  friend bool operator==(const EdgeRefCell&, const EdgeRefCell&) = default;
};
struct PathCell {
  std::vector<NodeId> nodes;  // s..e inclusive; empty means "no path"
  friend bool operator==(const PathCell&, const PathCell&) = default;
};

using Cell = std::variant<std::monostate, NodeRefCell, EdgeRefCell, PathCell,
                          PropertyValue>;

/* Total canonical order over cells: variant rank, then value. This order is
 * what makes result sets, tie-breaks, and checksums deterministic across
 * execution strategies. */
inline int cell_compare(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  switch (a.index()) {
    case 0: return 0;
    case 1: {
      auto x = std::get<NodeRefCell>(a).id, y = std::get<NodeRefCell>(b).id;
      return x < y ? -1 : x > y ? 1 : 0;
    }
    case 2: {
      auto x = std::get<EdgeRefCell>(a).id, y = std::get<EdgeRefCell>(b).id;
      return x < y ? -1 : x > y ? 1 : 0;
    }
    case 3: {
      const auto& x = std::get<PathCell>(a).nodes;
      const auto& y = std::get<PathCell>(b).nodes;
      if (x < y) return -1;
      if (y < x) return 1;
      return 0;
    }
    default:
      return value_compare(std::get<PropertyValue>(a), std::get<PropertyValue>(b));
  }
}

using Row = std::vector<Cell>;

inline int row_compare(const Row& a, const Row& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = cell_compare(a[i], b[i])) return c;
  return a.size() < b.size() ? -1 : a.size() > b.size() ? 1 : 0;
}

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<Row> rows;

  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

inline std::string cell_repr(const Cell& c) {
  switch (c.index()) {
    case 0: return "null";
    case 1: return "n#" + std::to_string(std::get<NodeRefCell>(c).id);
    case 2: return "e#" + std::to_string(std::get<EdgeRefCell>(c).id);
    case 3: {
      std::string out = "p[";
      const auto& nodes = std::get<PathCell>(c).nodes;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(nodes[i]);
      }
      return out + "]";
    }
    default: return value_repr(std::get<PropertyValue>(c));
  }
}

/* Order-insensitive content hash: rows sorted canonically, then FNV-1a over
 * a flat serialization. Two tables with equal columns and equal row
 * multisets hash identically, whatever order execution produced. */
inline std::uint64_t table_checksum(const ResultTable& t) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
  };
  for (const auto& col : t.columns) mix(col);
  std::vector<const Row*> sorted;
  sorted.reserve(t.rows.size());
  for (const Row& r : t.rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const Row* a, const Row* b) { return row_compare(*a, *b) < 0; });
  for (const Row* r : sorted) {
    mix("|");
    for (const Cell& c : *r) mix(cell_repr(c));
  }
  return h;
}

inline std::string checksum_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string cell_display(const Cell& c) {
  switch (c.index()) {
    case 0: return "null";
    case 1: return "(" + std::to_string(std::get<NodeRefCell>(c).id) + ")";
    case 2: return "[" + std::to_string(std::get<EdgeRefCell>(c).id) + "]";
    case 3: {
      const auto& nodes = std::get<PathCell>(c).nodes;
      if (nodes.empty()) return "no path";
      std::string out;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) out += "->";
        out += "(" + std::to_string(nodes[i]) + ")";
      }
      return out;
    }
    default: return value_display(std::get<PropertyValue>(c));
  }
}

inline std::string render_table(const ResultTable& t) {
  std::vector<std::size_t> widths(t.columns.size());
  for (std::size_t i = 0; i < t.columns.size(); ++i) widths[i] = t.columns[i].size();
  std::vector<std::vector<std::string>> cells;
  for (const Row& r : t.rows) {
    std::vector<std::string> line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line.push_back(cell_display(r[i]));
      if (i < widths.size()) widths[i] = std::max(widths[i], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out += (i ? " | " : "") + pad(t.columns[i], widths[i]);
  out += '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out += (i ? "-+-" : "") + std::string(widths[i], '-');
  out += '\n';
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i)
      out += (i ? " | " : "") + pad(line[i], i < widths.size() ? widths[i] : line[i].size());
    out += '\n';
  }
  out += std::to_string(t.rows.size()) + (t.rows.size() == 1 ? " row\n" : " rows\n");
  return out;
}

}  // namespace graphopt

#endif
