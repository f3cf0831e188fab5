#ifndef GRAPHOPT_BENCH_HPP
#define GRAPHOPT_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graphopt/backend.hpp"
#include "graphopt/generate.hpp"
#include "graphopt/kv.hpp"
#include "graphopt/optimizer.hpp"
#include "graphopt/parse.hpp"
#include "graphopt/table.hpp"

namespace graphopt {

struct bench_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Strategies disagreed on a result; kept separate because the CLI maps it
 * to its own exit code. */
struct equivalence_error : bench_error {
  using bench_error::bench_error;
};

/* One (query, strategy, run) measurement. Everything except wall_us is
 * deterministic for a fixed graph and cost model; acceptance keys off the
 * modeled cost and counters, wall time is informational. */
struct ExecutionReport {
  std::string query;
  Strategy strategy = Strategy::naive;
  int run = 0;
  std::int64_t wall_us = 0;
  double modeled_us = 0.0;
  CounterSnapshot counters;
  std::string checksum;  // result-table hash; not a CSV column
};

struct BenchConfig {
  std::vector<std::string> queries{"q1", "q4", "q12", "q15"};
  std::vector<Strategy> strategies{Strategy::naive, Strategy::client_algorithm,
                                   Strategy::polyglot};
  int reps = 20;
  bool allow_disconnected = false;
};

/* The four canonical benchmark queries, phrased against the synthetic
 * generator's deterministic anchors so every seed yields non-trivial work:
 * an entry-point pattern join with ORDER BY/LIMIT (q1), two shortest-path
 * queries between planted anchor pairs (q4, q12) and a whole-graph
 * contradiction aggregation (q15). */
inline std::vector<std::pair<std::string, std::string>> canonical_queries() {
  const std::string q1 = std::string("MATCH (n:Entity {preferredLabel: \"") +
                         SyntheticAnchors::q1_source_label +
                         "\"})-[r:hasRelation {function: \"increases\"}]->"
                         "(m:Entity {preferredLabel: \"" +
                         SyntheticAnchors::q1_target_label +
                         "\"}), (doc:Document {documentID: r.context})"
                         "<-[r2:isAuthor]-(author:Author) "
                         "RETURN doc, author ORDER BY doc.publicationDate LIMIT 1";
  const std::string q4 = std::string("MATCH (entity1:Entity {preferredLabel: \"") +
                         SyntheticAnchors::entity_a_label +
                         "\"}), (entity2:Entity {preferredLabel: \"" +
                         SyntheticAnchors::entity_b_label +
                         "\"}) RETURN shortestPath(entity1, entity2)";
  const std::string q12 = std::string("MATCH (doc1:Document {documentID: \"") +
                          SyntheticAnchors::doc_a_id +
                          "\"}), (doc2:Document {documentID: \"" +
                          SyntheticAnchors::doc_b_id +
                          "\"}) RETURN shortestPath(doc1, doc2)";
  const std::string q15 =
      "MATCH (e1:Entity)-[r1:hasRelation {function: \"increases\"}]->(e2:Entity), "
      "(e1)-[r2:hasRelation {function: \"decreases\"}]->(e2) "
      "RETURN DISTINCT e1.preferredLabel, e2.preferredLabel, "
      "count(r1) AS `increases`, count(r2) AS `decreases` ORDER BY count(r1) DESC";
  return {{"q1", q1}, {"q4", q4}, {"q12", q12}, {"q15", q15}};
}

namespace detail {

inline std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}
inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}
/* Means shown in the md table must survive a CSV round trip bit-exactly,
 * so they are computed from values already pushed through the CSV's %.3f
 * formatting (idempotent for data loaded back from a CSV). */
inline double round3(double v) { return std::strtod(fmt3(v).c_str(), nullptr); }

inline std::string row_repr(const Row& row) {
  std::string out = "[";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ", ";
    out += cell_repr(row[i]);
  }
  return out + "]";
}

}  // namespace detail

/* Run every requested query under every requested strategy, reps times.
 * The first run of each strategy is compared row-for-row against the first
 * strategy's result: any difference is a hard failure naming the query, the
 * two strategies and the first differing row. Shortest-path queries must
 * find a path unless allow_disconnected is set. */
inline std::vector<ExecutionReport> run_benchmark(const BenchConfig& config,
                                                  Backend& backend) {
  if (config.reps < 1)
    throw bench_error("repetitions must be at least 1 (got " +
                      std::to_string(config.reps) + ")");
  if (config.queries.empty()) throw bench_error("no queries requested");
  if (config.strategies.empty()) throw bench_error("no strategies requested");

  std::map<std::string, std::string> texts;
  for (auto& [name, text] : canonical_queries()) texts.emplace(name, text);

  std::vector<ExecutionReport> reports;
  for (const std::string& name : config.queries) {
    auto it = texts.find(name);
    if (it == texts.end())
      throw bench_error("unknown query " + name + " (canonical set: q1, q4, q12, q15)");
    const Query q = parse_query(it->second);
    const QueryClassification cls = classify(q);

    /* The key-value store is provisioned offline (uncounted) from exactly
     * the (label, key) pairs the polyglot plan wants to offload. */
    std::optional<KVStore> kv;
    bool wants_polyglot = false;
    for (Strategy s : config.strategies)
      if (s == Strategy::polyglot) wants_polyglot = true;
    if (wants_polyglot) {
      std::set<std::pair<std::string, std::string>> pair_set;
      for (const OffloadPair& p : offload_pairs(q)) pair_set.insert({p.label, p.key});
      if (!pair_set.empty())
        kv = build_from_graph(backend.graph(),
                              {pair_set.begin(), pair_set.end()});
    }

    std::optional<ResultTable> baseline;
    Strategy baseline_strategy = Strategy::naive;
    for (Strategy s : config.strategies) {
      const KVStore* kvp = (s == Strategy::polyglot && kv) ? &*kv : nullptr;
      const Plan p = plan(q, s, cls, backend, kvp);
      std::optional<ResultTable> first_table;
      for (int run = 0; run < config.reps; ++run) {
        const auto t0 = std::chrono::steady_clock::now();
        ExecOutcome out = execute_plan(p, backend, kvp);
        const auto t1 = std::chrono::steady_clock::now();
        ExecutionReport r;
        r.query = name;
        r.strategy = s;
        r.run = run;
        r.wall_us =
            std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
        r.modeled_us = out.modeled_us;
        r.counters = out.counters;
        r.checksum = checksum_hex(table_checksum(out.table));
        reports.push_back(std::move(r));
        if (run == 0) first_table = std::move(out.table);
      }
      if (!baseline) {
        baseline = std::move(first_table);
        baseline_strategy = s;
      } else if (!(*first_table == *baseline)) {
        std::size_t i = 0;
        const auto& a = baseline->rows;
        const auto& b = first_table->rows;
        while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
        const std::string left = i < a.size() ? detail::row_repr(a[i]) : "<no row>";
        const std::string right = i < b.size() ? detail::row_repr(b[i]) : "<no row>";
        throw equivalence_error(name + ": " + to_string(baseline_strategy) + " vs " +
                                to_string(s) + " disagree at row " + std::to_string(i) +
                                ": " + left + " vs " + right);
      }
    }

    if (!config.allow_disconnected && q.has_shortest_path() && baseline) {
      for (std::size_t col = 0; col < q.ret.items.size(); ++col) {
        if (!std::holds_alternative<ReturnShortestPath>(q.ret.items[col].what))
          continue;
        for (const Row& row : baseline->rows)
          if (std::holds_alternative<std::monostate>(row[col]))
            throw bench_error(
                name + ": no path for " + print_return_item(q.ret.items[col]) +
                " (pass allow_disconnected to accept unreachable endpoints)");
      }
    }
  }
  return reports;
}

inline const char* csv_header() {
  return "query,strategy,run,wall_us,modeled_us,node_lookup,index_lookup,"
         "neighbours,attribute_access,edges_between,rows,kv_lookup";
}

inline void emit_csv(const std::vector<ExecutionReport>& reports, std::ostream& os) {
  os << csv_header() << '\n';
  for (const ExecutionReport& r : reports) {
    os << r.query << ',' << to_string(r.strategy) << ',' << r.run << ','
       << r.wall_us << ',' << detail::fmt3(r.modeled_us) << ','
       << r.counters.node_lookup << ',' << r.counters.index_lookup << ','
       << r.counters.neighbours << ',' << r.counters.attribute_access << ','
       << r.counters.edges_between << ',' << r.counters.rows_transferred << ','
       << r.counters.kv_lookup << '\n';
  }
}

inline std::vector<ExecutionReport> load_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != csv_header())
    throw bench_error("CSV header mismatch");
  std::vector<ExecutionReport> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 12)
      throw bench_error("CSV line " + std::to_string(lineno) + ": expected 12 fields");
    ExecutionReport r;
    r.query = f[0];
    auto s = parse_strategy(f[1]);
    if (!s) throw bench_error("CSV line " + std::to_string(lineno) +
                              ": unknown strategy " + f[1]);
    r.strategy = *s;
    r.run = std::stoi(f[2]);
    r.wall_us = std::stoll(f[3]);
    r.modeled_us = std::strtod(f[4].c_str(), nullptr);
    r.counters.node_lookup = std::stoull(f[5]);
    r.counters.index_lookup = std::stoull(f[6]);
    r.counters.neighbours = std::stoull(f[7]);
    r.counters.attribute_access = std::stoull(f[8]);
    r.counters.edges_between = std::stoull(f[9]);
    r.counters.rows_transferred = std::stoull(f[10]);
    r.counters.kv_lookup = std::stoull(f[11]);
    out.push_back(std::move(r));
  }
  return out;
}

struct StrategyMeans {
  Strategy strategy = Strategy::naive;
  double mean_modeled_us = 0.0;
  double mean_wall_us = 0.0;
  int runs = 0;
};
struct QuerySummary {
  std::string query;
  std::vector<StrategyMeans> strategies;  // first listed is the speedup baseline
};

inline std::vector<QuerySummary> summarize(const std::vector<ExecutionReport>& reports) {
  std::vector<QuerySummary> out;
  auto find_query = [&](const std::string& name) -> QuerySummary& {
    for (QuerySummary& s : out)
      if (s.query == name) return s;
    out.push_back({name, {}});
    return out.back();
  };
  for (const ExecutionReport& r : reports) {
    QuerySummary& qs = find_query(r.query);
    StrategyMeans* m = nullptr;
    for (StrategyMeans& sm : qs.strategies)
      if (sm.strategy == r.strategy) m = &sm;
    if (!m) {
      qs.strategies.push_back({r.strategy, 0.0, 0.0, 0});
      m = &qs.strategies.back();
    }
    m->mean_modeled_us += detail::round3(r.modeled_us);
    m->mean_wall_us += static_cast<double>(r.wall_us);
    ++m->runs;
  }
  for (QuerySummary& qs : out)
    for (StrategyMeans& m : qs.strategies) {
      m.mean_modeled_us /= m.runs;
      m.mean_wall_us /= m.runs;
    }
  return out;
}

/* Per-query means table with speedup factors relative to the first
 * strategy. A single-strategy run has nothing to compare against, so the
 * speedup columns stay empty. */
inline void emit_md(const std::vector<ExecutionReport>& reports, std::ostream& os) {
  os << "# Benchmark results\n";
  for (const QuerySummary& qs : summarize(reports)) {
    os << "\n## " << qs.query << "\n\n";
    os << "| strategy | mean modeled (us) | mean wall (us) | speedup (modeled) | "
          "speedup (wall) |\n";
    os << "|---|---|---|---|---|\n";
    const bool single = qs.strategies.size() < 2;
    const double base_modeled = qs.strategies.front().mean_modeled_us;
    const double base_wall = qs.strategies.front().mean_wall_us;
    for (const StrategyMeans& m : qs.strategies) {
      os << "| " << to_string(m.strategy) << " | " << detail::fmt3(m.mean_modeled_us)
         << " | " << detail::fmt3(m.mean_wall_us) << " | ";
      if (single || m.mean_modeled_us == 0.0)
        os << " | ";
      else
        os << detail::fmt2(base_modeled / m.mean_modeled_us) << " | ";
      if (single || m.mean_wall_us == 0.0)
        os << " |\n";
      else
        os << detail::fmt2(base_wall / m.mean_wall_us) << " |\n";
    }
  }
}

/* One line chart per query: run index on x, modeled cost on y, one polyline
 * per strategy. Plain SVG so outputs diff cleanly. */
inline void emit_svg(const std::vector<ExecutionReport>& reports,
                     const std::string& query, std::ostream& os) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
  std::vector<std::pair<Strategy, std::vector<double>>> series;
  for (const ExecutionReport& r : reports) {
    if (r.query != query) continue;
    std::vector<double>* runs = nullptr;
    for (auto& [s, v] : series)
      if (s == r.strategy) runs = &v;
    if (!runs) {
      series.push_back({r.strategy, {}});
      runs = &series.back().second;
    }
    runs->push_back(r.modeled_us);
  }
  if (series.empty()) throw bench_error("no reports for query " + query);

  const double w = 640, h = 400, ml = 80, mr = 140, mt = 40, mb = 40;
  double ymax = 0;
  std::size_t xmax = 1;
  for (const auto& [s, v] : series) {
    for (double y : v) ymax = std::max(ymax, y);
    xmax = std::max(xmax, v.size());
  }
  if (ymax == 0) ymax = 1;
  auto xpos = [&](std::size_t i) {
    return ml + (xmax == 1 ? 0.0
                           : (w - ml - mr) * static_cast<double>(i) /
                                 static_cast<double>(xmax - 1));
  };
  auto ypos = [&](double v) { return h - mb - (h - mt - mb) * v / (ymax * 1.05); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
     << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" "
        "font-size=\"16\">"
     << query << " modeled cost per run (us)</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
     << h - mb << "\" stroke=\"#444\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
     << "\" y2=\"" << h - mb << "\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * 1.05 * t / 4;
    os << "<text x=\"" << ml - 8 << "\" y=\"" << detail::fmt2(ypos(v) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
       << detail::fmt2(v) << "</text>\n";
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& [s, v] = series[si];
    const char* color = palette[si % 3];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" "
          "points=\"";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ' ';
      os << detail::fmt2(xpos(i)) << ',' << detail::fmt2(ypos(v[i]));
    }
    os << "\"/>\n";
    const double ly = mt + 16.0 * static_cast<double>(si);
    os << "<rect x=\"" << w - mr + 12 << "\" y=\"" << detail::fmt2(ly) << "\" "
          "width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << w - mr + 30 << "\" y=\"" << detail::fmt2(ly + 6)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << to_string(s)
       << "</text>\n";
  }
  os << "</svg>\n";
}

/* Write results.csv, results.md and one <query>.svg per query into dir.
 * Returns the paths written. */
inline std::vector<std::string> emit_results(const std::vector<ExecutionReport>& reports,
                                             const std::string& dir) {
  if (reports.empty()) throw bench_error("no reports to emit");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream os(path);
    if (!os) throw bench_error("cannot open " + path + " for writing");
    written.push_back(path);
    return os;
  };
  {
    std::ofstream os = open("results.csv");
    emit_csv(reports, os);
  }
  {
    std::ofstream os = open("results.md");
    emit_md(reports, os);
  }
  std::vector<std::string> queries;
  for (const ExecutionReport& r : reports)
    if (std::find(queries.begin(), queries.end(), r.query) == queries.end())
      queries.push_back(r.query);
  for (const std::string& q : queries) {
    std::ofstream os = open(q + ".svg");
    emit_svg(reports, q, os);
  }
  return written;
}

}  // namespace graphopt

#endif
