/* graphopt CLI: benchmark the canonical query set, classify a query, run a
 * single query, or dump a synthetic graph.
 * Exit codes: 0 success, 2 strategy-equivalence mismatch, 1 usage/IO error. */

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "graphopt/graphopt.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string field;
  while (std::getline(is, field, ','))
    if (!field.empty()) out.push_back(field);
  return out;
}

nlohmann::json classification_json(const graphopt::QueryClassification& c) {
  nlohmann::json j;
  j["scope"] = graphopt::to_string(c.scope);
  j["category"] = graphopt::to_string(c.category);
  j["has_entry_point"] = c.has_entry_point;
  j["attribute_access_count"] = c.attribute_access_count;
  j["node_labels"] = c.node_labels;
  j["edge_types"] = c.edge_types;
  j["attribute_datatypes"] = c.attribute_datatypes;
  return j;
}

struct GenArgs {
  graphopt::GeneratorConfig cfg;
  void attach(CLI::App* cmd) {
    cmd->add_option("--entities", cfg.entity_count, "entity node count");
    cmd->add_option("--docs", cfg.document_count, "document node count");
    cmd->add_option("--authors", cfg.author_count, "author node count");
    cmd->add_option("--relations", cfg.relation_count, "hasRelation edge count");
    cmd->add_option("--seed", cfg.seed, "generator seed");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-query optimization benchmark"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "run the canonical benchmark");
  std::string bench_graph;
  bool bench_generate = false;
  GenArgs bench_gen;
  std::string queries_arg = "q1,q4,q12,q15";
  std::string strategies_arg = "naive,opt1,opt2";
  int reps = 20;
  std::string cost_model_path;
  std::string out_dir = "results";
  bool allow_disconnected = false;
  bench->add_option("--graph", bench_graph, "graph JSONL to load");
  bench->add_flag("--generate", bench_generate, "generate a synthetic graph");
  bench_gen.attach(bench);
  bench->add_option("--queries", queries_arg, "comma-separated query ids");
  bench->add_option("--strategies", strategies_arg, "comma-separated strategies");
  bench->add_option("--reps", reps, "repetitions per (query, strategy)");
  bench->add_option("--cost-model", cost_model_path, "cost model JSON file");
  bench->add_option("--out", out_dir, "output directory");
  bench->add_flag("--allow-disconnected", allow_disconnected,
                  "accept unreachable shortest-path endpoints");

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "classify a query file");
  std::string classify_file;
  classify_cmd->add_option("query-file", classify_file, "query text file")
      ->required();

  // query
  auto* query_cmd = app.add_subcommand("query", "run one query and print the table");
  std::string query_graph, query_strategy = "opt1", query_file;
  query_cmd->add_option("--graph", query_graph, "graph JSONL to load")->required();
  query_cmd->add_option("--strategy", query_strategy, "naive|opt1|opt2");
  query_cmd->add_option("query-file", query_file, "query text file")->required();

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic graph JSONL");
  GenArgs gen_gen;
  std::string gen_out;
  gen_gen.attach(gen_cmd);
  gen_cmd->add_option("--out", gen_out, "output JSONL path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*bench) {
      if (bench_graph.empty() == !bench_generate) {
        std::cerr << "bench: pass exactly one of --graph or --generate\n";
        return 1;
      }
      graphopt::PropertyGraph graph =
          bench_generate ? graphopt::generate_synthetic(bench_gen.cfg).graph
                         : graphopt::load_graph(bench_graph);
      graphopt::CostModel model;
      if (!cost_model_path.empty()) model = graphopt::load_cost_model(cost_model_path);
      graphopt::Backend backend(graph, model);

      graphopt::BenchConfig config;
      config.queries = split_commas(queries_arg);
      config.strategies.clear();
      for (const std::string& s : split_commas(strategies_arg)) {
        auto parsed = graphopt::parse_strategy(s);
        if (!parsed) {
          std::cerr << "unknown strategy " << s << "\n";
          return 1;
        }
        config.strategies.push_back(*parsed);
      }
      config.reps = reps;
      config.allow_disconnected = allow_disconnected;

      const auto reports = graphopt::run_benchmark(config, backend);
      for (const std::string& path : graphopt::emit_results(reports, out_dir))
        std::cout << "wrote " << path << "\n";
      graphopt::emit_md(reports, std::cout);
      return 0;
    }

    if (*classify_cmd) {
      const graphopt::Query q = graphopt::parse_query(read_file(classify_file));
      std::cout << classification_json(graphopt::classify(q)).dump(2) << "\n";
      return 0;
    }

    if (*query_cmd) {
      auto strategy = graphopt::parse_strategy(query_strategy);
      if (!strategy) {
        std::cerr << "unknown strategy " << query_strategy << "\n";
        return 1;
      }
      graphopt::PropertyGraph graph = graphopt::load_graph(query_graph);
      graphopt::Backend backend(graph);
      const graphopt::Query q = graphopt::parse_query(read_file(query_file));

      std::optional<graphopt::KVStore> kv;
      if (*strategy == graphopt::Strategy::polyglot) {
        std::set<std::pair<std::string, std::string>> pairs;
        for (const auto& p : graphopt::offload_pairs(q))
          pairs.insert({p.label, p.key});
        if (!pairs.empty())
          kv = graphopt::build_from_graph(graph, {pairs.begin(), pairs.end()});
      }
      const graphopt::ExecOutcome out =
          graphopt::execute(q, *strategy, backend, kv ? &*kv : nullptr);
      std::cout << graphopt::render_table(out.table);
      std::fprintf(stderr, "modeled cost: %.3f us\n", out.modeled_us);
      return 0;
    }

    if (*gen_cmd) {
      const graphopt::SyntheticGraph g = graphopt::generate_synthetic(gen_gen.cfg);
      graphopt::save_graph(g.graph, gen_out);
      std::cout << "wrote " << gen_out << " (" << g.graph.node_count() << " nodes, "
                << g.graph.edge_count() << " edges)\n";
      return 0;
    }
  } catch (const graphopt::equivalence_error& e) {
    std::cerr << "equivalence mismatch: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
