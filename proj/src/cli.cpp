#include "seedset/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "seedset/data_io.hpp"
#include "seedset/error.hpp"
#include "seedset/graph_io.hpp"
#include "seedset/simulation.hpp"

namespace seedset {

ComponentMode parse_component_mode(const std::string& text) {
  if (text == "largest") return ComponentMode::Largest;
  if (text == "all") return ComponentMode::All;
  if (text == "error") return ComponentMode::Error;
  throw InputError("unknown component mode '" + text + "' (expected largest, all or error)");
}

std::string to_string(ComponentMode m) {
  switch (m) {
    case ComponentMode::Largest: return "largest";
    case ComponentMode::All: return "all";
    case ComponentMode::Error: return "error";
  }
  return "largest";
}

namespace {

DataMatrix select_columns(const DataMatrix& x, const Graph& component) {
  DataMatrix out;
  out.labels = component.labels();
  out.values.resize(x.rows(), static_cast<Eigen::Index>(component.size()));
  for (std::size_t j = 0; j < component.size(); ++j) {
    const auto it = std::find(x.labels.begin(), x.labels.end(), component.labels()[j]);
    out.values.col(static_cast<Eigen::Index>(j)) = x.values.col(it - x.labels.begin());
  }
  return out;
}

std::string braces(const Graph& g, const VertexSet& s) { return "{" + format_set(g, s) + "}"; }

}  // namespace

SeedSetReport analyze(const Graph& input, const DataMatrix& x1, const DataMatrix& x2,
                      const AnalyzeOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  // Both files must carry exactly the graph's vertices.
  const DataMatrix a1 = align_to_graph(x1, input);
  const DataMatrix a2 = align_to_graph(x2, input);

  SeedSetReport report;
  report.settings.alpha = options.inference.alpha;
  report.settings.permutations = options.inference.permutations;
  report.settings.method = options.inference.method;
  report.settings.seed = options.inference.seed;
  report.settings.component_mode = to_string(options.components);

  Graph g = input;
  std::vector<std::pair<std::string, std::string>> added;
  if (!is_decomposable(g)) {
    if (!options.triangulate)
      throw GraphError("graph is not decomposable; pass --triangulate to embed it in a decomposable graph");
    const Triangulation t = min_fill_triangulation(g);
    g = t.graph;
    for (const auto& [u, v] : t.added) added.emplace_back(g.label(u), g.label(v));
    report.warnings.push_back("graph was triangulated with " + std::to_string(added.size()) +
                              " added edge(s)");
  }

  std::vector<VertexSet> parts = component_vertex_sets(g);
  if (parts.size() > 1) {
    switch (options.components) {
      case ComponentMode::Error:
        throw GraphError("graph has " + std::to_string(parts.size()) + " connected components");
      case ComponentMode::Largest: {
        const auto best = std::max_element(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
          return a.size() < b.size();
        });
        report.warnings.push_back("graph has " + std::to_string(parts.size()) +
                                  " connected components; analyzing the largest (" +
                                  std::to_string(best->size()) + " vertices)");
        parts = {*best};
        break;
      }
      case ComponentMode::All:
        break;
    }
  }

  VertexSet estimate;
  for (const VertexSet& part : parts) {
    const auto c0 = std::chrono::steady_clock::now();
    ComponentReport comp;
    comp.graph = parts.size() == 1 && part.size() == g.size() ? g : g.induced(part);
    for (const auto& [u, v] : added) {
      const auto fu = comp.graph.find(u), fv = comp.graph.find(v);
      if (fu && fv) comp.added.emplace_back(u, v);
    }
    const DataMatrix c1 = select_columns(a1, comp.graph);
    const DataMatrix c2 = select_columns(a2, comp.graph);
    comp.n1 = static_cast<std::size_t>(c1.rows());
    comp.n2 = static_cast<std::size_t>(c2.rows());
    comp.result = run_inference(comp.graph, c1, c2, options.inference);
    for (const auto& w : comp.result.warnings) report.warnings.push_back(w);
    for (Vertex v : comp.result.estimate.variables) estimate.push_back(g.index_of(comp.graph.label(v)));
    comp.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
    report.components.push_back(std::move(comp));
  }
  for (Vertex v : normalized(estimate)) report.estimate.push_back(g.label(v));
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

int threads_from_environment() {
  const char* env = std::getenv("SEEDSET_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw InputError("SEEDSET_THREADS must be a positive integer");
  return static_cast<int>(std::min<long>(v, 1024));
}

namespace {

struct AnalyzeArgs {
  std::string data1, data2, graph, out, method = "minp", component = "largest";
  double alpha = 0.05;
  std::size_t permutations = 1000;
  std::uint64_t seed = 1;
  std::size_t memory_mib = 1024;
  bool triangulate = false, transpose = false, timing = false, quiet = false;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  AnalyzeOptions opt;
  opt.inference.alpha = a.alpha;
  opt.inference.permutations = a.permutations;
  opt.inference.method = parse_method(a.method);
  opt.inference.seed = a.seed;
  opt.inference.threads = threads_from_environment();
  opt.inference.memory_budget_bytes = a.memory_mib << 20;
  opt.triangulate = a.triangulate;
  opt.components = parse_component_mode(a.component);
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
  if (opt.inference.method != Method::Bonferroni && a.permutations < 1)
    throw InputError("--permutations must be at least 1");

  const Graph g = read_graph_file(a.graph);
  const DataMatrix x1 = read_data_csv(a.data1, a.transpose);
  const DataMatrix x2 = read_data_csv(a.data2, a.transpose);
  const SeedSetReport report = analyze(g, x1, x2, opt);
  if (!a.quiet) out << report_table(report);
  if (!a.out.empty()) write_text_file(a.out, report_json(report, a.timing));
  return 0;
}

struct SimulateArgs {
  std::string config, csv, json, emit_dir;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

std::string file_safe(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const std::string base = std::filesystem::path(a.config).parent_path().string();
  StudyConfig config = parse_study_config(read_text_file(a.config), base.empty() ? "." : base);
  if (a.replicates > 0) config.replicates = a.replicates;
  if (a.seed_set) config.seed = a.seed;
  config.threads = threads_from_environment();
  config.keep_examples = !a.emit_dir.empty();

  const StudyResult result = run_study(config);
  const std::string csv = metrics_csv(result.cells);
  if (a.csv.empty()) out << csv;
  else write_text_file(a.csv, csv);
  if (!a.json.empty()) write_text_file(a.json, metrics_json(result, config));

  if (!a.emit_dir.empty()) {
    std::filesystem::create_directories(a.emit_dir);
    const std::filesystem::path dir(a.emit_dir);
    write_text_file((dir / "graph.txt").string(), to_edge_list(result.graph));
    for (const auto& cell : result.cells) {
      if (!cell.example_x1) continue;
      const std::string stem = file_safe(cell.metrics.scenario) + "_n" + std::to_string(cell.metrics.n);
      write_text_file((dir / (stem + "_x1.csv")).string(), to_data_csv(*cell.example_x1));
      write_text_file((dir / (stem + "_x2.csv")).string(), to_data_csv(*cell.example_x2));
    }
  }
  return 0;
}

std::string set_list(const Graph& g, const std::vector<VertexSet>& sets) {
  std::string s;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (i) s += ' ';
    s += braces(g, sets[i]);
  }
  return s;
}

nlohmann::json json_sets(const Graph& g, const std::vector<VertexSet>& sets) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : sets) {
    nlohmann::json one = nlohmann::json::array();
    for (Vertex v : s) one.push_back(g.label(v));
    out.push_back(std::move(one));
  }
  return out;
}

int cmd_graph(const std::string& path, const std::string& action, bool as_json, std::ostream& out) {
  const Graph g = read_graph_file(path);
  if (action == "check") {
    const bool dec = is_decomposable(g);
    const bool con = is_connected(g);
    std::size_t k = 0, max_clique = 0;
    if (dec) {
      const auto cliques = maximal_cliques(g);
      k = cliques.size();
      for (const auto& c : cliques) max_clique = std::max(max_clique, c.size());
    }
    if (as_json) {
      nlohmann::json j = {{"decomposable", dec},
                          {"connected", con},
                          {"components", component_vertex_sets(g).size()},
                          {"p", g.size()},
                          {"edges", g.edge_count()}};
      if (dec) {
        j["k"] = k;
        j["max_clique"] = max_clique;
      }
      out << j.dump(2) << '\n';
    } else {
      out << (dec ? "decomposable" : "not decomposable") << '\n'
          << (con ? "connected" : "not connected (" + std::to_string(component_vertex_sets(g).size()) +
                                      " components)")
          << '\n'
          << "p=" << g.size() << " edges=" << g.edge_count();
      if (dec) out << " k=" << k << " max_clique=" << max_clique;
      out << '\n';
    }
    return 0;
  }
  if (action == "triangulate") {
    const Triangulation t = min_fill_triangulation(g);
    if (as_json) {
      out << to_graph_json(t.graph);
    } else {
      for (const auto& [u, v] : t.added) out << "# added " << g.label(u) << ' ' << g.label(v) << '\n';
      out << to_edge_list(t.graph);
    }
    return 0;
  }
  if (action == "cliques") {
    const auto cliques = maximal_cliques(g);
    if (as_json) out << json_sets(g, cliques).dump() << '\n';
    else out << set_list(g, cliques) << '\n';
    return 0;
  }
  if (action == "separators") {
    // Separator multiset S_2..S_k of the connected components together.
    std::vector<VertexSet> seps;
    for (const VertexSet& part : component_vertex_sets(g)) {
      const Graph sub = g.induced(part);
      const auto decomps = all_decompositions(sub);
      for (std::size_t j = 1; j < decomps.front().size(); ++j) {
        VertexSet s;
        for (Vertex v : decomps.front().separators[j]) s.push_back(part[static_cast<std::size_t>(v)]);
        seps.push_back(s);
      }
    }
    std::sort(seps.begin(), seps.end());
    if (as_json) out << json_sets(g, seps).dump() << '\n';
    else out << set_list(g, seps) << '\n';
    return 0;
  }
  if (action == "decompositions") {
    if (!is_connected(g)) throw GraphError("decompositions need a connected graph");
    const auto decomps = all_decompositions(g);
    if (as_json) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& d : decomps)
        arr.push_back({{"cliques", json_sets(g, d.cliques)}, {"separators", json_sets(g, d.separators)}});
      out << arr.dump(2) << '\n';
    } else {
      for (std::size_t i = 0; i < decomps.size(); ++i)
        out << i + 1 << ": cliques " << set_list(g, decomps[i].cliques) << "  separators "
            << set_list(g, decomps[i].separators) << '\n';
    }
    return 0;
  }
  throw InputError("unknown graph action '" + action +
                   "' (expected cliques, separators, decompositions, triangulate or check)");
}

int cmd_oracle(const std::string& path, const std::vector<std::string>& tokens, std::ostream& out) {
  const Graph g = read_graph_file(path);
  if (!is_decomposable(g)) throw GraphError("graph is not decomposable");
  std::vector<std::string> labels;
  for (const auto& t : tokens) {
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) labels.push_back(item);
  }
  out << braces(g, oracle_graphical_seed_set(g, vertex_set(g, labels))) << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graphical seed set estimation for two-condition Gaussian graphical models", "seedset"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "seedset 1.0.0");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Estimate the graphical seed set from two samples");
  analyze_cmd->add_option("data1", an.data1, "CSV for the first condition")->required();
  analyze_cmd->add_option("data2", an.data2, "CSV for the second condition")->required();
  analyze_cmd->add_option("graph", an.graph, "Graph file (edge list or JSON)")->required();
  analyze_cmd->add_option("--alpha", an.alpha, "Family-wise error level")->capture_default_str();
  analyze_cmd->add_option("--permutations,-B", an.permutations, "Permutation replicates")->capture_default_str();
  analyze_cmd->add_option("--method", an.method, "minp, maxt or bonferroni")->capture_default_str();
  analyze_cmd->add_option("--seed", an.seed, "Random seed")->capture_default_str();
  analyze_cmd->add_flag("--triangulate", an.triangulate, "Triangulate a non-decomposable graph");
  analyze_cmd->add_option("--component", an.component, "largest, all or error")->capture_default_str();
  analyze_cmd->add_option("--out,-o", an.out, "Write the JSON report here");
  analyze_cmd->add_flag("--transpose", an.transpose, "Data files hold variables in rows");
  analyze_cmd->add_flag("--timing", an.timing, "Include timings in the JSON report");
  analyze_cmd->add_option("--memory-mib", an.memory_mib, "Budget for the permutation null matrix")
      ->capture_default_str();
  analyze_cmd->add_flag("--quiet,-q", an.quiet, "Do not print the table");

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a Monte Carlo study");
  simulate_cmd->add_option("config", sim.config, "Study config (JSON)")->required();
  simulate_cmd->add_option("--csv", sim.csv, "Write metrics CSV here instead of stdout");
  simulate_cmd->add_option("--json", sim.json, "Write metrics JSON here");
  simulate_cmd->add_option("--emit-data", sim.emit_dir, "Write one dataset pair per cell to this directory");
  simulate_cmd->add_option("--replicates,-R", sim.replicates, "Override the replicate count");
  auto* seed_opt = simulate_cmd->add_option("--seed", sim.seed, "Override the master seed");

  std::string graph_path, graph_action;
  bool graph_json = false;
  auto* graph_cmd = app.add_subcommand("graph", "Inspect a graph");
  graph_cmd->add_option("graph", graph_path, "Graph file")->required();
  graph_cmd->add_option("action", graph_action, "cliques, separators, decompositions, triangulate or check")
      ->required();
  graph_cmd->add_flag("--json", graph_json, "JSON output");

  std::string oracle_path;
  std::vector<std::string> oracle_d;
  auto* oracle_cmd = app.add_subcommand("oracle", "Graphical seed set of a known seed set");
  oracle_cmd->add_option("graph", oracle_path, "Graph file")->required();
  oracle_cmd->add_option("seed_set", oracle_d, "Vertices of D, separated by spaces or commas");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(an, out);
    if (*simulate_cmd) {
      sim.seed_set = seed_opt->count() > 0;
      return cmd_simulate(sim, out);
    }
    if (*graph_cmd) return cmd_graph(graph_path, graph_action, graph_json, out);
    if (*oracle_cmd) return cmd_oracle(oracle_path, oracle_d, out);
  } catch (const MleError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace seedset
