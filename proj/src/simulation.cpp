#include "seedset/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>
#include <omp.h>

#include "seedset/error.hpp"
#include "seedset/graph_io.hpp"
#include "seedset/rng.hpp"

namespace seedset {

GgmParams make_control(const Graph& g, std::uint64_t seed) {
  const auto p = static_cast<Eigen::Index>(g.size());
  Philox rng(derive_seed(seed, {0x6d65616eULL}));
  GgmParams out;
  out.mean.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) out.mean(i) = 0.5 + rng.normal();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Constant(p, p, 0.4);
  omega.diagonal().setOnes();
  out.covariance = complete_to_graph(omega, g);
  return out;
}

GgmParams intervene(const Graph& g, const GgmParams& control, const VertexSet& d,
                    double mean_mult, double var_mult) {
  if (!(var_mult > 0.0)) throw InputError("variance multiplier must be positive");
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (!g.adjacent(d[i], d[j]))
        throw InputError("seed set must lie within one clique: '" + g.label(d[i]) + "' and '" +
                         g.label(d[j]) + "' are not adjacent");
  if (d.empty()) return control;

  const VertexSet rest = set_difference(g.all_vertices(), d);
  const Eigen::MatrixXd sdd = submatrix(control.covariance, d);
  const Eigen::VectorXd md = subvector(control.mean, d);
  const Eigen::MatrixXd new_sdd = var_mult * sdd;
  const Eigen::VectorXd new_md = mean_mult * md;

  GgmParams out = control;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.mean(d[i]) = new_md(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < d.size(); ++j)
      out.covariance(d[i], d[j]) = new_sdd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  if (rest.empty()) return out;

  const Eigen::MatrixXd srd = submatrix(control.covariance, rest, d);
  const Eigen::MatrixXd srr = submatrix(control.covariance, rest);
  Eigen::LLT<Eigen::MatrixXd> llt(sdd);
  if (llt.info() != Eigen::Success) throw InputError("seed set covariance is not positive definite");
  const Eigen::MatrixXd coef = llt.solve(srd.transpose()).transpose();  // Sigma_RD Sigma_D^-1
  const Eigen::MatrixXd resid = srr - coef * srd.transpose();
  const Eigen::MatrixXd new_srd = coef * new_sdd;
  const Eigen::MatrixXd new_srr = resid + coef * new_sdd * coef.transpose();
  const Eigen::VectorXd new_mr = subvector(control.mean, rest) + coef * (new_md - md);

  for (std::size_t i = 0; i < rest.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.mean(rest[i]) = new_mr(ii);
    for (std::size_t j = 0; j < rest.size(); ++j)
      out.covariance(rest[i], rest[j]) = new_srr(ii, static_cast<Eigen::Index>(j));
    for (std::size_t j = 0; j < d.size(); ++j) {
      out.covariance(rest[i], d[j]) = new_srd(ii, static_cast<Eigen::Index>(j));
      out.covariance(d[j], rest[i]) = new_srd(ii, static_cast<Eigen::Index>(j));
    }
  }
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

DataMatrix sample_mvn(const GgmParams& params, const std::vector<std::string>& labels,
                      std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("sample size must be positive");
  const auto p = params.mean.size();
  if (static_cast<std::size_t>(p) != labels.size()) throw InputError("label count does not match");
  Eigen::LLT<Eigen::MatrixXd> llt(params.covariance);
  if (llt.info() != Eigen::Success) throw InputError("covariance is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();

  Philox rng(derive_seed(seed, {0x73616d70ULL}));
  DataMatrix out;
  out.labels = labels;
  out.values.resize(static_cast<Eigen::Index>(n), p);
  Eigen::VectorXd z(p);
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n); ++r) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    out.values.row(r) = (params.mean + l * z).transpose();
  }
  return out;
}

double conditional_invariance_gap(const Scenario& s, std::size_t p) {
  VertexSet all(p);
  for (std::size_t i = 0; i < p; ++i) all[i] = static_cast<Vertex>(i);
  const VertexSet rest = set_difference(all, s.seed_set);
  if (rest.empty()) return 0.0;
  return conditional_law_distance(s.control, s.post, rest, s.seed_set);
}

// ---------------------------------------------------------------------------
// Config

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
  throw InputError("study config: " + what);
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class T>
T get_field(const json& obj, const char* key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("\"" + path + key + "\" is missing or has the wrong type");
  }
}

template <class T>
T get_optional(const json& obj, const char* key, T fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  return get_field<T>(obj, key, path);
}

std::string label_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  config_error("seed_set entries must be strings or integers");
}

}  // namespace

StudyConfig parse_study_config(std::string_view text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("syntax error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!doc.is_object()) config_error("top level must be an object");

  StudyConfig c;
  if (!doc.contains("graph")) config_error("\"graph\" is missing");
  const json& graph = doc["graph"];
  if (graph.contains("file")) {
    std::filesystem::path file = get_field<std::string>(graph, "file", "graph.");
    if (file.is_relative()) file = std::filesystem::path(base_dir) / file;
    c.graph_file = file.string();
  } else if (graph.contains("generate")) {
    const json& gen = graph["generate"];
    c.generator.nodes = get_field<std::size_t>(gen, "nodes", "graph.generate.");
    c.generator.cliques = get_field<std::size_t>(gen, "cliques", "graph.generate.");
    c.generator.max_clique = get_field<std::size_t>(gen, "max_clique", "graph.generate.");
    c.generator.seed = get_optional<std::uint64_t>(gen, "seed", 1, "graph.generate.");
  } else {
    config_error("\"graph\" needs either \"file\" or \"generate\"");
  }

  if (doc.contains("seed_set")) {
    if (!doc["seed_set"].is_array()) config_error("\"seed_set\" must be an array");
    for (const auto& v : doc["seed_set"]) c.seed_set.push_back(label_of(v));
  }

  if (!doc.contains("scenarios") || !doc["scenarios"].is_array() || doc["scenarios"].empty())
    config_error("\"scenarios\" must be a nonempty array");
  for (std::size_t i = 0; i < doc["scenarios"].size(); ++i) {
    const json& s = doc["scenarios"][i];
    const std::string path = "scenarios[" + std::to_string(i) + "].";
    ScenarioSpec spec;
    spec.name = get_field<std::string>(s, "name", path);
    spec.intervention = get_optional<bool>(s, "intervention", true, path);
    spec.mean_multiplier = get_optional<double>(s, "mean_multiplier", 1.0, path);
    spec.variance_multiplier = get_optional<double>(s, "variance_multiplier", 1.0, path);
    if (!(spec.variance_multiplier > 0.0)) config_error("\"" + path + "variance_multiplier\" must be positive");
    c.scenarios.push_back(spec);
  }

  c.sample_sizes = get_field<std::vector<std::size_t>>(doc, "sample_sizes", "");
  if (c.sample_sizes.empty()) config_error("\"sample_sizes\" must be nonempty");
  c.replicates = get_optional<std::size_t>(doc, "replicates", c.replicates, "");
  c.alpha = get_optional<double>(doc, "alpha", c.alpha, "");
  c.permutations = get_optional<std::size_t>(doc, "permutations", c.permutations, "");
  c.method = parse_method(get_optional<std::string>(doc, "method", "minp", ""));
  c.seed = get_optional<std::uint64_t>(doc, "seed", c.seed, "");
  if (c.replicates < 1) config_error("\"replicates\" must be at least 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) config_error("\"alpha\" must lie in (0, 1)");
  const bool any_intervention = std::any_of(c.scenarios.begin(), c.scenarios.end(),
                                            [](const ScenarioSpec& s) { return s.intervention; });
  if (any_intervention && c.seed_set.empty())
    config_error("\"seed_set\" is required when a scenario has an intervention");
  return c;
}

Graph study_graph(const StudyConfig& config) {
  if (config.graph_file) return read_graph_file(*config.graph_file);
  return random_decomposable_graph(config.generator);
}

std::vector<Scenario> build_scenarios(const Graph& g, const StudyConfig& config) {
  if (!is_decomposable(g) || !is_connected(g))
    throw GraphError("study graph must be decomposable and connected");
  const GgmParams control = make_control(g, derive_seed(config.seed, {0x636f6e74ULL}));
  const VertexSet d = vertex_set(g, config.seed_set);
  std::vector<Scenario> out;
  for (const auto& spec : config.scenarios) {
    Scenario s;
    s.name = spec.name;
    s.control = control;
    s.mean_multiplier = spec.mean_multiplier;
    s.variance_multiplier = spec.variance_multiplier;
    if (spec.intervention) {
      s.seed_set = d;
      s.post = intervene(g, control, d, spec.mean_multiplier, spec.variance_multiplier);
    } else {
      s.post = control;
    }
    s.oracle_dg = oracle_graphical_seed_set(g, s.seed_set);
    out.push_back(std::move(s));
  }
  return out;
}

StudyResult run_study(const StudyConfig& config) { return run_study(config, study_graph(config)); }

StudyResult run_study(const StudyConfig& config, const Graph& g) {
  StudyResult result;
  result.graph = g;
  result.scenarios = build_scenarios(g, config);

  InferenceOptions inference;
  inference.alpha = config.alpha;
  inference.method = config.method;
  inference.permutations = config.permutations;
  inference.threads = 1;  // parallelism lives at the replicate level

  for (std::size_t si = 0; si < result.scenarios.size(); ++si) {
    const Scenario& scenario = result.scenarios[si];
    for (std::size_t n : config.sample_sizes) {
      struct Outcome {
        bool ok = false, exact = false, false_positive = false;
        double seconds = 0.0;
        std::string error;
      };
      std::vector<Outcome> outcomes(config.replicates);
      StudyCell cell;
      const auto reps = static_cast<std::ptrdiff_t>(config.replicates);

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.threads > 0 ? config.threads : omp_get_max_threads())
      for (std::ptrdiff_t r = 0; r < reps; ++r) {
        Outcome& o = outcomes[static_cast<std::size_t>(r)];
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const std::uint64_t base = derive_seed(config.seed, {si, n, static_cast<std::uint64_t>(r)});
          DataMatrix x1 = sample_mvn(scenario.control, g.labels(), n, derive_seed(base, {1}));
          DataMatrix x2 = sample_mvn(scenario.post, g.labels(), n, derive_seed(base, {2}));
          InferenceOptions opts = inference;
          opts.seed = derive_seed(base, {3});
          const InferenceResult res = run_inference(g, x1, x2, opts);
          o.exact = res.estimate.variables == scenario.oracle_dg;
          o.false_positive = !is_subset(res.estimate.variables, scenario.oracle_dg);
          o.ok = true;
          if (r == 0 && config.keep_examples) {
            cell.example_x1 = std::move(x1);
            cell.example_x2 = std::move(x2);
          }
        } catch (const std::exception& e) {
          o.error = e.what();
        }
        o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }

      StudyMetrics& m = cell.metrics;
      m.scenario = scenario.name;
      m.n = n;
      m.replicates = config.replicates;
      std::size_t ok = 0, exact = 0, fp = 0;
      double seconds = 0.0;
      for (const auto& o : outcomes) {
        seconds += o.seconds;
        if (!o.ok) {
          ++m.failed;
          if (m.first_failure.empty()) m.first_failure = o.error;
          continue;
        }
        ++ok;
        exact += o.exact;
        fp += o.false_positive;
      }
      if (ok > 0) {
        const double dn = static_cast<double>(ok);
        m.exact_recovery_rate = static_cast<double>(exact) / dn;
        m.false_positive_rate = static_cast<double>(fp) / dn;
        m.exact_recovery_se = std::sqrt(m.exact_recovery_rate * (1 - m.exact_recovery_rate) / dn);
        m.false_positive_se = std::sqrt(m.false_positive_rate * (1 - m.false_positive_rate) / dn);
      }
      m.mean_runtime_seconds = seconds / static_cast<double>(config.replicates);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::string metrics_csv(const std::vector<StudyCell>& cells) {
  std::ostringstream out;
  out.precision(6);
  out << "scenario,n,replicates,failed,exact_recovery_rate,exact_recovery_se,"
         "false_positive_rate,false_positive_se\n";
  for (const auto& c : cells) {
    const StudyMetrics& m = c.metrics;
    out << m.scenario << ',' << m.n << ',' << m.replicates << ',' << m.failed << ','
        << m.exact_recovery_rate << ',' << m.exact_recovery_se << ',' << m.false_positive_rate
        << ',' << m.false_positive_se << '\n';
  }
  return out.str();
}

std::string metrics_json(const StudyResult& result, const StudyConfig& config) {
  json doc;
  doc["schema"] = "seedset-study/1";
  doc["graph"] = {{"p", result.graph.size()},
                  {"edges", result.graph.edge_count()},
                  {"cliques", maximal_cliques(result.graph).size()}};
  doc["settings"] = {{"alpha", config.alpha},
                     {"permutations", config.permutations},
                     {"method", to_string(config.method)},
                     {"replicates", config.replicates},
                     {"seed", config.seed}};
  doc["scenarios"] = json::array();
  for (const auto& s : result.scenarios) {
    json labels = json::array(), dg = json::array();
    for (Vertex v : s.seed_set) labels.push_back(result.graph.label(v));
    for (Vertex v : s.oracle_dg) dg.push_back(result.graph.label(v));
    doc["scenarios"].push_back({{"name", s.name},
                                {"seed_set", labels},
                                {"graphical_seed_set", dg},
                                {"mean_multiplier", s.mean_multiplier},
                                {"variance_multiplier", s.variance_multiplier}});
  }
  doc["cells"] = json::array();
  for (const auto& c : result.cells) {
    const StudyMetrics& m = c.metrics;
    json cell = {{"scenario", m.scenario},
                 {"n", m.n},
                 {"replicates", m.replicates},
                 {"failed", m.failed},
                 {"exact_recovery_rate", m.exact_recovery_rate},
                 {"exact_recovery_se", m.exact_recovery_se},
                 {"false_positive_rate", m.false_positive_rate},
                 {"false_positive_se", m.false_positive_se},
                 {"mean_runtime_seconds", m.mean_runtime_seconds}};
    if (!m.first_failure.empty()) cell["first_failure"] = m.first_failure;
    doc["cells"].push_back(std::move(cell));
  }
  return doc.dump(2) + "\n";
}

}  // namespace seedset
