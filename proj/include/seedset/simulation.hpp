#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seedset/graph.hpp"
#include "seedset/graph_generate.hpp"
#include "seedset/inference.hpp"
#include "seedset/numerics.hpp"

namespace seedset {

/// Control condition: means iid N(0.5, 1); covariance is the 0.4/1
/// equicorrelation matrix completed to g.
GgmParams make_control(const Graph& g, std::uint64_t seed);

/// Replaces the marginal of X_d (mean scaled by mean_mult, covariance by
/// var_mult) and keeps the law of the remaining variables given X_d.
/// d must be complete in g so the result stays Markov to g.
GgmParams intervene(const Graph& g, const GgmParams& control, const VertexSet& d,
                    double mean_mult, double var_mult);

/// n draws mu + L z with sigma = L L'; z from a Philox stream keyed by seed.
DataMatrix sample_mvn(const GgmParams& params, const std::vector<std::string>& labels,
                      std::size_t n, std::uint64_t seed);

struct Scenario {
  std::string name;
  GgmParams control;
  GgmParams post;
  VertexSet seed_set;   // empty for the no-intervention scenario
  VertexSet oracle_dg;  // graphical seed set of seed_set
  double mean_multiplier = 1.0;
  double variance_multiplier = 1.0;
};

/// Largest entrywise difference between the laws of X_{V\D} | X_D in the two
/// conditions of a scenario (zero up to rounding by construction).
double conditional_invariance_gap(const Scenario& s, std::size_t p);

struct ScenarioSpec {
  std::string name;
  bool intervention = true;
  double mean_multiplier = 1.0;
  double variance_multiplier = 1.0;
};

struct StudyConfig {
  std::optional<std::string> graph_file;  // relative paths resolve against the config
  DecomposableGraphParams generator;
  std::vector<std::string> seed_set;      // vertex labels
  std::vector<ScenarioSpec> scenarios;
  std::vector<std::size_t> sample_sizes;  // per group
  std::size_t replicates = 100;
  double alpha = 0.05;
  std::size_t permutations = 500;
  Method method = Method::MinP;
  std::uint64_t seed = 1;
  int threads = 0;
  bool keep_examples = false;  // keep replicate 0's samples per cell
};

/// Parses and validates a study config. Syntax errors report line and
/// column; semantic errors name the offending key.
StudyConfig parse_study_config(std::string_view json_text, const std::string& base_dir = ".");

/// Recovery and error rates of one (scenario, sample size) cell.
struct StudyMetrics {
  std::string scenario;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t failed = 0;
  double exact_recovery_rate = 0.0;
  double exact_recovery_se = 0.0;
  double false_positive_rate = 0.0;  // fraction with estimate not inside D_G
  double false_positive_se = 0.0;
  double mean_runtime_seconds = 0.0;
  std::string first_failure;
};

struct StudyCell {
  StudyMetrics metrics;
  std::optional<DataMatrix> example_x1, example_x2;
};

struct StudyResult {
  Graph graph;
  std::vector<Scenario> scenarios;
  std::vector<StudyCell> cells;  // scenario-major, then sample size
};

Graph study_graph(const StudyConfig& config);

/// Builds the scenarios of a study on a given graph; control parameters are
/// shared across scenarios.
std::vector<Scenario> build_scenarios(const Graph& g, const StudyConfig& config);

/// Runs every replicate of every cell. Replicates run concurrently; the
/// result depends only on the config.
StudyResult run_study(const StudyConfig& config);
StudyResult run_study(const StudyConfig& config, const Graph& g);

/// One row per cell; contains no timing so reruns are byte-identical.
std::string metrics_csv(const std::vector<StudyCell>& cells);
std::string metrics_json(const StudyResult& result, const StudyConfig& config);

}  // namespace seedset
