// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "seedset/cli.hpp"
#include "seedset/data_io.hpp"
#include "seedset/error.hpp"
#include "seedset/graph_generate.hpp"
#include "seedset/graph_io.hpp"
#include "seedset/inference.hpp"
#include "seedset/simulation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace seedset;
using namespace seedset::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* spec, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, spec, a);
  return buf;
}

double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1 - p) / static_cast<double>(n)); }

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("seedset_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

// Desk-scale study graph: 15 vertices, 6 cliques of at most 4 vertices.
StudyConfig desk_config() {
  StudyConfig c;
  c.generator = {15, 6, 4, 1};
  c.seed_set = {"3", "11"};
  c.alpha = 0.05;
  c.permutations = 300;
  c.method = Method::MinP;
  c.replicates = 200;
  c.seed = 20240601;
  return c;
}

Outcome two_triangle_oracle() {
  const fs::path dir = scratch_dir();
  const std::string graph = (dir / "two_triangles.txt").string();
  write_text_file(graph, to_edge_list(two_triangles()));
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"3", "{3}\n"}, {"1,3", "{1,2,3}\n"}, {"1,4", "{1,2,3,4,5}\n"}};
  double worst_ms = 0.0;
  bool ok = true;
  std::string detail;
  for (const auto& [d, expected] : cases) {
    std::ostringstream out, err;
    const auto t0 = Clock::now();
    const int code = run_cli({"oracle", graph, d}, out, err);
    worst_ms = std::max(worst_ms, 1e3 * seconds_since(t0));
    ok &= code == 0 && out.str() == expected;
    detail += "D={" + d + "} -> " + out.str().substr(0, out.str().size() - 1) + "; ";
  }
  fs::remove_all(dir);
  ok &= worst_ms < 1.0;
  return {ok, detail + "slowest " + fmt("%.3f ms", worst_ms)};
}

Outcome oracle_equivalence() {
  Philox rng(2024);
  std::size_t graphs = 0, seed_sets = 0, mismatches = 0;
  std::uint64_t gen_seed = 0;
  const auto t0 = Clock::now();
  while (graphs < 200) {
    ++gen_seed;
    DecomposableGraphParams params;
    params.nodes = 1 + rng.below(7);
    params.max_clique = 2 + rng.below(3);
    params.cliques = 1 + rng.below(params.nodes);
    params.seed = gen_seed;
    Graph g;
    try {
      g = random_decomposable_graph(params);
    } catch (const InputError&) {
      continue;
    }
    ++graphs;
    const auto decomps = all_decompositions(g);
    const HypothesisFamily family = enumerate_hypotheses(g, decomps);
    const GgmParams base = random_markov_params(g, rng);
    for (unsigned mask = 0; mask < (1u << g.size()); ++mask) {
      VertexSet d;
      for (std::size_t v = 0; v < g.size(); ++v)
        if (mask >> v & 1u) d.push_back(static_cast<Vertex>(v));
      const GgmParams post = perturb_seed_set(base, d, rng);
      const DecisionMatrix truth = oracle_decisions(base, post, decomps);
      std::vector<TestResult> results(family.size());
      for (std::size_t h = 0; h < family.size(); ++h) {
        const Slot s = family.hypotheses[h].memberships.front();
        results[h].key = family.hypotheses[h].key;
        results[h].adjusted_p = truth[s.decomposition][s.position] ? 0.0 : 1.0;
      }
      const SeedSetEstimate est = estimate_seed_set(results, family, decomps, 0.05);
      mismatches += est.variables != oracle_graphical_seed_set(g, d);
      ++seed_sets;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 120.0,
          std::to_string(graphs) + " graphs, " + std::to_string(seed_sets) + " seed sets, " +
              std::to_string(mismatches) + " mismatches"};
}

Outcome decomposition_identity() {
  Philox rng(77);
  double worst_identity = 0.0, worst_roots = 0.0;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    DecomposableGraphParams params;
    params.nodes = 4 + rng.below(9);
    params.max_clique = 2 + rng.below(4);
    const std::size_t min_cliques = (params.nodes - 1 + params.max_clique - 2) / (params.max_clique - 1);
    params.cliques = std::max<std::size_t>(min_cliques, 1 + rng.below(params.nodes - 1));
    params.seed = seed;
    const Graph g = random_decomposable_graph(params);
    const GgmParams p1 = random_markov_params(g, rng);
    const GgmParams p2 = random_markov_params(g, rng);
    const DataMatrix x1 = sample_mvn(p1, g.labels(), 200, derive_seed(seed, {1}));
    const DataMatrix x2 = sample_mvn(p2, g.labels(), 200, derive_seed(seed, {2}));
    const double dense = graph_constrained_lrt(g, x1.values, x2.values);
    double first = 0.0;
    const auto decomps = all_decompositions(g);
    for (std::size_t i = 0; i < decomps.size(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < decomps[i].size(); ++j)
        sum += lrt_conditional(decomps[i].cliques[j], decomps[i].separators[j], x1, x2).statistic;
      worst_identity = std::max(worst_identity, std::abs(sum - dense) / std::max(1.0, dense));
      if (i == 0) first = sum;
      else worst_roots = std::max(worst_roots, std::abs(sum - first) / std::max(1.0, std::abs(first)));
    }
  }
  const double secs = seconds_since(t0);
  return {worst_identity <= 1e-8 && worst_roots <= 1e-10 && secs < 60.0,
          "identity rel err " + fmt("%.2e", worst_identity) + ", across roots " + fmt("%.2e", worst_roots)};
}

Outcome null_calibration() {
  StudyConfig c = desk_config();
  c.scenarios = {{"none", false, 1.0, 1.0}};
  c.sample_sizes = {50};
  const auto t0 = Clock::now();
  const StudyResult r = run_study(c);
  const double secs = seconds_since(t0);
  const StudyMetrics& m = r.cells[0].metrics;
  const double empty_rate = m.exact_recovery_rate;  // D_G is empty here
  return {empty_rate >= 0.90 && m.failed == 0 && secs < 300.0,
          "P(estimate empty) = " + fmt("%.3f", empty_rate) + " over " + std::to_string(m.replicates) +
              " replicates, failed " + std::to_string(m.failed)};
}

StudyResult power_study() {
  StudyConfig c = desk_config();
  c.scenarios = {{"mild", true, 1.1, 0.5}, {"moderate", true, 1.3, 0.5}, {"strong", true, 1.7, 0.5}};
  c.sample_sizes = {100};
  return run_study(c);
}

Outcome strong_power(const StudyResult& r, double secs) {
  const StudyMetrics& m = r.cells[2].metrics;
  const double fp_bound = 0.05 + 3 * binomial_se(0.05, m.replicates);
  return {m.exact_recovery_rate >= 0.80 && m.false_positive_rate <= fp_bound && m.failed == 0 && secs < 600.0,
          "D_G = {" + format_set(r.graph, r.scenarios[2].oracle_dg) + "}, exact recovery " +
              fmt("%.3f", m.exact_recovery_rate) + ", false positives " + fmt("%.3f", m.false_positive_rate) +
              " (bound " + fmt("%.3f", fp_bound) + ")"};
}

Outcome monotone_power(const StudyResult& r) {
  if (r.cells.size() != 3) return {false, "power study did not run"};
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < 3; ++i) {
    const StudyMetrics& m = r.cells[i].metrics;
    detail += m.scenario + " " + fmt("%.3f", m.exact_recovery_rate) + (i < 2 ? " <= " : "");
  }
  for (std::size_t i = 0; i + 1 < 3; ++i) {
    const StudyMetrics& a = r.cells[i].metrics;
    const StudyMetrics& b = r.cells[i + 1].metrics;
    if (a.exact_recovery_rate <= b.exact_recovery_rate) continue;
    const bool overlap = a.exact_recovery_rate - 1.96 * a.exact_recovery_se <=
                         b.exact_recovery_rate + 1.96 * b.exact_recovery_se;
    ok &= overlap;
    detail += overlap ? " (inversion within CI overlap)" : " (inversion)";
  }
  return {ok, detail};
}

Outcome completion() {
  Philox rng(99);
  double clique_err = 0.0, missing = 0.0, logdet_err = 0.0;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    DecomposableGraphParams params{6 + rng.below(15), 0, 2 + rng.below(5), seed};
    const std::size_t min_cliques = (params.nodes - 1 + params.max_clique - 2) / (params.max_clique - 1);
    params.cliques = std::max<std::size_t>(min_cliques, 1 + rng.below(params.nodes - 1));
    const Graph g = random_decomposable_graph(params);
    const Eigen::MatrixXd omega = random_spd(static_cast<Eigen::Index>(g.size()), rng);
    const Eigen::MatrixXd sigma = complete_to_graph(omega, g);
    for (const auto& c : maximal_cliques(g))
      clique_err = std::max(clique_err, (submatrix(sigma, c) - submatrix(omega, c)).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd k = sigma.inverse();
    for (Vertex u = 0; u < static_cast<Vertex>(g.size()); ++u)
      for (Vertex v = u + 1; v < static_cast<Vertex>(g.size()); ++v)
        if (!g.adjacent(u, v)) missing = std::max(missing, std::abs(k(u, v)));
    const double dense = std::log(sigma.determinant());
    for (const auto& d : all_decompositions(g))
      logdet_err = std::max(logdet_err, std::abs(graph_logdet(sigma, d) - dense) / std::max(1.0, std::abs(dense)));
  }
  const double secs = seconds_since(t0);
  return {clique_err <= 1e-10 && missing <= 1e-9 && logdet_err <= 1e-8 && secs < 30.0,
          "clique block err " + fmt("%.2e", clique_err) + ", missing-edge K " + fmt("%.2e", missing) +
              ", logdet rel err " + fmt("%.2e", logdet_err)};
}

Outcome chisq_accuracy() {
  double worst = 0.0;
  for (int df = 1; df <= 60; ++df)
    for (int i = 0; i <= 400; ++i) {
      const double x = 0.5 * i;
      worst = std::max(worst, std::abs(chisq_sf(x, df) - quadrature_sf(x, df)));
    }
  for (int df = 1; df <= 60; ++df)
    for (double x : {1e-6, 1e-3, 0.01, 0.05, 0.1, 0.2})
      worst = std::max(worst, std::abs(chisq_sf(x, df) - quadrature_sf(x, df)));

  // Calibration of each local test under the global null.
  const StudyConfig c = desk_config();
  const Graph g = study_graph(c);
  const HypothesisFamily f = enumerate_hypotheses(g, all_decompositions(g));
  const GgmParams control = make_control(g, 1);
  const std::size_t draws = 2000, n = 200;
  const double t[3] = {0.01, 0.05, 0.10};
  std::vector<std::array<std::size_t, 3>> below(f.size(), {0, 0, 0});
  for (std::size_t r = 0; r < draws; ++r) {
    const DataMatrix x1 = sample_mvn(control, g.labels(), n, derive_seed(8, {1, r}));
    const DataMatrix x2 = sample_mvn(control, g.labels(), n, derive_seed(8, {2, r}));
    const auto res = compute_statistics(f, x1, x2);
    for (std::size_t h = 0; h < f.size(); ++h)
      for (int k = 0; k < 3; ++k) below[h][static_cast<std::size_t>(k)] += res[h].asymptotic_p <= t[k];
  }
  std::size_t exceed = 0;
  double worst_z = -INFINITY;
  for (std::size_t h = 0; h < f.size(); ++h)
    for (int k = 0; k < 3; ++k) {
      const double rate = static_cast<double>(below[h][static_cast<std::size_t>(k)]) / draws;
      const double se = binomial_se(t[k], draws);
      worst_z = std::max(worst_z, (rate - t[k]) / se);
      exceed += rate > t[k] + 3 * se;
    }
  return {worst <= 1e-8 && exceed == 0,
          "max |sf - quadrature| " + fmt("%.2e", worst) + "; null calibration n=" + std::to_string(n) + ": " +
              std::to_string(exceed) + "/" + std::to_string(3 * f.size()) + " cells above t + 3 SE (max z " +
              fmt("%.2f", worst_z) + ")"};
}

Outcome determinism() {
  const fs::path dir = scratch_dir();
  const Graph g = random_decomposable_graph({15, 6, 4, 1});
  const GgmParams control = make_control(g, 3);
  const GgmParams post = intervene(g, control, vertex_set(g, {"3", "11"}), 1.3, 0.5);
  write_text_file((dir / "x1.csv").string(), to_data_csv(sample_mvn(control, g.labels(), 80, 1)));
  write_text_file((dir / "x2.csv").string(), to_data_csv(sample_mvn(post, g.labels(), 80, 2)));
  write_text_file((dir / "g.txt").string(), to_edge_list(g));
  std::vector<std::string> reports;
  for (const char* threads : {"1", "2", "5"}) {
    ::setenv("SEEDSET_THREADS", threads, 1);
    const std::string out = (dir / (std::string("r") + threads + ".json")).string();
    std::ostringstream o, e;
    const int code = run_cli({"analyze", (dir / "x1.csv").string(), (dir / "x2.csv").string(),
                              (dir / "g.txt").string(), "--permutations", "400", "--seed", "11", "--quiet",
                              "--out", out},
                             o, e);
    if (code != 0) throw std::runtime_error("analyze failed: " + e.str());
    reports.push_back(read_text_file(out));
  }
  ::unsetenv("SEEDSET_THREADS");
  fs::remove_all(dir);
  const bool same = reports[0] == reports[1] && reports[1] == reports[2];
  return {same, std::string(same ? "identical" : "different") + " reports with SEEDSET_THREADS = 1, 2, 5 (" +
                    std::to_string(reports[0].size()) + " bytes)"};
}

Outcome performance() {
  const Graph g = random_decomposable_graph({100, 37, 15, 1});
  const GgmParams control = make_control(g, 4);
  const DataMatrix x1 = sample_mvn(control, g.labels(), 100, 1);
  const DataMatrix x2 = sample_mvn(control, g.labels(), 100, 2);
  InferenceOptions opt;
  opt.permutations = 500;
  opt.method = Method::MinP;
  const auto t0 = Clock::now();
  const InferenceResult r = run_inference(g, x1, x2, opt);
  const double secs = seconds_since(t0);
  std::size_t largest = 0;
  for (const auto& c : r.decompositions.front().cliques) largest = std::max(largest, c.size());
  return {secs <= 60.0, "p=100, k=" + std::to_string(r.decompositions.size()) + ", max clique " +
                            std::to_string(largest) + ", " + std::to_string(r.family.size()) +
                            " hypotheses, n=100 per group, B=500: " + fmt("%.2f s", secs)};
}

}  // namespace

int main() {
  report(1, "Two-triangle oracle exactness", two_triangle_oracle);
  report(2, "Oracle decisions reproduce the graphical seed set", oracle_equivalence);
  report(3, "Decomposition identity of the global statistic", decomposition_identity);
  report(4, "Null calibration / FWER", null_calibration);
  StudyResult power;
  report(5, "Power under strong intervention", [&] {
    const auto t0 = Clock::now();
    power = power_study();
    return strong_power(power, seconds_since(t0));
  });
  report(6, "Monotone power ordering", [&] { return monotone_power(power); });
  report(7, "Completion correctness", completion);
  report(8, "Chi-square p-value accuracy", chisq_accuracy);
  report(9, "Determinism across thread counts", determinism);
  report(10, "Desk-scale performance", performance);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
