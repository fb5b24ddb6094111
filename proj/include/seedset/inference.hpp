#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seedset/graph.hpp"
#include "seedset/numerics.hpp"

namespace seedset {

/// Position j of decomposition i.
struct Slot {
  std::size_t decomposition = 0;
  std::size_t position = 0;
};

/// Equality across groups of the law of X_target given X_given.
struct Hypothesis {
  VertexSet target;
  VertexSet given;
  std::string key;  // "labels(target)|labels(given)"
  std::vector<Slot> memberships;

  VertexSet scope() const { return set_union(target, given); }
  int df() const { return marginal_df(target.size() + given.size()) - marginal_df(given.size()); }
};

/// Deduplicated local hypotheses of all decompositions of one graph.
struct HypothesisFamily {
  std::vector<Hypothesis> hypotheses;           // first-appearance order
  std::vector<std::vector<std::size_t>> slots;  // [i][j] -> hypothesis index

  std::size_t size() const noexcept { return hypotheses.size(); }
  std::size_t slot_count() const;
  std::optional<std::size_t> find(std::string_view key) const;
};

std::string hypothesis_key(const Graph& g, const VertexSet& target, const VertexSet& given);

HypothesisFamily enumerate_hypotheses(const Graph& g, const std::vector<Decomposition>& decomps);

/// k + sum_i nu(C_i), nu(C) = number of separators S_2..S_k (with
/// multiplicity) contained in C. Used as the Bonferroni factor.
std::size_t nominal_test_count(const std::vector<Decomposition>& decomps);

enum class Method { MinP, MaxT, Bonferroni };
std::string to_string(Method m);
/// Accepts "minp", "maxt", "bonferroni" (case-insensitive).
Method parse_method(std::string_view text);

struct TestResult {
  std::string key;
  double statistic = 0.0;
  int df = 0;
  double asymptotic_p = 1.0;
  std::optional<double> permutation_p;
  double adjusted_p = 1.0;
  bool rejected = false;
};

/// Observed statistics with chi-square p-values; adjusted_p is left at the
/// asymptotic value until a multiplicity adjustment runs.
std::vector<TestResult> compute_statistics(const HypothesisFamily& family, const DataMatrix& x1,
                                           const DataMatrix& x2);

/// B x H statistics from group-label permutations, row-major by replicate.
struct NullMatrix {
  std::size_t replicates = 0;
  std::size_t hypotheses = 0;
  std::vector<double> values;

  double operator()(std::size_t b, std::size_t h) const { return values[b * hypotheses + h]; }
};

struct PermutationOptions {
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  int threads = 0;        // 0 = OpenMP default
  bool identity = false;  // debug: every replicate keeps the observed labels
};

/// Parallel over replicates. Replicate b draws its permutation from a Philox
/// stream keyed by (seed, b), so output is independent of thread count.
NullMatrix permutation_null(const HypothesisFamily& family, const DataMatrix& x1,
                            const DataMatrix& x2, const PermutationOptions& options);

/// Single-threaded reference with the same contract.
NullMatrix permutation_null_serial(const HypothesisFamily& family, const DataMatrix& x1,
                                   const DataMatrix& x2, const PermutationOptions& options);

/// Westfall-Young step-down adjustment. Permutation p-values use the add-one
/// convention (count + 1) / (B + 1), treating the observed labelling as one
/// of the B + 1 permutations.
std::vector<TestResult> stepdown_adjust(std::vector<TestResult> observed, const NullMatrix& null,
                                        Method method, double alpha);

/// Asymptotic p-values times `factor`, capped at 1.
std::vector<TestResult> bonferroni_adjust(std::vector<TestResult> observed, std::size_t factor,
                                          double alpha);

/// Exceedance counts kept when the full null matrix would not fit in memory.
/// Only max-T on the -log(chi-square tail) scale can be reduced this way.
struct StreamingSummary {
  std::size_t replicates = 0;
  std::vector<std::size_t> order;        // step-down order (hypothesis indices)
  std::vector<std::size_t> raw_exceed;   // per hypothesis: #{b : T_b >= T_obs}
  std::vector<std::size_t> rank_exceed;  // per rank: #{b : max over suffix >= observed}
};

StreamingSummary permutation_null_streaming(const HypothesisFamily& family, const DataMatrix& x1,
                                            const DataMatrix& x2,
                                            const std::vector<TestResult>& observed,
                                            const PermutationOptions& options);

std::vector<TestResult> stepdown_from_summary(std::vector<TestResult> observed,
                                              const StreamingSummary& summary, double alpha);

/// Order in which the step-down visits hypotheses (most significant first).
std::vector<std::size_t> stepdown_order(const std::vector<TestResult>& observed,
                                        const std::vector<double>& score, bool ascending);

struct SeedSetEstimate {
  VertexSet variables;
  std::vector<VertexSet> unions;  // one per decomposition
  double alpha = 0.05;
  Method method = Method::MinP;
  std::size_t permutations = 0;
};

using DecisionMatrix = std::vector<std::vector<bool>>;  // [i][j]

/// Intersection over decompositions of the union of rejected cliques.
SeedSetEstimate combine_decisions(const std::vector<Decomposition>& decomps,
                                  const DecisionMatrix& decisions);

/// Maps every slot to its hypothesis' rejection and combines.
SeedSetEstimate estimate_seed_set(const std::vector<TestResult>& results,
                                  const HypothesisFamily& family,
                                  const std::vector<Decomposition>& decomps, double alpha);

/// True decision per slot: whether the conditional law of X_{C\S} given X_S
/// differs between the two parameter sets (regression coefficients,
/// intercepts and residual covariances compared at tolerance tol).
DecisionMatrix oracle_decisions(const GgmParams& p1, const GgmParams& p2,
                                const std::vector<Decomposition>& decomps, double tol = 1e-9);

/// Largest entrywise difference between the laws of X_target | X_given.
double conditional_law_distance(const GgmParams& p1, const GgmParams& p2, const VertexSet& target,
                                const VertexSet& given);

struct InferenceOptions {
  double alpha = 0.05;
  Method method = Method::MinP;
  std::size_t permutations = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
};

struct InferenceResult {
  std::vector<Decomposition> decompositions;
  HypothesisFamily family;
  std::vector<TestResult> results;
  SeedSetEstimate estimate;
  LrtValue global;
  double global_p = 1.0;
  bool streaming = false;
  std::vector<std::string> warnings;
};

/// Full pipeline on a connected decomposable graph with graph-aligned data.
InferenceResult run_inference(const Graph& g, const DataMatrix& x1, const DataMatrix& x2,
                              const InferenceOptions& options);

}  // namespace seedset
