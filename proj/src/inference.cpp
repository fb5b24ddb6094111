#include "seedset/inference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "seedset/error.hpp"
#include "statistics_engine.hpp"

namespace seedset {

// ---------------------------------------------------------------------------
// Hypothesis family

std::size_t HypothesisFamily::slot_count() const {
  std::size_t total = 0;
  for (const auto& row : slots) total += row.size();
  return total;
}

std::optional<std::size_t> HypothesisFamily::find(std::string_view key) const {
  for (std::size_t h = 0; h < hypotheses.size(); ++h)
    if (hypotheses[h].key == key) return h;
  return std::nullopt;
}

std::string hypothesis_key(const Graph& g, const VertexSet& target, const VertexSet& given) {
  return format_set(g, target) + "|" + format_set(g, given);
}

HypothesisFamily enumerate_hypotheses(const Graph& g, const std::vector<Decomposition>& decomps) {
  HypothesisFamily family;
  std::map<std::pair<VertexSet, VertexSet>, std::size_t> index;
  family.slots.resize(decomps.size());
  for (std::size_t i = 0; i < decomps.size(); ++i) {
    const Decomposition& d = decomps[i];
    for (std::size_t j = 0; j < d.size(); ++j) {
      VertexSet target = set_difference(d.cliques[j], d.separators[j]);
      auto [it, fresh] = index.emplace(std::make_pair(target, d.separators[j]), family.size());
      if (fresh) {
        Hypothesis h;
        h.key = hypothesis_key(g, target, d.separators[j]);
        h.target = std::move(target);
        h.given = d.separators[j];
        family.hypotheses.push_back(std::move(h));
      }
      family.hypotheses[it->second].memberships.push_back({i, j});
      family.slots[i].push_back(it->second);
    }
  }
  return family;
}

std::size_t nominal_test_count(const std::vector<Decomposition>& decomps) {
  if (decomps.empty()) return 0;
  const Decomposition& d = decomps.front();
  std::size_t total = d.size();
  for (const auto& clique : d.cliques)
    for (std::size_t j = 1; j < d.size(); ++j)
      if (is_subset(d.separators[j], clique)) ++total;
  return total;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::MinP: return "minp";
    case Method::MaxT: return "maxt";
    case Method::Bonferroni: return "bonferroni";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "minp") return Method::MinP;
  if (lower == "maxt") return Method::MaxT;
  if (lower == "bonferroni") return Method::Bonferroni;
  throw InputError("unknown method '" + std::string(text) + "' (expected minp, maxt or bonferroni)");
}

// ---------------------------------------------------------------------------
// Statistics and multiplicity adjustment

std::vector<TestResult> compute_statistics(const HypothesisFamily& family, const DataMatrix& x1,
                                           const DataMatrix& x2) {
  const detail::StatisticsEngine engine(family, x1, x2);
  const std::vector<double> stats = engine.observed();
  std::vector<TestResult> out(family.size());
  for (std::size_t h = 0; h < family.size(); ++h) {
    out[h].key = family.hypotheses[h].key;
    out[h].statistic = stats[h];
    out[h].df = family.hypotheses[h].df();
    out[h].asymptotic_p = chisq_sf(stats[h], out[h].df);
    out[h].adjusted_p = out[h].asymptotic_p;
  }
  return out;
}

std::vector<std::size_t> stepdown_order(const std::vector<TestResult>& observed,
                                        const std::vector<double>& score, bool ascending) {
  std::vector<std::size_t> order(observed.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return ascending ? score[a] < score[b] : score[a] > score[b];
    return observed[a].key < observed[b].key;
  });
  return order;
}

namespace {

void finalize(std::vector<TestResult>& results, double alpha) {
  for (auto& r : results) {
    if (r.permutation_p) r.adjusted_p = std::max(r.adjusted_p, *r.permutation_p);
    r.adjusted_p = std::min(1.0, r.adjusted_p);
    r.rejected = r.adjusted_p <= alpha;
  }
}

// Monotone adjusted p-values along the step-down order from per-rank counts.
void apply_rank_counts(std::vector<TestResult>& results, const std::vector<std::size_t>& order,
                       const std::vector<std::size_t>& rank_count, std::size_t total) {
  double running = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    running = std::max(running, static_cast<double>(rank_count[r]) / static_cast<double>(total));
    results[order[r]].adjusted_p = running;
  }
}

}  // namespace

std::vector<TestResult> stepdown_adjust(std::vector<TestResult> observed, const NullMatrix& null,
                                        Method method, double alpha) {
  const std::size_t hcount = observed.size();
  const std::size_t b_count = null.replicates;
  if (method == Method::Bonferroni) throw InputError("Bonferroni does not use a null matrix");
  if (null.hypotheses != hcount) throw InputError("null matrix does not match the hypotheses");
  const std::size_t total = b_count + 1;  // observed labelling counts as one permutation

  // Raw exceedance counts, including the observed labelling itself.
  std::vector<std::size_t> raw(hcount, 1);
  for (std::size_t b = 0; b < b_count; ++b)
    for (std::size_t h = 0; h < hcount; ++h)
      if (null(b, h) >= observed[h].statistic) ++raw[h];
  for (std::size_t h = 0; h < hcount; ++h)
    observed[h].permutation_p = static_cast<double>(raw[h]) / static_cast<double>(total);

  std::vector<std::size_t> rank_count(hcount, 0);
  if (method == Method::MinP) {
    // Null p-value counts: c[b][h] = #{b' in 0..B : T_b'h >= T_bh}; row 0 is observed.
    std::vector<std::size_t> counts(total * hcount);
    std::vector<double> column(total);
    for (std::size_t h = 0; h < hcount; ++h) {
      column[0] = observed[h].statistic;
      for (std::size_t b = 0; b < b_count; ++b) column[b + 1] = null(b, h);
      std::vector<double> sorted = column;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t b = 0; b < total; ++b) {
        const auto ge = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), column[b]);
        counts[b * hcount + h] = static_cast<std::size_t>(ge);
      }
    }
    std::vector<double> raw_p(hcount);
    for (std::size_t h = 0; h < hcount; ++h) raw_p[h] = static_cast<double>(raw[h]);
    const std::vector<std::size_t> order = stepdown_order(observed, raw_p, true);
    for (std::size_t b = 0; b < total; ++b) {
      std::size_t running = SIZE_MAX;
      for (std::size_t r = hcount; r-- > 0;) {
        const std::size_t h = order[r];
        running = std::min(running, counts[b * hcount + h]);
        if (running <= raw[h]) ++rank_count[r];
      }
    }
    apply_rank_counts(observed, order, rank_count, total);
  } else {
    // max-T on -log(chi-square tail) so hypotheses with different df compare.
    std::vector<double> score(hcount);
    for (std::size_t h = 0; h < hcount; ++h)
      score[h] = -chisq_logsf(observed[h].statistic, observed[h].df);
    const std::vector<std::size_t> order = stepdown_order(observed, score, false);
    std::vector<double> row(hcount);
    for (std::size_t b = 0; b < total; ++b) {
      for (std::size_t h = 0; h < hcount; ++h)
        row[h] = b == 0 ? score[h] : -chisq_logsf(null(b - 1, h), observed[h].df);
      double running = -INFINITY;
      for (std::size_t r = hcount; r-- > 0;) {
        const std::size_t h = order[r];
        running = std::max(running, row[h]);
        if (running >= score[h]) ++rank_count[r];
      }
    }
    apply_rank_counts(observed, order, rank_count, total);
  }
  finalize(observed, alpha);
  return observed;
}

std::vector<TestResult> stepdown_from_summary(std::vector<TestResult> observed,
                                              const StreamingSummary& summary, double alpha) {
  const std::size_t total = summary.replicates + 1;
  for (std::size_t h = 0; h < observed.size(); ++h)
    observed[h].permutation_p =
        static_cast<double>(summary.raw_exceed[h] + 1) / static_cast<double>(total);
  std::vector<std::size_t> counts(summary.rank_exceed);
  for (auto& c : counts) ++c;  // the observed labelling always attains its own maximum
  apply_rank_counts(observed, summary.order, counts, total);
  finalize(observed, alpha);
  return observed;
}

std::vector<TestResult> bonferroni_adjust(std::vector<TestResult> observed, std::size_t factor,
                                          double alpha) {
  for (auto& r : observed) {
    r.permutation_p.reset();
    r.adjusted_p = std::min(1.0, r.asymptotic_p * static_cast<double>(factor));
  }
  finalize(observed, alpha);
  return observed;
}

// ---------------------------------------------------------------------------
// Combining decisions

SeedSetEstimate combine_decisions(const std::vector<Decomposition>& decomps,
                                  const DecisionMatrix& decisions) {
  if (decisions.size() != decomps.size()) throw InputError("decision matrix shape mismatch");
  SeedSetEstimate est;
  for (std::size_t i = 0; i < decomps.size(); ++i) {
    if (decisions[i].size() != decomps[i].size()) throw InputError("decision matrix shape mismatch");
    VertexSet u;
    for (std::size_t j = 0; j < decomps[i].size(); ++j)
      if (decisions[i][j]) u = set_union(u, decomps[i].cliques[j]);
    est.unions.push_back(std::move(u));
  }
  if (!est.unions.empty()) {
    est.variables = est.unions.front();
    for (std::size_t i = 1; i < est.unions.size(); ++i)
      est.variables = set_intersection(est.variables, est.unions[i]);
  }
  return est;
}

SeedSetEstimate estimate_seed_set(const std::vector<TestResult>& results,
                                  const HypothesisFamily& family,
                                  const std::vector<Decomposition>& decomps, double alpha) {
  if (family.slots.size() != decomps.size()) throw InputError("family does not match decompositions");
  DecisionMatrix decisions(decomps.size());
  for (std::size_t i = 0; i < decomps.size(); ++i) {
    for (std::size_t j = 0; j < decomps[i].size(); ++j) {
      if (j >= family.slots[i].size()) throw InputError("unresolved hypothesis slot");
      const std::string& key = family.hypotheses[family.slots[i][j]].key;
      auto it = std::find_if(results.begin(), results.end(),
                             [&](const TestResult& r) { return r.key == key; });
      if (it == results.end()) throw InputError("no test result for hypothesis " + key);
      decisions[i].push_back(it->adjusted_p <= alpha);
    }
  }
  SeedSetEstimate est = combine_decisions(decomps, decisions);
  est.alpha = alpha;
  return est;
}

// ---------------------------------------------------------------------------
// Oracle decisions from parameters

double conditional_law_distance(const GgmParams& p1, const GgmParams& p2, const VertexSet& target,
                                const VertexSet& given) {
  auto law = [&](const GgmParams& p) {
    const Eigen::MatrixXd sbb = submatrix(p.covariance, target);
    const Eigen::VectorXd mb = subvector(p.mean, target);
    if (given.empty()) return std::make_tuple(Eigen::MatrixXd(sbb.rows(), 0), mb, sbb);
    const Eigen::MatrixXd sbs = submatrix(p.covariance, target, given);
    const Eigen::MatrixXd sss = submatrix(p.covariance, given);
    Eigen::LLT<Eigen::MatrixXd> llt(sss);
    if (llt.info() != Eigen::Success) throw InputError("conditioning block is not positive definite");
    const Eigen::MatrixXd coef = llt.solve(sbs.transpose()).transpose();
    const Eigen::VectorXd intercept = mb - coef * subvector(p.mean, given);
    const Eigen::MatrixXd resid = sbb - coef * sbs.transpose();
    return std::make_tuple(coef, intercept, resid);
  };
  const auto [c1, i1, r1] = law(p1);
  const auto [c2, i2, r2] = law(p2);
  double worst = (i1 - i2).cwiseAbs().maxCoeff();
  worst = std::max(worst, (r1 - r2).cwiseAbs().maxCoeff());
  if (c1.size() > 0) worst = std::max(worst, (c1 - c2).cwiseAbs().maxCoeff());
  return worst;
}

DecisionMatrix oracle_decisions(const GgmParams& p1, const GgmParams& p2,
                                const std::vector<Decomposition>& decomps, double tol) {
  if (p1.mean.size() != p2.mean.size() || p1.covariance.rows() != p2.covariance.rows())
    throw InputError("parameter sets have different dimensions");
  DecisionMatrix out(decomps.size());
  for (std::size_t i = 0; i < decomps.size(); ++i)
    for (std::size_t j = 0; j < decomps[i].size(); ++j) {
      const VertexSet target = set_difference(decomps[i].cliques[j], decomps[i].separators[j]);
      out[i].push_back(conditional_law_distance(p1, p2, target, decomps[i].separators[j]) > tol);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

InferenceResult run_inference(const Graph& g, const DataMatrix& x1, const DataMatrix& x2,
                              const InferenceOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (x1.labels != g.labels() || x2.labels != g.labels())
    throw InputError("data columns are not aligned to the graph");

  InferenceResult out;
  out.decompositions = all_decompositions(g);
  out.family = enumerate_hypotheses(g, out.decompositions);
  out.global = lrt_global(g, out.decompositions.front(), x1, x2);
  out.global_p = chisq_sf(out.global.statistic, out.global.df);

  std::vector<TestResult> observed = compute_statistics(out.family, x1, x2);
  PermutationOptions perm{options.permutations, options.seed, options.threads, false};

  switch (options.method) {
    case Method::Bonferroni:
      out.results = bonferroni_adjust(std::move(observed), nominal_test_count(out.decompositions),
                                      options.alpha);
      break;
    case Method::MinP:
    case Method::MaxT: {
      if (options.permutations < 1) throw InputError("at least one permutation is required");
      if (1.0 / static_cast<double>(options.permutations + 1) > options.alpha)
        out.warnings.push_back("with " + std::to_string(options.permutations) +
                               " permutations no p-value can reach alpha; increase --permutations");
      const double bytes = static_cast<double>(options.permutations) *
                           static_cast<double>(out.family.size()) * sizeof(double);
      if (bytes > static_cast<double>(options.memory_budget_bytes)) {
        out.streaming = true;
        if (options.method == Method::MinP)
          out.warnings.push_back("null matrix exceeds the memory budget; min-P replaced by streaming max-T");
        const StreamingSummary summary =
            permutation_null_streaming(out.family, x1, x2, observed, perm);
        out.results = stepdown_from_summary(std::move(observed), summary, options.alpha);
      } else {
        const NullMatrix null = permutation_null(out.family, x1, x2, perm);
        out.results = stepdown_adjust(std::move(observed), null, options.method, options.alpha);
      }
      break;
    }
  }

  out.estimate = estimate_seed_set(out.results, out.family, out.decompositions, options.alpha);
  out.estimate.method = options.method;
  out.estimate.permutations = options.method == Method::Bonferroni ? 0 : options.permutations;
  return out;
}

}  // namespace seedset
