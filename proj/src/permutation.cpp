#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include <omp.h>

#include "seedset/error.hpp"
#include "statistics_engine.hpp"

namespace seedset {

namespace detail {

StatisticsEngine::StatisticsEngine(const HypothesisFamily& family, const DataMatrix& x1,
                                   const DataMatrix& x2)
    : n1_(static_cast<std::size_t>(x1.rows())), n2_(static_cast<std::size_t>(x2.rows())) {
  if (x1.labels != x2.labels) throw InputError("samples have different column labels");

  std::map<VertexSet, std::size_t> block_of;
  std::map<VertexSet, std::size_t> marginal_of;
  auto add_block = [&](const VertexSet& cols) {
    auto [it, fresh] = block_of.emplace(cols, blocks_.size());
    if (fresh) blocks_.push_back({cols, {}});
    return it->second;
  };
  auto add_marginal = [&](const VertexSet& set, std::size_t host) {
    auto [it, fresh] = marginal_of.emplace(set, marginals_.size());
    if (fresh) {
      Marginal m;
      m.block = host;
      const VertexSet& cols = blocks_[host].columns;
      for (Vertex v : set)
        m.positions.push_back(std::lower_bound(cols.begin(), cols.end(), v) - cols.begin());
      for (std::size_t i = 0; i < set.size(); ++i)
        m.name += (i ? "," : "") + x1.labels[static_cast<std::size_t>(set[i])];
      m.name = "{" + m.name + "}";
      marginals_.push_back(std::move(m));
    }
    return it->second;
  };

  for (const auto& h : family.hypotheses) {
    const VertexSet scope = h.scope();
    const std::size_t host = add_block(scope);
    HypothesisTerms t;
    t.scope = add_marginal(scope, host);
    if (!h.given.empty()) t.given = static_cast<std::ptrdiff_t>(add_marginal(h.given, host));
    hyps_.push_back(t);
  }

  const Block* largest = nullptr;
  for (const auto& b : blocks_)
    if (largest == nullptr || b.columns.size() > largest->columns.size()) largest = &b;
  if (largest != nullptr && std::min(n1_, n2_) <= largest->columns.size()) {
    std::string where = "{";
    for (std::size_t j = 0; j < largest->columns.size(); ++j)
      where += (j ? "," : "") + x1.labels[static_cast<std::size_t>(largest->columns[j])];
    where += "}";
    throw MleError("MLE does not exist for clique " + where + ": min(n1, n2) = " +
                       std::to_string(std::min(n1_, n2_)) + " must exceed its size " +
                       std::to_string(largest->columns.size()),
                   where);
  }

  const auto n = static_cast<Eigen::Index>(n1_ + n2_);
  for (auto& b : blocks_) {
    b.data.resize(n, static_cast<Eigen::Index>(b.columns.size()));
    for (std::size_t j = 0; j < b.columns.size(); ++j) {
      b.data.col(static_cast<Eigen::Index>(j)).head(x1.rows()) = x1.values.col(b.columns[j]);
      b.data.col(static_cast<Eigen::Index>(j)).tail(x2.rows()) = x2.values.col(b.columns[j]);
    }
  }
  marginals_of_block_.assign(blocks_.size(), {});
  for (std::size_t m = 0; m < marginals_.size(); ++m)
    marginals_of_block_[marginals_[m].block].push_back(m);

  // Pooled covariance per block from the observed split:
  // (S1 + S2 + n1 d1 d1' + n2 d2 d2') / n, with d_l the group mean minus the grand mean.
  Workspace ws = make_workspace();
  set_observed(ws);
  const double dn1 = static_cast<double>(n1_), dn2 = static_cast<double>(n2_);
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const Block& b = blocks_[bi];
    group_covariance(b, ws.in_first, true, ws.y1, ws.cov1);
    group_covariance(b, ws.in_first, false, ws.y2, ws.cov2);
    const Eigen::VectorXd m1 = b.data.topRows(x1.rows()).colwise().mean().transpose();
    const Eigen::VectorXd m2 = b.data.bottomRows(x2.rows()).colwise().mean().transpose();
    const Eigen::VectorXd grand = (dn1 * m1 + dn2 * m2) / (dn1 + dn2);
    const Eigen::VectorXd d1 = m1 - grand, d2 = m2 - grand;
    const Eigen::MatrixXd pooled =
        (dn1 * ws.cov1 + dn2 * ws.cov2 + dn1 * d1 * d1.transpose() + dn2 * d2 * d2.transpose()) /
        (dn1 + dn2);
    for (std::size_t mi : marginals_of_block_[bi]) {
      Marginal& m = marginals_[mi];
      m.pooled_logdet = logdet_spd(pooled(m.positions, m.positions), m.name);
    }
  }
}

StatisticsEngine::Workspace StatisticsEngine::make_workspace() const {
  Workspace ws;
  ws.in_first.assign(rows(), 0);
  ws.perm.resize(rows());
  ws.lambda.assign(marginals_.size(), 0.0);
  return ws;
}

void StatisticsEngine::set_observed(Workspace& ws) const {
  std::fill(ws.in_first.begin(), ws.in_first.end(), 0);
  std::fill(ws.in_first.begin(), ws.in_first.begin() + static_cast<std::ptrdiff_t>(n1_), 1);
}

void StatisticsEngine::set_permuted(Workspace& ws, Philox& rng) const {
  const std::size_t n = rows();
  std::iota(ws.perm.begin(), ws.perm.end(), 0);
  for (std::size_t i = 0; i < n1_; ++i) std::swap(ws.perm[i], ws.perm[i + rng.below(n - i)]);
  std::fill(ws.in_first.begin(), ws.in_first.end(), 0);
  for (std::size_t i = 0; i < n1_; ++i) ws.in_first[static_cast<std::size_t>(ws.perm[i])] = 1;
}

void StatisticsEngine::group_covariance(const Block& b, const std::vector<std::uint8_t>& in_first,
                                        bool first, Eigen::MatrixXd& y, Eigen::MatrixXd& cov) const {
  const auto count = static_cast<Eigen::Index>(first ? n1_ : n2_);
  const auto cols = b.data.cols();
  y.resize(count, cols);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < b.data.rows(); ++i)
    if ((in_first[static_cast<std::size_t>(i)] != 0) == first) y.row(r++) = b.data.row(i);
  const Eigen::RowVectorXd mean = y.colwise().mean();
  y.rowwise() -= mean;
  cov.noalias() = y.transpose() * y;
  cov /= static_cast<double>(count);
}

void StatisticsEngine::evaluate(Workspace& ws, std::span<double> out) const {
  const double dn1 = static_cast<double>(n1_), dn2 = static_cast<double>(n2_);
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    group_covariance(blocks_[bi], ws.in_first, true, ws.y1, ws.cov1);
    group_covariance(blocks_[bi], ws.in_first, false, ws.y2, ws.cov2);
    for (std::size_t mi : marginals_of_block_[bi]) {
      const Marginal& m = marginals_[mi];
      const double ld1 = logdet_spd(ws.cov1(m.positions, m.positions), m.name);
      const double ld2 = logdet_spd(ws.cov2(m.positions, m.positions), m.name);
      ws.lambda[mi] = dn1 * (m.pooled_logdet - ld1) + dn2 * (m.pooled_logdet - ld2);
    }
  }
  for (std::size_t h = 0; h < hyps_.size(); ++h) {
    double value = ws.lambda[hyps_[h].scope];
    if (hyps_[h].given >= 0) value -= ws.lambda[static_cast<std::size_t>(hyps_[h].given)];
    out[h] = clamp_statistic(value);
  }
}

std::vector<double> StatisticsEngine::observed() const {
  Workspace ws = make_workspace();
  set_observed(ws);
  std::vector<double> out(hypotheses());
  evaluate(ws, out);
  return out;
}

namespace {

void fill_replicate(const StatisticsEngine& engine, StatisticsEngine::Workspace& ws,
                    const PermutationOptions& options, std::size_t b, std::span<double> row) {
  if (options.identity) {
    engine.set_observed(ws);
  } else {
    Philox rng(replicate_key(options.seed, b));
    engine.set_permuted(ws, rng);
  }
  engine.evaluate(ws, row);
}

void check_options(const PermutationOptions& options) {
  if (options.replicates < 1) throw InputError("at least one permutation is required");
}

// Exceptions cannot leave an OpenMP region; keep the one from the lowest
// replicate so the reported error does not depend on scheduling.
struct FirstError {
  std::size_t replicate = SIZE_MAX;
  std::exception_ptr error;

  void record(std::size_t b, std::exception_ptr e) {
#pragma omp critical(seedset_first_error)
    if (b < replicate) {
      replicate = b;
      error = std::move(e);
    }
  }
  void rethrow() const {
    if (error) std::rethrow_exception(error);
  }
};

int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

}  // namespace

}  // namespace detail

using detail::StatisticsEngine;

NullMatrix permutation_null_serial(const HypothesisFamily& family, const DataMatrix& x1,
                                   const DataMatrix& x2, const PermutationOptions& options) {
  detail::check_options(options);
  const StatisticsEngine engine(family, x1, x2);
  NullMatrix out{options.replicates, engine.hypotheses(), {}};
  out.values.resize(out.replicates * out.hypotheses);
  auto ws = engine.make_workspace();
  for (std::size_t b = 0; b < options.replicates; ++b)
    detail::fill_replicate(engine, ws, options, b,
                           std::span<double>(out.values).subspan(b * out.hypotheses, out.hypotheses));
  return out;
}

NullMatrix permutation_null(const HypothesisFamily& family, const DataMatrix& x1,
                            const DataMatrix& x2, const PermutationOptions& options) {
  detail::check_options(options);
  const StatisticsEngine engine(family, x1, x2);
  NullMatrix out{options.replicates, engine.hypotheses(), {}};
  out.values.resize(out.replicates * out.hypotheses);
  const auto replicates = static_cast<std::ptrdiff_t>(options.replicates);
  detail::FirstError failure;

#pragma omp parallel num_threads(detail::resolve_threads(options.threads))
  {
    auto ws = engine.make_workspace();
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t b = 0; b < replicates; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      try {
        detail::fill_replicate(engine, ws, options, ub,
                               std::span<double>(out.values).subspan(ub * out.hypotheses, out.hypotheses));
      } catch (...) {
        failure.record(ub, std::current_exception());
      }
    }
  }
  failure.rethrow();
  return out;
}

StreamingSummary permutation_null_streaming(const HypothesisFamily& family, const DataMatrix& x1,
                                            const DataMatrix& x2,
                                            const std::vector<TestResult>& observed,
                                            const PermutationOptions& options) {
  detail::check_options(options);
  const StatisticsEngine engine(family, x1, x2);
  const std::size_t hcount = engine.hypotheses();
  if (observed.size() != hcount) throw InputError("observed results do not match the family");

  std::vector<double> score(hcount);
  for (std::size_t h = 0; h < hcount; ++h)
    score[h] = -chisq_logsf(observed[h].statistic, observed[h].df);

  StreamingSummary summary;
  summary.replicates = options.replicates;
  summary.order = stepdown_order(observed, score, false);
  summary.raw_exceed.assign(hcount, 0);
  summary.rank_exceed.assign(hcount, 0);

  const auto replicates = static_cast<std::ptrdiff_t>(options.replicates);
  detail::FirstError failure;

#pragma omp parallel num_threads(detail::resolve_threads(options.threads))
  {
    auto ws = engine.make_workspace();
    std::vector<double> row(hcount);
    std::vector<std::size_t> raw(hcount, 0), rank(hcount, 0);
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t b = 0; b < replicates; ++b) {
      try {
        detail::fill_replicate(engine, ws, options, static_cast<std::size_t>(b), row);
        for (std::size_t h = 0; h < hcount; ++h)
          if (row[h] >= observed[h].statistic) ++raw[h];
        double running = -INFINITY;
        for (std::size_t r = hcount; r-- > 0;) {
          const std::size_t h = summary.order[r];
          running = std::max(running, -chisq_logsf(row[h], observed[h].df));
          if (running >= score[h]) ++rank[r];
        }
      } catch (...) {
        failure.record(static_cast<std::size_t>(b), std::current_exception());
      }
    }
    // Integer sums commute, so the merge order does not matter.
#pragma omp critical(seedset_streaming_merge)
    for (std::size_t h = 0; h < hcount; ++h) {
      summary.raw_exceed[h] += raw[h];
      summary.rank_exceed[h] += rank[h];
    }
  }
  failure.rethrow();
  return summary;
}

}  // namespace seedset
