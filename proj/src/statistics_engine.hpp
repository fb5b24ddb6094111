#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seedset/inference.hpp"
#include "seedset/rng.hpp"

namespace seedset::detail {

/// Evaluates every hypothesis statistic for an arbitrary split of the pooled
/// rows into two groups of the original sizes. The pooled covariance does not
/// depend on the split, so its log-determinants are computed once; each call
/// only rebuilds the per-group clique covariances.
class StatisticsEngine {
 public:
  StatisticsEngine(const HypothesisFamily& family, const DataMatrix& x1, const DataMatrix& x2);

  struct Workspace {
    std::vector<std::uint8_t> in_first;
    std::vector<int> perm;
    std::vector<double> lambda;
    Eigen::MatrixXd y1, y2, cov1, cov2;
  };

  Workspace make_workspace() const;
  std::size_t hypotheses() const noexcept { return hyps_.size(); }
  std::size_t rows() const noexcept { return n1_ + n2_; }

  /// Observed labelling: the first n1 pooled rows form group one.
  void set_observed(Workspace& ws) const;
  /// Partial Fisher-Yates from the identity; the first n1 picks form group one.
  void set_permuted(Workspace& ws, Philox& rng) const;
  /// Fills out[h]; throws MleError if a group covariance block is singular.
  void evaluate(Workspace& ws, std::span<double> out) const;

  std::vector<double> observed() const;

 private:
  struct Block {
    VertexSet columns;
    Eigen::MatrixXd data;  // pooled rows, this clique's columns
  };
  struct Marginal {
    std::size_t block = 0;
    std::vector<Eigen::Index> positions;
    double pooled_logdet = 0.0;
    std::string name;
  };
  struct HypothesisTerms {
    std::size_t scope = 0;
    std::ptrdiff_t given = -1;
  };

  void group_covariance(const Block& b, const std::vector<std::uint8_t>& in_first, bool first,
                        Eigen::MatrixXd& y, Eigen::MatrixXd& cov) const;

  std::size_t n1_ = 0, n2_ = 0;
  std::vector<Block> blocks_;
  std::vector<Marginal> marginals_;
  std::vector<std::vector<std::size_t>> marginals_of_block_;
  std::vector<HypothesisTerms> hyps_;
};

/// Stream key for replicate b.
inline std::uint64_t replicate_key(std::uint64_t seed, std::size_t b) {
  return derive_seed(seed, {0x7065726dULL, static_cast<std::uint64_t>(b)});
}

}  // namespace seedset::detail
