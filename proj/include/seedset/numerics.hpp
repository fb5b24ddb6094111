#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seedset/graph.hpp"

namespace seedset {

/// n x p observations (rows) with one label per column.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

/// Reorders columns to the graph's vertex order. Throws InputError unless the
/// column labels match the vertices one-to-one.
DataMatrix align_to_graph(const DataMatrix& x, const Graph& g);

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Maximum likelihood moments: the covariance divisor is n, not n - 1.
Moments sample_moments(const Eigen::MatrixXd& x);
Moments sample_moments(const DataMatrix& x);

/// MLE of the common covariance under equality of the two distributions:
/// deviations from the grand mean, divided by n1 + n2.
Eigen::MatrixXd pooled_covariance(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2);
Eigen::MatrixXd pooled_covariance(const DataMatrix& x1, const DataMatrix& x2);

/// Mean and covariance of a Gaussian graphical model; the graph is carried by
/// whoever owns the parameters.
struct GgmParams {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// K = sum of padded clique-block inverses minus padded separator-block
/// inverses. Throws InputError if a block of omega is not positive definite.
Eigen::MatrixXd completed_concentration(const Eigen::MatrixXd& omega, const Graph& g);
Eigen::MatrixXd completed_concentration(const Eigen::MatrixXd& omega, const Decomposition& d);

/// Covariance matching omega on every clique whose inverse vanishes on the
/// missing edges of g.
Eigen::MatrixXd complete_to_graph(const Eigen::MatrixXd& omega, const Graph& g);

/// Largest |K_uv| / sqrt(K_uu K_vv) over the missing edges of g.
double max_missing_edge_concentration(const Eigen::MatrixXd& sigma, const Graph& g);

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const VertexSet& rows, const VertexSet& cols);
inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const VertexSet& s) {
  return submatrix(m, s, s);
}
Eigen::VectorXd subvector(const Eigen::VectorXd& v, const VertexSet& s);

/// log|A| via Cholesky. Returns false if A is not positive definite.
bool try_logdet_spd(const Eigen::MatrixXd& a, double& out);
/// Throws MleError naming `where` when A is not positive definite.
double logdet_spd(const Eigen::MatrixXd& a, const std::string& where = "matrix");

/// sum_i log|sigma_{C_i}| - sum_j log|sigma_{S_j}|.
double graph_logdet(const Eigen::MatrixXd& sigma, const Decomposition& d);

/// Number of free parameters separating the two-group and common model on a
/// complete vertex set of the given size: 2|A| + |A|(|A|-1)/2.
int marginal_df(std::size_t set_size);

struct LrtValue {
  double statistic = 0.0;
  int df = 0;
  VertexSet target;  // C \ S (the whole set for a marginal test)
  VertexSet given;   // S, empty for a marginal test

  bool conditional() const noexcept { return !given.empty(); }
};

/// Negative values within this slack of zero are cancellation noise.
inline constexpr double kNegativeSlack = 1e-8;
double clamp_statistic(double value);

/// Two-sample likelihood ratio statistic on the columns a (indices into the
/// aligned data). Requires min(n1, n2) > |a|.
LrtValue lrt_marginal(const VertexSet& a, const DataMatrix& x1, const DataMatrix& x2);
/// lambda(c) - lambda(s); s must be a proper subset of c.
LrtValue lrt_conditional(const VertexSet& c, const VertexSet& s, const DataMatrix& x1,
                         const DataMatrix& x2);

/// Global statistic lambda(V) assembled from clique and separator terms,
/// df = |E| + 2p.
LrtValue lrt_global(const Graph& g, const Decomposition& d, const DataMatrix& x1,
                    const DataMatrix& x2);

/// Upper tail of chi-square(df) at x; throws InputError for x < 0 or df < 1.
double chisq_sf(double x, int df);
/// log of chisq_sf without underflow for large x.
double chisq_logsf(double x, int df);

/// Regularized incomplete gamma functions.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

}  // namespace seedset
