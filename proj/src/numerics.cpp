#include "seedset/numerics.hpp"

#include <cmath>
#include <limits>

#include "seedset/error.hpp"

namespace seedset {

DataMatrix align_to_graph(const DataMatrix& x, const Graph& g) {
  if (static_cast<std::size_t>(x.cols()) != g.size() || x.labels.size() != g.size())
    throw InputError("data has " + std::to_string(x.cols()) + " columns but the graph has " +
                     std::to_string(g.size()) + " vertices");
  DataMatrix out;
  out.values.resize(x.rows(), x.cols());
  out.labels = g.labels();
  std::vector<bool> used(g.size(), false);
  for (std::size_t c = 0; c < x.labels.size(); ++c) {
    auto v = g.find(x.labels[c]);
    if (!v) throw InputError("data column '" + x.labels[c] + "' is not a graph vertex");
    if (used[static_cast<std::size_t>(*v)])
      throw InputError("data column '" + x.labels[c] + "' appears twice");
    used[static_cast<std::size_t>(*v)] = true;
    out.values.col(*v) = x.values.col(static_cast<Eigen::Index>(c));
  }
  return out;
}

Moments sample_moments(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw InputError("sample moments need at least two observations");
  Moments m;
  m.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
  m.covariance = (centered.transpose() * centered) / static_cast<double>(x.rows());
  return m;
}

Moments sample_moments(const DataMatrix& x) { return sample_moments(x.values); }

Eigen::MatrixXd pooled_covariance(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2) {
  if (x1.cols() != x2.cols()) throw InputError("samples have different numbers of columns");
  const double n = static_cast<double>(x1.rows() + x2.rows());
  const Eigen::RowVectorXd grand = (x1.colwise().sum() + x2.colwise().sum()) / n;
  const Eigen::MatrixXd c1 = x1.rowwise() - grand;
  const Eigen::MatrixXd c2 = x2.rowwise() - grand;
  return (c1.transpose() * c1 + c2.transpose() * c2) / n;
}

Eigen::MatrixXd pooled_covariance(const DataMatrix& x1, const DataMatrix& x2) {
  if (x1.labels != x2.labels) throw InputError("samples have different column labels");
  return pooled_covariance(x1.values, x2.values);
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const VertexSet& rows, const VertexSet& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
  return out;
}

Eigen::VectorXd subvector(const Eigen::VectorXd& v, const VertexSet& s) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(s[i]);
  return out;
}

bool try_logdet_spd(const Eigen::MatrixXd& a, double& out) {
  if (a.size() == 0) {
    out = 0.0;
    return true;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) return false;
    sum += std::log(diag(i));
  }
  out = 2.0 * sum;
  return true;
}

double logdet_spd(const Eigen::MatrixXd& a, const std::string& where) {
  double out = 0.0;
  if (!try_logdet_spd(a, out))
    throw MleError("covariance block " + where + " is not positive definite", where);
  return out;
}

namespace {

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw InputError("matrix block is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

void add_padded(Eigen::MatrixXd& k, const Eigen::MatrixXd& block, const VertexSet& s, double sign) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      k(s[i], s[j]) += sign * block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

std::string braces(const VertexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

std::string braces(const VertexSet& s, const std::vector<std::string>& labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += (i ? "," : "") + labels.at(static_cast<std::size_t>(s[i]));
  return out + "}";
}

}  // namespace

Eigen::MatrixXd completed_concentration(const Eigen::MatrixXd& omega, const Decomposition& d) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(omega.rows(), omega.cols());
  for (std::size_t i = 0; i < d.size(); ++i) {
    add_padded(k, spd_inverse(submatrix(omega, d.cliques[i])), d.cliques[i], 1.0);
    if (!d.separators[i].empty())
      add_padded(k, spd_inverse(submatrix(omega, d.separators[i])), d.separators[i], -1.0);
  }
  return k;
}

Eigen::MatrixXd completed_concentration(const Eigen::MatrixXd& omega, const Graph& g) {
  if (static_cast<std::size_t>(omega.rows()) != g.size() || omega.rows() != omega.cols())
    throw InputError("matrix dimension does not match the graph");
  if (!is_decomposable(g)) throw GraphError("graph is not decomposable");
  // Components are independent blocks; each contributes its own clique terms.
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(omega.rows(), omega.cols());
  for (const auto& comp : component_vertex_sets(g)) {
    const Graph sub = g.induced(comp);
    const Eigen::MatrixXd block = completed_concentration(submatrix(omega, comp), all_decompositions(sub).front());
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t j = 0; j < comp.size(); ++j)
        k(comp[i], comp[j]) = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return k;
}

Eigen::MatrixXd complete_to_graph(const Eigen::MatrixXd& omega, const Graph& g) {
  Eigen::MatrixXd sigma = spd_inverse(completed_concentration(omega, g));
  return 0.5 * (sigma + sigma.transpose());
}

double max_missing_edge_concentration(const Eigen::MatrixXd& sigma, const Graph& g) {
  const Eigen::MatrixXd k = spd_inverse(sigma);
  double worst = 0.0;
  for (Vertex u = 0; u < static_cast<Vertex>(g.size()); ++u)
    for (Vertex v = u + 1; v < static_cast<Vertex>(g.size()); ++v)
      if (!g.adjacent(u, v))
        worst = std::max(worst, std::abs(k(u, v)) / std::sqrt(k(u, u) * k(v, v)));
  return worst;
}

double graph_logdet(const Eigen::MatrixXd& sigma, const Decomposition& d) {
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += logdet_spd(submatrix(sigma, d.cliques[i]), braces(d.cliques[i]));
    if (!d.separators[i].empty())
      total -= logdet_spd(submatrix(sigma, d.separators[i]), braces(d.separators[i]));
  }
  return total;
}

int marginal_df(std::size_t set_size) {
  const auto a = static_cast<int>(set_size);
  return 2 * a + a * (a - 1) / 2;
}

double clamp_statistic(double value) {
  // Cancellation can leave lambda(C) - lambda(S) a hair below zero.
  return value < 0.0 ? 0.0 : value;
}

namespace {

void check_pair(const DataMatrix& x1, const DataMatrix& x2) {
  if (x1.cols() != x2.cols() || x1.labels != x2.labels)
    throw InputError("samples have different column labels");
}

double marginal_statistic(const VertexSet& a, const DataMatrix& x1, const DataMatrix& x2) {
  if (a.empty()) return 0.0;
  const auto size = static_cast<Eigen::Index>(a.size());
  const std::string where = a.size() <= 32 ? braces(a, x1.labels) : "of size " + std::to_string(a.size());
  if (std::min(x1.rows(), x2.rows()) <= size)
    throw MleError("MLE does not exist for vertex set " + where + ": min(n1, n2) = " +
                       std::to_string(std::min(x1.rows(), x2.rows())) + " <= " + std::to_string(size),
                   where);
  Eigen::MatrixXd y1(x1.rows(), size), y2(x2.rows(), size);
  for (std::size_t j = 0; j < a.size(); ++j) {
    y1.col(static_cast<Eigen::Index>(j)) = x1.values.col(a[j]);
    y2.col(static_cast<Eigen::Index>(j)) = x2.values.col(a[j]);
  }
  const double n1 = static_cast<double>(x1.rows()), n2 = static_cast<double>(x2.rows());
  const double pooled = logdet_spd(pooled_covariance(y1, y2), where);
  const double g1 = logdet_spd(sample_moments(y1).covariance, where);
  const double g2 = logdet_spd(sample_moments(y2).covariance, where);
  return n1 * (pooled - g1) + n2 * (pooled - g2);
}

}  // namespace

LrtValue lrt_marginal(const VertexSet& a, const DataMatrix& x1, const DataMatrix& x2) {
  check_pair(x1, x2);
  LrtValue out;
  out.statistic = clamp_statistic(marginal_statistic(a, x1, x2));
  out.df = marginal_df(a.size());
  out.target = a;
  return out;
}

LrtValue lrt_conditional(const VertexSet& c, const VertexSet& s, const DataMatrix& x1,
                         const DataMatrix& x2) {
  check_pair(x1, x2);
  if (!is_subset(s, c) || s.size() == c.size())
    throw InputError("conditioning set must be a proper subset of the clique");
  LrtValue out;
  out.statistic =
      clamp_statistic(marginal_statistic(c, x1, x2) - marginal_statistic(s, x1, x2));
  out.df = marginal_df(c.size()) - marginal_df(s.size());
  out.target = set_difference(c, s);
  out.given = s;
  return out;
}

LrtValue lrt_global(const Graph& g, const Decomposition& d, const DataMatrix& x1,
                    const DataMatrix& x2) {
  check_pair(x1, x2);
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    total += marginal_statistic(d.cliques[i], x1, x2) - marginal_statistic(d.separators[i], x1, x2);
  LrtValue out;
  out.statistic = clamp_statistic(total);
  out.df = static_cast<int>(g.edge_count() + 2 * g.size());
  out.target = g.all_vertices();
  return out;
}

// ---------------------------------------------------------------------------
// Incomplete gamma

namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// Series for P(a, x) divided by the prefactor x^a e^-x / Gamma(a).
double p_series(double a, double x) {
  double ap = a, term = 1.0 / a, sum = term;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum;
}

// Continued fraction (modified Lentz) for Q(a, x) divided by the prefactor.
double q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0)) throw InputError("incomplete gamma: shape must be positive");
  if (!(x >= 0.0)) throw InputError("incomplete gamma: argument must be nonnegative");
}

}  // namespace

double gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::exp(log_prefactor(a, x)) * p_series(a, x);
  return 1.0 - std::exp(log_prefactor(a, x)) * q_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - std::exp(log_prefactor(a, x)) * p_series(a, x);
  return std::exp(log_prefactor(a, x)) * q_fraction(a, x);
}

double chisq_sf(double x, int df) {
  if (df < 1) throw InputError("chi-square degrees of freedom must be positive");
  if (!(x >= 0.0)) throw InputError("chi-square argument must be nonnegative");
  return std::clamp(gamma_q(0.5 * df, 0.5 * x), 0.0, 1.0);
}

double chisq_logsf(double x, int df) {
  if (df < 1) throw InputError("chi-square degrees of freedom must be positive");
  if (!(x >= 0.0)) throw InputError("chi-square argument must be nonnegative");
  const double a = 0.5 * df, h = 0.5 * x;
  if (h == 0.0) return 0.0;
  if (h < a + 1.0) return std::log1p(-std::exp(log_prefactor(a, h)) * p_series(a, h));
  return log_prefactor(a, h) + std::log(q_fraction(a, h));
}

}  // namespace seedset
