#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seedset/graph.hpp"
#include "seedset/numerics.hpp"
#include "seedset/rng.hpp"

namespace seedset::testing {

inline Graph graph_from(std::size_t p, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= p; ++i) labels.push_back(std::to_string(i));
  std::vector<std::pair<std::string, std::string>> e;
  for (auto [u, v] : edges) e.emplace_back(std::to_string(u), std::to_string(v));
  return build_graph(labels, e);
}

// Two triangles sharing vertex 3.
inline Graph two_triangles() { return graph_from(5, {{1, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 5}}); }

inline Graph cycle(std::size_t p) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 1; i <= p; ++i) e.emplace_back(static_cast<int>(i), static_cast<int>(i % p + 1));
  return graph_from(p, e);
}

inline Graph complete(std::size_t p) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 1; i <= p; ++i)
    for (std::size_t j = i + 1; j <= p; ++j) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return graph_from(p, e);
}

// Vertex set from 1-based labels of a graph built by graph_from.
inline VertexSet vs(const Graph& g, std::initializer_list<int> labels) {
  std::vector<std::string> l;
  for (int x : labels) l.push_back(std::to_string(x));
  return vertex_set(g, l);
}

inline Eigen::MatrixXd random_spd(Eigen::Index p, Philox& rng) {
  Eigen::MatrixXd a(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a * a.transpose() / static_cast<double>(p) + Eigen::MatrixXd::Identity(p, p);
}

inline DataMatrix gaussian_data(const Graph& g, Eigen::Index n, Philox& rng, double shift = 0.0) {
  DataMatrix x;
  x.labels = g.labels();
  x.values.resize(n, static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < x.values.cols(); ++c) x.values(r, c) = rng.normal() + shift;
  return x;
}

}  // namespace seedset::testing
