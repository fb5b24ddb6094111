#pragma once

#include <cstddef>
#include <cstdint>

#include "seedset/graph.hpp"

namespace seedset {

struct DecomposableGraphParams {
  std::size_t nodes = 15;
  std::size_t cliques = 6;
  std::size_t max_clique = 4;
  std::uint64_t seed = 1;
};

/// Random connected decomposable graph grown clique by clique along a random
/// junction tree: each new clique shares a nonempty proper subset of an
/// existing clique and adds fresh vertices. Vertices are labelled "1".."nodes"
/// in a shuffled assignment. Exactly `cliques` maximal cliques are produced,
/// none larger than `max_clique`. Throws InputError for infeasible parameters.
Graph random_decomposable_graph(const DecomposableGraphParams& params);

}  // namespace seedset
