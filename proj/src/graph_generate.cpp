#include "seedset/graph_generate.hpp"

#include <algorithm>
#include <numeric>

#include "seedset/error.hpp"
#include "seedset/rng.hpp"

namespace seedset {

namespace {

std::size_t uniform_between(Philox& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

}  // namespace

Graph random_decomposable_graph(const DecomposableGraphParams& params) {
  const std::size_t p = params.nodes, k = params.cliques, m = params.max_clique;
  if (k == 0 || p == 0) throw InputError("generator: nodes and cliques must be positive");
  if (k == 1 && p > m) throw InputError("generator: a single clique cannot exceed max_clique");
  if (k > 1 && (m < 2 || p < k + 1 || p > m + (k - 1) * (m - 1)))
    throw InputError("generator: no decomposable graph with these nodes/cliques/max_clique");

  Philox rng(derive_seed(params.seed, {0x6772617068ULL}));
  std::vector<VertexSet> cliques;

  // First clique: leave room for at least one fresh vertex per later clique
  // and no more than m-1 each.
  std::size_t first_lo = k == 1 ? p : std::max<std::size_t>(2, p > (k - 1) * (m - 1) ? p - (k - 1) * (m - 1) : 0);
  std::size_t first_hi = k == 1 ? p : std::min(m, p - (k - 1));
  VertexSet first(uniform_between(rng, first_lo, first_hi));
  std::iota(first.begin(), first.end(), 0);
  Vertex next = static_cast<Vertex>(first.size());
  cliques.push_back(first);

  for (std::size_t t = 1; t < k; ++t) {
    const std::size_t remaining = p - static_cast<std::size_t>(next);
    const std::size_t later = k - 1 - t;
    const std::size_t fresh_lo = std::max<std::size_t>(1, remaining > later * (m - 1) ? remaining - later * (m - 1) : 0);
    const std::size_t fresh_hi_budget = remaining - later;

    // Parents need at least two vertices so a proper nonempty separator exists.
    std::vector<std::size_t> parents;
    for (std::size_t c = 0; c < cliques.size(); ++c)
      if (cliques[c].size() >= 2) parents.push_back(c);
    const VertexSet& parent = cliques[parents[rng.below(parents.size())]];

    const std::size_t sep_hi = std::min(parent.size() - 1, m - fresh_lo);
    const std::size_t sep_size = uniform_between(rng, 1, sep_hi);
    const std::size_t fresh = uniform_between(rng, fresh_lo, std::min(fresh_hi_budget, m - sep_size));

    VertexSet pool = parent;
    for (std::size_t i = 0; i < sep_size; ++i)
      std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    VertexSet clique(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sep_size));
    for (std::size_t i = 0; i < fresh; ++i) clique.push_back(next++);
    cliques.push_back(normalized(std::move(clique)));
  }

  std::vector<std::size_t> relabel(p);
  std::iota(relabel.begin(), relabel.end(), 1);
  for (std::size_t i = p; i > 1; --i) std::swap(relabel[i - 1], relabel[rng.below(i)]);

  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= p; ++i) labels.push_back(std::to_string(i));
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& c : cliques)
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        edges.emplace_back(std::to_string(relabel[static_cast<std::size_t>(c[a])]),
                           std::to_string(relabel[static_cast<std::size_t>(c[b])]));
  return build_graph(std::move(labels), edges);
}

}  // namespace seedset
