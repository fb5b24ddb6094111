#include <algorithm>
#include <functional>
#include <map>

#include <gtest/gtest.h>

#include "seedset/error.hpp"
#include "seedset/graph.hpp"
#include "seedset/graph_generate.hpp"
#include "seedset/graph_io.hpp"
#include "seedset/rng.hpp"
#include "support.hpp"

using namespace seedset;
using namespace seedset::testing;

namespace {

// Subset enumeration: complete subsets that no vertex can extend.
std::vector<VertexSet> brute_force_cliques(const Graph& g) {
  const std::size_t p = g.size();
  std::vector<VertexSet> out;
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    VertexSet s;
    for (std::size_t v = 0; v < p; ++v)
      if (mask >> v & 1u) s.push_back(static_cast<Vertex>(v));
    bool complete = true;
    for (std::size_t i = 0; i < s.size() && complete; ++i)
      for (std::size_t j = i + 1; j < s.size() && complete; ++j) complete = g.adjacent(s[i], s[j]);
    if (!complete) continue;
    bool maximal = true;
    for (std::size_t v = 0; v < p && maximal; ++v) {
      if (mask >> v & 1u) continue;
      maximal = !std::all_of(s.begin(), s.end(), [&](Vertex u) { return g.adjacent(u, static_cast<Vertex>(v)); });
    }
    if (maximal) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// A graph is chordal iff simplicial vertices can be peeled until nothing is left.
bool chordal_by_peeling(const Graph& g) {
  std::vector<bool> alive(g.size(), true);
  for (std::size_t left = g.size(); left > 0; --left) {
    bool found = false;
    for (std::size_t v = 0; v < g.size() && !found; ++v) {
      if (!alive[v]) continue;
      std::vector<Vertex> nb;
      for (Vertex u : g.neighbors(static_cast<Vertex>(v)))
        if (alive[static_cast<std::size_t>(u)]) nb.push_back(u);
      bool simplicial = true;
      for (std::size_t i = 0; i < nb.size() && simplicial; ++i)
        for (std::size_t j = i + 1; j < nb.size() && simplicial; ++j) simplicial = g.adjacent(nb[i], nb[j]);
      if (simplicial) {
        alive[v] = false;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

// Depth-first enumeration of simple paths from v that avoid s.
bool reaches_avoiding(const Graph& g, Vertex v, const VertexSet& s, const VertexSet& targets) {
  std::vector<bool> on_path(g.size(), false);
  std::function<bool(Vertex)> walk = [&](Vertex u) {
    if (contains(targets, u)) return true;
    on_path[static_cast<std::size_t>(u)] = true;
    for (Vertex w : g.neighbors(u))
      if (!on_path[static_cast<std::size_t>(w)] && !contains(s, w) && walk(w)) return true;
    on_path[static_cast<std::size_t>(u)] = false;
    return false;
  };
  return walk(v);
}

Graph random_graph(std::size_t p, double density, Philox& rng) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 1; i <= p; ++i)
    for (std::size_t j = i + 1; j <= p; ++j)
      if (rng.uniform() < density) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return graph_from(p, e);
}

void expect_valid_decomposition(const Graph& g, const Decomposition& d) {
  ASSERT_EQ(d.cliques.size(), d.separators.size());
  EXPECT_TRUE(d.separators.front().empty());
  VertexSet seen = d.cliques.front();
  for (std::size_t i = 1; i < d.size(); ++i) {
    EXPECT_EQ(d.separators[i], set_intersection(d.cliques[i], seen));
    EXPECT_FALSE(d.separators[i].empty());
    bool inside_earlier = false;
    for (std::size_t l = 0; l < i; ++l) inside_earlier |= is_subset(d.separators[i], d.cliques[l]);
    EXPECT_TRUE(inside_earlier);
    seen = set_union(seen, d.cliques[i]);
  }
  EXPECT_EQ(seen, g.all_vertices());
}

}  // namespace

TEST(BuildGraph, TwoTriangles) {
  const Graph g = two_triangles();
  EXPECT_EQ(g.size(), 5u);
  EXPECT_EQ(g.edge_count(), 6u);
  EXPECT_TRUE(g.adjacent(g.index_of("3"), g.index_of("4")));
  EXPECT_FALSE(g.adjacent(g.index_of("1"), g.index_of("4")));
}

TEST(BuildGraph, SingleVertexAndSymmetricDuplicate) {
  EXPECT_EQ(build_graph({"1"}, {}).size(), 1u);
  const Graph g = build_graph({"1", "2"}, {{"1", "2"}, {"2", "1"}});
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(BuildGraph, Errors) {
  EXPECT_THROW(build_graph({"a", "a"}, {}), InputError);
  EXPECT_THROW(build_graph({"a", "b"}, {{"a", "c"}}), InputError);
  EXPECT_THROW(build_graph({"a", "b"}, {{"a", "a"}}), InputError);
}

TEST(BuildGraph, NaturalLabelOrder) {
  const Graph g = build_graph({"10", "b", "2", "a", "1"}, {});
  EXPECT_EQ(g.labels(), (std::vector<std::string>{"1", "2", "10", "a", "b"}));
}

TEST(Moralize, VStructure) {
  const Graph g = moralize({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}});
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_TRUE(g.adjacent(g.index_of("a"), g.index_of("b")));
}

TEST(Moralize, Chain) {
  const Graph g = moralize({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_FALSE(g.adjacent(g.index_of("a"), g.index_of("c")));
}

TEST(Moralize, ThreeParentCollider) {
  const Graph g = moralize({"a", "b", "c", "d"}, {{"a", "d"}, {"b", "d"}, {"c", "d"}});
  EXPECT_EQ(g.edge_count(), 6u);
  EXPECT_THROW(moralize({"a"}, {{"a", "z"}}), InputError);
}

TEST(Triangulate, FourCycleGetsOneChord) {
  const Triangulation t = min_fill_triangulation(cycle(4));
  EXPECT_EQ(t.added.size(), 1u);
  EXPECT_TRUE(is_decomposable(t.graph));
}

TEST(Triangulate, FiveCycleNeedsTwoChords) {
  const Graph c5 = cycle(5);
  // No single chord is enough.
  for (Vertex u = 0; u < 5; ++u)
    for (Vertex v = u + 1; v < 5; ++v)
      if (!c5.adjacent(u, v)) {
        EXPECT_FALSE(is_decomposable(c5.with_edges({{u, v}})));
      }
  const Triangulation t = min_fill_triangulation(c5);
  EXPECT_EQ(t.added.size(), 2u);
  EXPECT_TRUE(is_decomposable(t.graph));
}

TEST(Triangulate, DecomposableIsFixedPoint) {
  const Graph g = two_triangles();
  EXPECT_EQ(triangulate(g), g);
}

TEST(Triangulate, RandomGraphsBecomeChordalSupergraphs) {
  Philox rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_graph(8, 0.35, rng);
    const Graph t = triangulate(g);
    EXPECT_TRUE(chordal_by_peeling(t));
    for (const auto& [u, v] : g.edges()) EXPECT_TRUE(t.adjacent(u, v));
  }
}

TEST(Decomposable, Examples) {
  EXPECT_TRUE(is_decomposable(two_triangles()));
  EXPECT_FALSE(is_decomposable(cycle(4)));
  EXPECT_TRUE(is_decomposable(complete(5)));
  EXPECT_TRUE(is_decomposable(build_graph({"a", "b"}, {})));
}

TEST(Decomposable, AgreesWithPeeling) {
  Philox rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const Graph g = random_graph(7, 0.2 + 0.6 * rng.uniform(), rng);
    EXPECT_EQ(is_decomposable(g), chordal_by_peeling(g));
  }
}

TEST(MaximalCliques, Examples) {
  const Graph g = two_triangles();
  EXPECT_EQ(maximal_cliques(g), (std::vector<VertexSet>{vs(g, {1, 2, 3}), vs(g, {3, 4, 5})}));
  EXPECT_EQ(maximal_cliques(build_graph({"a", "b"}, {})), (std::vector<VertexSet>{{0}, {1}}));
  EXPECT_EQ(maximal_cliques(complete(4)).size(), 1u);
  EXPECT_THROW(maximal_cliques(cycle(4)), GraphError);
}

TEST(MaximalCliques, AgreeWithSubsetEnumeration) {
  Philox rng(11);
  int checked = 0;
  while (checked < 200) {
    const Graph g = triangulate(random_graph(9, 0.25, rng));
    EXPECT_EQ(maximal_cliques(g), brute_force_cliques(g));
    ++checked;
  }
}

TEST(Decompositions, TwoTriangles) {
  const Graph g = two_triangles();
  const auto d = all_decompositions(g);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].cliques, (std::vector<VertexSet>{vs(g, {1, 2, 3}), vs(g, {3, 4, 5})}));
  EXPECT_EQ(d[1].cliques, (std::vector<VertexSet>{vs(g, {3, 4, 5}), vs(g, {1, 2, 3})}));
  EXPECT_EQ(d[0].separators[1], vs(g, {3}));
  EXPECT_EQ(d[1].separators[1], vs(g, {3}));
  EXPECT_EQ(d[1].root_index, 1u);
}

TEST(Decompositions, SingleCliqueAndPath) {
  EXPECT_EQ(all_decompositions(complete(4)).size(), 1u);
  EXPECT_EQ(all_decompositions(complete(4))[0].separators.size(), 1u);
  // Three cliques in a row: {1,2,3} - {3,4} - {4,5,6}.
  const Graph g = graph_from(6, {{1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {5, 6}});
  const auto d = all_decompositions(g);
  ASSERT_EQ(d.size(), 3u);
  for (const auto& dec : d) {
    expect_valid_decomposition(g, dec);
    std::vector<VertexSet> seps(dec.separators.begin() + 1, dec.separators.end());
    std::sort(seps.begin(), seps.end());
    EXPECT_EQ(seps, (std::vector<VertexSet>{vs(g, {3}), vs(g, {4})}));
  }
  EXPECT_THROW(all_decompositions(build_graph({"a", "b"}, {})), GraphError);
}

TEST(Decompositions, RunningIntersectionOnGeneratedGraphs) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Graph g = random_decomposable_graph({12, 5, 4, seed});
    const auto cliques = maximal_cliques(g);
    const auto decomps = all_decompositions(g);
    ASSERT_EQ(decomps.size(), cliques.size());
    std::vector<VertexSet> first_seps;
    for (std::size_t i = 0; i < decomps.size(); ++i) {
      const auto& d = decomps[i];
      expect_valid_decomposition(g, d);
      EXPECT_EQ(d.cliques.front(), cliques[i]);
      auto sorted = d.cliques;
      std::sort(sorted.begin(), sorted.end());
      EXPECT_EQ(sorted, cliques);
      std::vector<VertexSet> seps(d.separators.begin() + 1, d.separators.end());
      std::sort(seps.begin(), seps.end());
      if (i == 0) first_seps = seps;
      EXPECT_EQ(seps, first_seps);
    }
  }
}

TEST(Separators, Examples) {
  const Graph g = two_triangles();
  EXPECT_EQ(separator_collection(g), (std::vector<VertexSet>{vs(g, {3})}));
  EXPECT_TRUE(separator_collection(complete(3)).empty());
  const Graph face = graph_from(4, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}});
  EXPECT_EQ(separator_collection(face), (std::vector<VertexSet>{vs(face, {2, 3})}));
}

TEST(Separates, Examples) {
  const Graph g = two_triangles();
  EXPECT_TRUE(separates(g, vs(g, {3}), g.index_of("4"), vs(g, {1, 3})));
  EXPECT_FALSE(separates(g, vs(g, {3}), g.index_of("2"), vs(g, {1, 3})));
  EXPECT_FALSE(separates(g, {}, g.index_of("1"), vs(g, {1})));
  EXPECT_THROW(separates(g, vs(g, {3}), g.index_of("3"), vs(g, {1})), InputError);
}

TEST(Separates, AgreesWithPathEnumeration) {
  Philox rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const Graph g = random_graph(7, 0.3, rng);
    VertexSet s, d;
    for (Vertex v = 0; v < 7; ++v) {
      const double u = rng.uniform();
      if (u < 0.25) s.push_back(v);
      else if (u < 0.5) d.push_back(v);
    }
    for (Vertex v = 0; v < 7; ++v) {
      if (contains(s, v)) continue;
      EXPECT_EQ(separates(g, s, v, d), !reaches_avoiding(g, v, s, set_difference(d, s)));
    }
  }
}

TEST(Oracle, TwoTriangles) {
  const Graph g = two_triangles();
  EXPECT_EQ(oracle_graphical_seed_set(g, vs(g, {3})), vs(g, {3}));
  EXPECT_EQ(oracle_graphical_seed_set(g, vs(g, {1, 3})), vs(g, {1, 2, 3}));
  EXPECT_EQ(oracle_graphical_seed_set(g, vs(g, {1, 4})), vs(g, {1, 2, 3, 4, 5}));
  EXPECT_TRUE(oracle_graphical_seed_set(g, {}).empty());
}

TEST(Oracle, ContainsSeedSetAndIsMonotone) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Graph g = random_decomposable_graph({7, 3, 4, seed});
    std::map<unsigned, VertexSet> by_mask;
    for (unsigned mask = 0; mask < (1u << g.size()); ++mask) {
      VertexSet d;
      for (std::size_t v = 0; v < g.size(); ++v)
        if (mask >> v & 1u) d.push_back(static_cast<Vertex>(v));
      const VertexSet dg = oracle_graphical_seed_set(g, d);
      EXPECT_TRUE(is_subset(d, dg));
      by_mask[mask] = dg;
      for (std::size_t v = 0; v < g.size(); ++v)
        if (mask >> v & 1u) EXPECT_TRUE(is_subset(by_mask[mask & ~(1u << v)], dg));
    }
  }
}

TEST(Components, Examples) {
  EXPECT_EQ(connected_components(two_triangles()).size(), 1u);
  const Graph two = graph_from(4, {{1, 2}, {3, 4}});
  const auto parts = connected_components(two);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].size(), 2u);
  EXPECT_EQ(parts[1].labels(), (std::vector<std::string>{"3", "4"}));
  const Graph plus = graph_from(6, {{1, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 5}});
  EXPECT_EQ(connected_components(plus).size(), 2u);
}

TEST(JunctionTree, IsMaximumWeightSpanningTree) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Graph g = random_decomposable_graph({14, 6, 4, seed});
    const JunctionTree t = junction_tree(g);
    ASSERT_EQ(t.edges.size(), t.cliques.size() - 1);
    std::size_t weight = 0, sep_weight = 0;
    for (const auto& [a, b] : t.edges) weight += set_intersection(t.cliques[a], t.cliques[b]).size();
    const auto decomps = all_decompositions(g);
    for (const auto& s : decomps.front().separators) sep_weight += s.size();
    EXPECT_EQ(weight, sep_weight);
  }
}

TEST(Generator, HitsRequestedShape) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Graph g = random_decomposable_graph({15, 6, 4, seed});
    EXPECT_EQ(g.size(), 15u);
    EXPECT_TRUE(is_decomposable(g));
    EXPECT_TRUE(is_connected(g));
    const auto cliques = maximal_cliques(g);
    EXPECT_EQ(cliques.size(), 6u);
    for (const auto& c : cliques) EXPECT_LE(c.size(), 4u);
  }
  EXPECT_EQ(random_decomposable_graph({15, 6, 4, 3}), random_decomposable_graph({15, 6, 4, 3}));
  EXPECT_THROW(random_decomposable_graph({3, 6, 4, 1}), InputError);
}

TEST(GraphIo, EdgeListRoundTrip) {
  const Graph g = parse_edge_list("# comment\n@vertices 1 2 3 4 5 6\n1 2\n1 3 # trailing\n2 3\n3 4\n3 5\n4 5\n");
  EXPECT_EQ(g.size(), 6u);
  EXPECT_EQ(parse_edge_list(to_edge_list(g)), g);
  EXPECT_EQ(parse_graph(to_graph_json(g)), g);
}

TEST(GraphIo, ErrorsCarryLineNumbers) {
  try {
    parse_edge_list("1 2\n2 3\n3\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    parse_edge_list("1 2\n2 2\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(GraphIo, DirectedJsonIsMoralized) {
  const Graph g = parse_graph(R"({"vertices": ["a","b","c"], "edges": [["a","c"],["b","c"]], "directed": true})");
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_THROW(parse_graph(R"({"vertices": ["a"], "edges": [["a","q"]]})"), InputError);
}
