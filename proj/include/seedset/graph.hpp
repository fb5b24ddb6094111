#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace seedset {

/// Vertices are dense indices into a Graph. A graph numbers its vertices in
/// natural label order, so a sorted index vector is also label-sorted.
using Vertex = int;

/// Sorted, duplicate-free list of vertices.
using VertexSet = std::vector<Vertex>;

using Edge = std::pair<Vertex, Vertex>;

/// Natural ordering on labels: all-digit labels compare numerically and come
/// before any other label; the rest compare as plain strings.
bool label_less(std::string_view a, std::string_view b);

/// Immutable undirected simple graph over string labels.
class Graph {
 public:
  Graph() = default;

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(Vertex v) const { return labels_.at(static_cast<std::size_t>(v)); }
  std::optional<Vertex> find(std::string_view label) const;
  /// Throws InputError for an unknown label.
  Vertex index_of(std::string_view label) const;

  const std::vector<Vertex>& neighbors(Vertex v) const {
    return adjacency_[static_cast<std::size_t>(v)];
  }
  bool adjacent(Vertex u, Vertex v) const;

  /// Edges as (u, v) with u < v, sorted.
  std::vector<Edge> edges() const;

  VertexSet all_vertices() const;
  /// Subgraph induced by `keep`; labels are preserved.
  Graph induced(const VertexSet& keep) const;
  /// Copy with extra edges (existing ones are ignored).
  Graph with_edges(const std::vector<Edge>& extra) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.labels_ == b.labels_ && a.adjacency_ == b.adjacency_;
  }

  friend Graph build_graph(std::vector<std::string> vertex_labels,
                           const std::vector<std::pair<std::string, std::string>>& edge_pairs);

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<Vertex>> adjacency_;
  std::unordered_map<std::string, Vertex> index_;
  std::size_t edge_count_ = 0;
};

/// Validates labels and endpoints, rejects self-loops, deduplicates edges.
Graph build_graph(std::vector<std::string> vertex_labels,
                  const std::vector<std::pair<std::string, std::string>>& edge_pairs);

/// Joins the parents of every common child and drops directions.
Graph moralize(std::vector<std::string> vertex_labels,
               const std::vector<std::pair<std::string, std::string>>& directed_edges);

struct Triangulation {
  Graph graph;
  std::vector<Edge> added;  // fill edges, (u < v), in insertion order
};

/// Min-fill elimination, ties broken by smallest vertex index.
Triangulation min_fill_triangulation(const Graph& g);
Graph triangulate(const Graph& g);

/// Maximum cardinality search order (first visited first); ties go to the
/// smallest vertex index.
std::vector<Vertex> mcs_order(const Graph& g);
bool is_decomposable(const Graph& g);
bool is_connected(const Graph& g);

/// Maximal cliques of a decomposable graph in lexicographic order.
/// Throws GraphError if g is not decomposable.
std::vector<VertexSet> maximal_cliques(const Graph& g);

/// Clique tree: cliques in canonical order plus tree edges (a < b).
struct JunctionTree {
  std::vector<VertexSet> cliques;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Maximum-weight spanning tree of the clique intersection graph.
/// Requires a decomposable, connected graph.
JunctionTree junction_tree(const Graph& g);

/// A running-intersection ordering of the cliques. separators[0] is empty.
struct Decomposition {
  std::vector<VertexSet> cliques;
  std::vector<VertexSet> separators;
  std::vector<std::size_t> clique_ids;  // position -> canonical clique index
  std::size_t root_index = 0;

  std::size_t size() const noexcept { return cliques.size(); }
};

/// One decomposition per root clique, in canonical clique order.
std::vector<Decomposition> all_decompositions(const Graph& g);
std::vector<Decomposition> all_decompositions(const JunctionTree& tree);

/// Deduplicated separators S_2..S_k, sorted lexicographically.
std::vector<VertexSet> separator_collection(const Graph& g);

/// True iff every path from v to d \ s meets s. Throws InputError if v is in s.
bool separates(const Graph& g, const VertexSet& s, Vertex v, const VertexSet& d);

/// Graph-identifiable superset of the seed set d.
VertexSet oracle_graphical_seed_set(const Graph& g, const VertexSet& d);

/// Connected components as induced subgraphs, ordered by smallest member.
std::vector<Graph> connected_components(const Graph& g);
std::vector<VertexSet> component_vertex_sets(const Graph& g);

// Set helpers over sorted vectors.
VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_intersection(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);
bool is_subset(const VertexSet& a, const VertexSet& b);
bool contains(const VertexSet& a, Vertex v);
VertexSet normalized(VertexSet s);

/// Labels of s joined by `sep`, e.g. "1,2,3".
std::string format_set(const Graph& g, const VertexSet& s, std::string_view sep = ",");
/// Resolves labels to a sorted vertex set; throws InputError on unknown labels.
VertexSet vertex_set(const Graph& g, const std::vector<std::string>& labels);

}  // namespace seedset
