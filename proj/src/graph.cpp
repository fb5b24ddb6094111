#include "seedset/graph.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <queue>
#include <set>

#include "seedset/error.hpp"

namespace seedset {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::string_view strip_zeros(std::string_view s) {
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  return s;
}

}  // namespace

bool label_less(std::string_view a, std::string_view b) {
  const bool na = all_digits(a);
  const bool nb = all_digits(b);
  if (na != nb) return na;
  if (na) {
    const auto sa = strip_zeros(a);
    const auto sb = strip_zeros(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

// ---------------------------------------------------------------------------
// Graph

std::optional<Vertex> Graph::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vertex Graph::index_of(std::string_view label) const {
  auto v = find(label);
  if (!v) throw InputError("unknown vertex '" + std::string(label) + "'");
  return *v;
}

bool Graph::adjacent(Vertex u, Vertex v) const {
  const auto& nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t u = 0; u < adjacency_.size(); ++u)
    for (Vertex v : adjacency_[u])
      if (static_cast<Vertex>(u) < v) out.emplace_back(static_cast<Vertex>(u), v);
  return out;
}

VertexSet Graph::all_vertices() const {
  VertexSet all(size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

Graph Graph::induced(const VertexSet& keep) const {
  std::vector<std::string> labels;
  labels.reserve(keep.size());
  for (Vertex v : keep) labels.push_back(label(v));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (Vertex u : keep)
    for (Vertex v : neighbors(u))
      if (u < v && contains(keep, v)) pairs.emplace_back(label(u), label(v));
  return build_graph(std::move(labels), pairs);
}

Graph Graph::with_edges(const std::vector<Edge>& extra) const {
  Graph g = *this;
  for (auto [u, v] : extra) {
    if (u == v) throw InputError("self-loop on vertex '" + label(u) + "'");
    auto& nu = g.adjacency_[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(nu.begin(), nu.end(), v);
    if (it != nu.end() && *it == v) continue;
    nu.insert(it, v);
    auto& nv = g.adjacency_[static_cast<std::size_t>(v)];
    nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
    ++g.edge_count_;
  }
  return g;
}

Graph build_graph(std::vector<std::string> vertex_labels,
                  const std::vector<std::pair<std::string, std::string>>& edge_pairs) {
  std::sort(vertex_labels.begin(), vertex_labels.end(),
            [](const std::string& a, const std::string& b) { return label_less(a, b); });
  for (std::size_t i = 0; i < vertex_labels.size(); ++i) {
    if (vertex_labels[i].empty()) throw InputError("empty vertex label");
    if (i > 0 && vertex_labels[i] == vertex_labels[i - 1])
      throw InputError("duplicate vertex label '" + vertex_labels[i] + "'");
  }

  Graph g;
  g.labels_ = std::move(vertex_labels);
  g.adjacency_.assign(g.labels_.size(), {});
  for (std::size_t i = 0; i < g.labels_.size(); ++i)
    g.index_.emplace(g.labels_[i], static_cast<Vertex>(i));

  std::set<Edge> unique;
  for (const auto& [a, b] : edge_pairs) {
    auto u = g.find(a);
    auto v = g.find(b);
    if (!u) throw InputError("edge endpoint '" + a + "' is not a declared vertex");
    if (!v) throw InputError("edge endpoint '" + b + "' is not a declared vertex");
    if (*u == *v) throw InputError("self-loop on vertex '" + a + "'");
    unique.emplace(std::min(*u, *v), std::max(*u, *v));
  }
  for (auto [u, v] : unique) {
    g.adjacency_[static_cast<std::size_t>(u)].push_back(v);
    g.adjacency_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());
  g.edge_count_ = unique.size();
  return g;
}

Graph moralize(std::vector<std::string> vertex_labels,
               const std::vector<std::pair<std::string, std::string>>& directed_edges) {
  // Validate endpoints and collect parents per child on the undirected skeleton.
  Graph skeleton = build_graph(vertex_labels, directed_edges);
  std::vector<VertexSet> parents(skeleton.size());
  for (const auto& [from, to] : directed_edges)
    parents[static_cast<std::size_t>(skeleton.index_of(to))].push_back(skeleton.index_of(from));

  std::vector<Edge> marry;
  for (auto& ps : parents) {
    ps = normalized(std::move(ps));
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) marry.emplace_back(ps[i], ps[j]);
  }
  return skeleton.with_edges(marry);
}

// ---------------------------------------------------------------------------
// Triangulation and decomposability

Triangulation min_fill_triangulation(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<std::set<Vertex>> adj(n);
  for (std::size_t v = 0; v < n; ++v)
    adj[v].insert(g.neighbors(static_cast<Vertex>(v)).begin(),
                  g.neighbors(static_cast<Vertex>(v)).end());

  std::vector<bool> eliminated(n, false);
  Triangulation out;

  auto fill_of = [&](std::size_t v) {
    std::size_t missing = 0;
    for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
      for (auto b = std::next(a); b != adj[v].end(); ++b)
        if (!adj[static_cast<std::size_t>(*a)].count(*b)) ++missing;
    return missing;
  };

  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    std::size_t best_fill = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (eliminated[v]) continue;
      const std::size_t f = fill_of(v);
      if (best == n || f < best_fill) {
        best = v;
        best_fill = f;
        if (f == 0) break;
      }
    }
    const std::vector<Vertex> nb(adj[best].begin(), adj[best].end());
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        auto a = static_cast<std::size_t>(nb[i]);
        if (adj[a].insert(nb[j]).second) {
          adj[static_cast<std::size_t>(nb[j])].insert(nb[i]);
          out.added.emplace_back(nb[i], nb[j]);
        }
      }
    for (Vertex u : nb) adj[static_cast<std::size_t>(u)].erase(static_cast<Vertex>(best));
    adj[best].clear();
    eliminated[best] = true;
  }
  out.graph = g.with_edges(out.added);
  return out;
}

Graph triangulate(const Graph& g) { return min_fill_triangulation(g).graph; }

namespace {

struct McsResult {
  std::vector<Vertex> order;
  std::vector<std::size_t> weight_at_visit;
  std::vector<std::size_t> position;
};

McsResult run_mcs(const Graph& g) {
  const std::size_t n = g.size();
  McsResult r;
  r.order.reserve(n);
  r.weight_at_visit.reserve(n);
  r.position.assign(n, n);
  std::vector<std::size_t> weight(n, 0);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v)
      if (r.position[v] == n && (best == n || weight[v] > weight[best])) best = v;
    r.position[best] = step;
    r.order.push_back(static_cast<Vertex>(best));
    r.weight_at_visit.push_back(weight[best]);
    for (Vertex u : g.neighbors(static_cast<Vertex>(best)))
      if (r.position[static_cast<std::size_t>(u)] == n) ++weight[static_cast<std::size_t>(u)];
  }
  return r;
}

// Neighbors of v visited before v, sorted.
VertexSet earlier_neighbors(const Graph& g, const McsResult& r, Vertex v) {
  VertexSet out;
  for (Vertex u : g.neighbors(v))
    if (r.position[static_cast<std::size_t>(u)] < r.position[static_cast<std::size_t>(v)])
      out.push_back(u);
  return out;
}

bool chordal_from_mcs(const Graph& g, const McsResult& r) {
  // Zero fill-in test: the earlier neighbors of v, minus the latest one (u),
  // must all be earlier neighbors of u.
  for (Vertex v : r.order) {
    VertexSet before = earlier_neighbors(g, r, v);
    if (before.size() < 2) continue;
    Vertex latest = *std::max_element(before.begin(), before.end(), [&](Vertex a, Vertex b) {
      return r.position[static_cast<std::size_t>(a)] < r.position[static_cast<std::size_t>(b)];
    });
    for (Vertex w : before)
      if (w != latest && !g.adjacent(w, latest)) return false;
  }
  return true;
}

void require_decomposable_connected(const Graph& g) {
  if (g.size() == 0) throw GraphError("graph has no vertices");
  if (!is_decomposable(g)) throw GraphError("graph is not decomposable");
  if (!is_connected(g))
    throw GraphError("graph is disconnected; analyze each connected component separately");
}

}  // namespace

std::vector<Vertex> mcs_order(const Graph& g) { return run_mcs(g).order; }

bool is_decomposable(const Graph& g) { return chordal_from_mcs(g, run_mcs(g)); }

bool is_connected(const Graph& g) { return component_vertex_sets(g).size() <= 1; }

std::vector<VertexSet> maximal_cliques(const Graph& g) {
  const McsResult r = run_mcs(g);
  if (!chordal_from_mcs(g, r)) throw GraphError("graph is not decomposable");
  // With an MCS order on a chordal graph, the clique {v_i} + earlier
  // neighbors is maximal exactly when the next vertex does not extend it.
  std::vector<VertexSet> cliques;
  const std::size_t n = r.order.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && r.weight_at_visit[i + 1] > r.weight_at_visit[i]) continue;
    VertexSet c = earlier_neighbors(g, r, r.order[i]);
    c.insert(std::lower_bound(c.begin(), c.end(), r.order[i]), r.order[i]);
    cliques.push_back(std::move(c));
  }
  std::sort(cliques.begin(), cliques.end());
  return cliques;
}

JunctionTree junction_tree(const Graph& g) {
  require_decomposable_connected(g);
  JunctionTree tree;
  tree.cliques = maximal_cliques(g);
  const std::size_t k = tree.cliques.size();

  struct Candidate {
    std::size_t weight, a, b;
  };
  std::vector<Candidate> candidates;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      const std::size_t w = set_intersection(tree.cliques[a], tree.cliques[b]).size();
      if (w > 0) candidates.push_back({w, a, b});
    }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) { return x.weight > y.weight; });

  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : candidates) {
    const std::size_t ra = root(c.a), rb = root(c.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    tree.edges.emplace_back(c.a, c.b);
  }
  std::sort(tree.edges.begin(), tree.edges.end());
  return tree;
}

std::vector<Decomposition> all_decompositions(const JunctionTree& tree) {
  const std::size_t k = tree.cliques.size();
  std::vector<std::vector<std::size_t>> nb(k);
  for (auto [a, b] : tree.edges) {
    nb[a].push_back(b);
    nb[b].push_back(a);
  }
  for (auto& list : nb) std::sort(list.begin(), list.end());

  std::vector<Decomposition> out;
  out.reserve(k);
  for (std::size_t rootc = 0; rootc < k; ++rootc) {
    Decomposition d;
    d.root_index = rootc;
    std::vector<std::size_t> via(k, k);
    std::vector<bool> seen(k, false);
    std::queue<std::size_t> frontier;
    frontier.push(rootc);
    seen[rootc] = true;
    while (!frontier.empty()) {
      const std::size_t c = frontier.front();
      frontier.pop();
      d.clique_ids.push_back(c);
      d.cliques.push_back(tree.cliques[c]);
      d.separators.push_back(via[c] == k ? VertexSet{}
                                         : set_intersection(tree.cliques[c], tree.cliques[via[c]]));
      for (std::size_t next : nb[c])
        if (!seen[next]) {
          seen[next] = true;
          via[next] = c;
          frontier.push(next);
        }
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Decomposition> all_decompositions(const Graph& g) {
  return all_decompositions(junction_tree(g));
}

std::vector<VertexSet> separator_collection(const Graph& g) {
  const JunctionTree tree = junction_tree(g);
  std::vector<VertexSet> seps;
  for (auto [a, b] : tree.edges) seps.push_back(set_intersection(tree.cliques[a], tree.cliques[b]));
  std::sort(seps.begin(), seps.end());
  seps.erase(std::unique(seps.begin(), seps.end()), seps.end());
  return seps;
}

// ---------------------------------------------------------------------------
// Separation and the graphical seed set

bool separates(const Graph& g, const VertexSet& s, Vertex v, const VertexSet& d) {
  if (contains(s, v))
    throw InputError("vertex '" + g.label(v) + "' lies in the separating set");
  const VertexSet targets = set_difference(d, s);
  if (targets.empty()) return true;
  std::vector<bool> visited(g.size(), false);
  for (Vertex x : s) visited[static_cast<std::size_t>(x)] = true;
  std::vector<Vertex> stack{v};
  visited[static_cast<std::size_t>(v)] = true;
  while (!stack.empty()) {
    const Vertex x = stack.back();
    stack.pop_back();
    if (contains(targets, x)) return false;
    for (Vertex y : g.neighbors(x))
      if (!visited[static_cast<std::size_t>(y)]) {
        visited[static_cast<std::size_t>(y)] = true;
        stack.push_back(y);
      }
  }
  return true;
}

VertexSet oracle_graphical_seed_set(const Graph& g, const VertexSet& d) {
  require_decomposable_connected(g);
  for (Vertex x : d)
    if (x < 0 || static_cast<std::size_t>(x) >= g.size())
      throw InputError("seed set vertex out of range");
  // The empty set is S_1 of every decomposition; it separates nothing in a
  // connected graph unless d is empty.
  std::vector<VertexSet> seps = separator_collection(g);
  seps.insert(seps.begin(), VertexSet{});

  VertexSet out;
  for (Vertex v = 0; v < static_cast<Vertex>(g.size()); ++v) {
    const bool separated = std::any_of(seps.begin(), seps.end(), [&](const VertexSet& s) {
      return !contains(s, v) && separates(g, s, v, d);
    });
    if (!separated) out.push_back(v);
  }
  return out;
}

std::vector<VertexSet> component_vertex_sets(const Graph& g) {
  std::vector<VertexSet> out;
  std::vector<bool> seen(g.size(), false);
  for (Vertex start = 0; start < static_cast<Vertex>(g.size()); ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    VertexSet comp;
    std::vector<Vertex> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (Vertex y : g.neighbors(x))
        if (!seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = true;
          stack.push_back(y);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<Graph> connected_components(const Graph& g) {
  std::vector<Graph> out;
  for (const auto& comp : component_vertex_sets(g)) out.push_back(g.induced(comp));
  return out;
}

// ---------------------------------------------------------------------------
// Set helpers

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool contains(const VertexSet& a, Vertex v) { return std::binary_search(a.begin(), a.end(), v); }

VertexSet normalized(VertexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::string format_set(const Graph& g, const VertexSet& s, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += sep;
    out += g.label(s[i]);
  }
  return out;
}

VertexSet vertex_set(const Graph& g, const std::vector<std::string>& labels) {
  VertexSet out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(g.index_of(l));
  return normalized(std::move(out));
}

}  // namespace seedset
