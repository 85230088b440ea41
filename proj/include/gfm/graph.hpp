#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gfm {

/// Bijection on {0..n-1}.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> mapping);

  static Permutation identity(int n);

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int i) const { return map_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& mapping() const { return map_; }
  Permutation inverse() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> map_;
};

/// Simple undirected graph on dense vertex ids 0..n-1.
/// No self-loops, no duplicate edges. Immutable after construction;
/// all operations on it are pure functions, safe to share across threads.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from (u, v) pairs; duplicates and reversed copies
  /// collapse to one edge. Throws on out-of-range ids or u == v.
  static Graph from_edge_list(int n, const std::vector<std::pair<int, int>>& pairs);

  static Graph complete(int n);
  static Graph cycle(int n);
  static Graph path(int n);

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Sorted list of edges, each stored with u < v.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Ascending neighbor list of v.
  const std::vector<int>& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }

  int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }
  bool has_edge(int u, int v) const;

  bool operator==(const Graph&) const = default;

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

Graph permute(const Graph& g, const Permutation& pi);

/// Induced subgraph on the largest component, vertices relabeled 0..k-1
/// preserving their relative order. Ties between equal-sized components go
/// to the one whose smallest original vertex id is smallest.
Graph largest_connected_component(const Graph& g);

/// Vertices of the largest component, ascending (the set kept by
/// largest_connected_component). Useful when per-vertex data rides along.
std::vector<int> largest_connected_component_vertices(const Graph& g);

/// Induced subgraph on `keep` (ascending vertex ids), relabeled in order.
Graph induced_subgraph(const Graph& g, const std::vector<int>& keep);

struct EdgeDensity {
  double value = 0.0;
  bool defined = true;  // false when n < 2 (value defaults to zero)
};
EdgeDensity edge_density(const Graph& g);

bool is_connected(const Graph& g);
int component_count(const Graph& g);
bool is_acyclic(const Graph& g);
long long triangle_count(const Graph& g);

/// Triangles through each vertex.
std::vector<long long> per_vertex_triangles(const Graph& g);

/// Canonical byte string: equal iff graphs are isomorphic. Exhaustive
/// search over vertex orderings (with twin and prefix pruning), so only
/// small graphs are supported; throws above `max_vertices`.
std::string canonical_form(const Graph& g, int max_vertices = 12);

/// Label-aware variant: vertex labels and per-edge labels (aligned with
/// g.edges() order) participate in the encoding. Empty label vectors are
/// treated as all-zero.
std::string canonical_form_labeled(const Graph& g,
                                   const std::vector<int>& vertex_labels,
                                   const std::vector<int>& edge_labels,
                                   int max_vertices = 12);

}  // namespace gfm
