#include "gfm/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gfm {

Permutation::Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
  const int n = static_cast<int>(map_.size());
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : map_) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("Permutation: mapping is not a bijection on {0..n-1}");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map_.size());
  for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(map_[static_cast<std::size_t>(i)])] = i;
  return Permutation(std::move(inv));
}

Graph Graph::from_edge_list(int n, const std::vector<std::pair<int, int>>& pairs) {
  if (n < 0) throw std::invalid_argument("Graph: negative vertex count");
  std::set<std::pair<int, int>> dedup;
  for (auto [u, v] : pairs) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::out_of_range("Graph: edge endpoint out of range");
    if (u == v) throw std::invalid_argument("Graph: self-loops are not allowed");
    dedup.insert({std::min(u, v), std::max(u, v)});
  }
  Graph g;
  g.n_ = n;
  g.edges_.assign(dedup.begin(), dedup.end());
  g.adj_.assign(static_cast<std::size_t>(n), {});
  for (auto [u, v] : g.edges_) {
    g.adj_[static_cast<std::size_t>(u)].push_back(v);
    g.adj_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : g.adj_) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

Graph Graph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return from_edge_list(n, e);
}

Graph Graph::cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle: need at least 3 vertices");
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u) e.emplace_back(u, (u + 1) % n);
  return from_edge_list(n, e);
}

Graph Graph::path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
  return from_edge_list(n, e);
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_ || u == v) return false;
  const auto& nbrs = adj_[static_cast<std::size_t>(u)];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

Graph permute(const Graph& g, const Permutation& pi) {
  if (pi.size() != g.vertex_count())
    throw std::invalid_argument("permute: permutation size does not match graph");
  std::vector<std::pair<int, int>> e;
  e.reserve(g.edges().size());
  for (auto [u, v] : g.edges()) e.emplace_back(pi(u), pi(v));
  return Graph::from_edge_list(g.vertex_count(), e);
}

namespace {

// Component ids in BFS-discovery order from ascending start vertices, so
// component k's smallest vertex id increases with k.
std::vector<int> component_ids(const Graph& g, int& count) {
  const int n = g.vertex_count();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  count = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] != -1) continue;
    std::deque<int> queue{s};
    comp[static_cast<std::size_t>(s)] = count;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : g.neighbors(u)) {
        if (comp[static_cast<std::size_t>(v)] == -1) {
          comp[static_cast<std::size_t>(v)] = count;
          queue.push_back(v);
        }
      }
    }
    ++count;
  }
  return comp;
}

}  // namespace

std::vector<int> largest_connected_component_vertices(const Graph& g) {
  int count = 0;
  auto comp = component_ids(g, count);
  if (count == 0) return {};
  std::vector<int> sizes(static_cast<std::size_t>(count), 0);
  for (int c : comp) ++sizes[static_cast<std::size_t>(c)];
  // Discovery order already breaks ties by smallest original vertex id.
  int best = 0;
  for (int c = 1; c < count; ++c)
    if (sizes[static_cast<std::size_t>(c)] > sizes[static_cast<std::size_t>(best)]) best = c;
  std::vector<int> keep;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (comp[static_cast<std::size_t>(v)] == best) keep.push_back(v);
  return keep;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
  std::vector<int> relabel(static_cast<std::size_t>(g.vertex_count()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) relabel[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
  std::vector<std::pair<int, int>> e;
  for (auto [u, v] : g.edges()) {
    int a = relabel[static_cast<std::size_t>(u)];
    int b = relabel[static_cast<std::size_t>(v)];
    if (a != -1 && b != -1) e.emplace_back(a, b);
  }
  return Graph::from_edge_list(static_cast<int>(keep.size()), e);
}

Graph largest_connected_component(const Graph& g) {
  return induced_subgraph(g, largest_connected_component_vertices(g));
}

EdgeDensity edge_density(const Graph& g) {
  const int n = g.vertex_count();
  if (n < 2) return {0.0, false};
  double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return {static_cast<double>(g.edge_count()) / pairs, true};
}

int component_count(const Graph& g) {
  int count = 0;
  component_ids(g, count);
  return count;
}

bool is_connected(const Graph& g) { return component_count(g) <= 1; }

bool is_acyclic(const Graph& g) {
  return g.edge_count() == g.vertex_count() - component_count(g);
}

std::vector<long long> per_vertex_triangles(const Graph& g) {
  const int n = g.vertex_count();
  std::vector<long long> tri(static_cast<std::size_t>(n), 0);
  for (int u = 0; u < n; ++u) {
    const auto& nbrs = g.neighbors(u);
    for (std::size_t a = 0; a < nbrs.size(); ++a)
      for (std::size_t b = a + 1; b < nbrs.size(); ++b)
        if (g.has_edge(nbrs[a], nbrs[b])) ++tri[static_cast<std::size_t>(u)];
  }
  return tri;
}

long long triangle_count(const Graph& g) {
  auto tri = per_vertex_triangles(g);
  long long total = 0;
  for (long long t : tri) total += t;
  return total / 3;
}

namespace {

// Canonical labeling by exhaustive search for the lexicographically
// smallest encoding. The encoding places vertices one at a time; the
// chunk for position d is [vertex label, edge codes to positions 0..d-1]
// where an edge code is 0 for a non-edge and label+1 otherwise.
//
// Pruning: chunks are compared against the best full encoding found so
// far, and unplaced twins (vertices interchangeable by a transposition
// automorphism respecting labels) collapse to one candidate, which keeps
// highly symmetric graphs from exploding.
struct CanonicalSearch {
  int n;
  const std::vector<int>& vlabel;
  std::vector<std::vector<int>> ecode;  // n x n, 0 = non-edge
  std::vector<int> placed;              // original id by position
  std::vector<char> used;
  std::vector<std::vector<std::uint8_t>> best;  // chunk per position
  bool have_best = false;

  CanonicalSearch(const Graph& g, const std::vector<int>& vl, const std::vector<int>& el)
      : n(g.vertex_count()), vlabel(vl) {
    ecode.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    const auto& edges = g.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      int code = 1 + (el.empty() ? 0 : el[i]);
      ecode[static_cast<std::size_t>(edges[i].first)][static_cast<std::size_t>(edges[i].second)] = code;
      ecode[static_cast<std::size_t>(edges[i].second)][static_cast<std::size_t>(edges[i].first)] = code;
    }
    used.assign(static_cast<std::size_t>(n), 0);
    placed.reserve(static_cast<std::size_t>(n));
  }

  std::vector<std::uint8_t> chunk_for(int v) const {
    std::vector<std::uint8_t> c;
    c.reserve(placed.size() + 1);
    c.push_back(static_cast<std::uint8_t>(vlabel[static_cast<std::size_t>(v)]));
    for (int p : placed) c.push_back(static_cast<std::uint8_t>(ecode[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)]));
    return c;
  }

  bool twins(int u, int v) const {
    if (vlabel[static_cast<std::size_t>(u)] != vlabel[static_cast<std::size_t>(v)]) return false;
    for (int w = 0; w < n; ++w) {
      if (w == u || w == v) continue;
      if (ecode[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] !=
          ecode[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)])
        return false;
    }
    return true;
  }

  // cur holds the chunks for positions 0..depth-1. `tight` means cur equals
  // the best prefix so far; only then can a worse chunk be pruned.
  void search(std::vector<std::vector<std::uint8_t>>& cur, bool tight) {
    const int depth = static_cast<int>(cur.size());
    if (depth == n) {
      if (!have_best || !tight) {
        best = cur;
        have_best = true;
      }
      return;
    }
    struct Cand {
      std::vector<std::uint8_t> chunk;
      int v;
    };
    std::vector<Cand> cands;
    for (int v = 0; v < n; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      bool dup = false;
      for (const auto& c : cands)
        if (twins(c.v, v)) {
          dup = true;
          break;
        }
      if (dup) continue;
      cands.push_back({chunk_for(v), v});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.chunk != b.chunk) return a.chunk < b.chunk;
      return a.v < b.v;
    });
    for (const auto& c : cands) {
      bool child_tight = tight;
      if (have_best && tight) {
        if (c.chunk > best[static_cast<std::size_t>(depth)]) continue;  // definitely worse
        if (c.chunk < best[static_cast<std::size_t>(depth)]) child_tight = false;
      } else if (have_best && !tight) {
        child_tight = false;
      }
      used[static_cast<std::size_t>(c.v)] = 1;
      placed.push_back(c.v);
      cur.push_back(c.chunk);
      search(cur, child_tight);
      cur.pop_back();
      placed.pop_back();
      used[static_cast<std::size_t>(c.v)] = 0;
      // After a strict improvement, best has been replaced by a full
      // encoding extending c.chunk; later siblings compare against it.
      if (have_best && !tight) tight = true;
    }
  }
};

std::string canonical_impl(const Graph& g, const std::vector<int>& vl, const std::vector<int>& el,
                           int max_vertices) {
  const int n = g.vertex_count();
  if (n > max_vertices)
    throw std::invalid_argument("canonical_form: graph exceeds supported size " +
                                std::to_string(max_vertices));
  for (int l : vl)
    if (l < 0 || l > 254) throw std::invalid_argument("canonical_form: vertex label out of range");
  for (int l : el)
    if (l < 0 || l > 253) throw std::invalid_argument("canonical_form: edge label out of range");
  if (!vl.empty() && static_cast<int>(vl.size()) != n)
    throw std::invalid_argument("canonical_form: vertex label count mismatch");
  if (!el.empty() && el.size() != g.edges().size())
    throw std::invalid_argument("canonical_form: edge label count mismatch");

  std::vector<int> vlabels = vl.empty() ? std::vector<int>(static_cast<std::size_t>(n), 0) : vl;
  CanonicalSearch cs(g, vlabels, el);
  std::vector<std::vector<std::uint8_t>> cur;
  cs.search(cur, true);

  std::string out;
  out.push_back(static_cast<char>(n & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  for (const auto& chunk : cs.best)
    for (std::uint8_t b : chunk) out.push_back(static_cast<char>(b));
  return out;
}

}  // namespace

std::string canonical_form(const Graph& g, int max_vertices) {
  return canonical_impl(g, {}, {}, max_vertices);
}

std::string canonical_form_labeled(const Graph& g, const std::vector<int>& vertex_labels,
                                   const std::vector<int>& edge_labels, int max_vertices) {
  return canonical_impl(g, vertex_labels, edge_labels, max_vertices);
}

}  // namespace gfm
