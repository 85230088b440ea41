#pragma once

// Test-only oracles, all deliberately written as plain exhaustive
// enumerations that stay independent of the library implementations they
// check.

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfm/graph.hpp"
#include "gfm/rng.hpp"

namespace testsupport {

inline gfm::Graph make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  return gfm::Graph::from_edge_list(n, edges);
}

inline gfm::Graph random_graph(gfm::Rng& rng, int n, double p) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
  return make_graph(n, edges);
}

inline gfm::Permutation random_permutation(int n, gfm::Rng& rng) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]);
  }
  return gfm::Permutation(std::move(m));
}

/// Minimal encoding over all n! orderings, same byte layout as the
/// library: [n lo, n hi] then per position [vertex label, edge codes to
/// earlier positions] with code = 0 for non-edge, label+1 for an edge.
inline std::string naive_min_encoding(const gfm::Graph& g, std::vector<int> vlabels = {},
                                      std::vector<int> elabels = {}) {
  const int n = g.vertex_count();
  if (vlabels.empty()) vlabels.assign(static_cast<std::size_t>(n), 0);
  std::map<std::pair<int, int>, int> code;
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    int c = 1 + (elabels.empty() ? 0 : elabels[e]);
    code[edges[e]] = c;
  }
  auto edge_code = [&](int u, int v) {
    auto it = code.find({std::min(u, v), std::max(u, v)});
    return it == code.end() ? 0 : it->second;
  };

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::string best;
  do {
    std::string enc;
    enc.push_back(static_cast<char>(n & 0xff));
    enc.push_back(static_cast<char>((n >> 8) & 0xff));
    for (int d = 0; d < n; ++d) {
      enc.push_back(static_cast<char>(vlabels[static_cast<std::size_t>(order[static_cast<std::size_t>(d)])]));
      for (int e = 0; e < d; ++e)
        enc.push_back(static_cast<char>(edge_code(order[static_cast<std::size_t>(d)], order[static_cast<std::size_t>(e)])));
    }
    if (best.empty() || enc < best) best = std::move(enc);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

/// Odometer enumeration of all |V(host)|^|V(pattern)| maps.
inline long long naive_hom_count(const gfm::Graph& pattern, const gfm::Graph& host) {
  const int pn = pattern.vertex_count();
  const int hn = host.vertex_count();
  if (pn == 0) return 1;
  if (hn == 0) return 0;
  std::vector<int> map(static_cast<std::size_t>(pn), 0);
  long long count = 0;
  for (;;) {
    bool ok = true;
    for (auto [u, v] : pattern.edges())
      if (!host.has_edge(map[static_cast<std::size_t>(u)], map[static_cast<std::size_t>(v)])) {
        ok = false;
        break;
      }
    if (ok) ++count;
    int pos = pn - 1;
    while (pos >= 0 && map[static_cast<std::size_t>(pos)] == hn - 1) {
      map[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++map[static_cast<std::size_t>(pos)];
  }
  return count;
}

/// Quartic coupling cost, written out as the literal four-index sum.
inline double naive_gw_loss(const Eigen::MatrixXd& T, const Eigen::MatrixXd& C0,
                            const Eigen::MatrixXd& C1) {
  double total = 0.0;
  for (int i = 0; i < C0.rows(); ++i)
    for (int k = 0; k < C0.rows(); ++k)
      for (int j = 0; j < C1.rows(); ++j)
        for (int l = 0; l < C1.rows(); ++l) {
          double diff = C0(i, k) - C1(j, l);
          total += diff * diff * T(i, j) * T(k, l);
        }
  return total;
}

struct ReferenceGraphlet {
  gfm::Graph graph;
  std::vector<int> orbits;  // orbit id per reference vertex
};

inline const std::vector<ReferenceGraphlet>& reference_graphlets() {
  static const std::vector<ReferenceGraphlet> list = {
      {make_graph(2, {{0, 1}}), {0, 0}},
      {make_graph(3, {{0, 1}, {1, 2}}), {1, 2, 1}},
      {make_graph(3, {{0, 1}, {1, 2}, {0, 2}}), {3, 3, 3}},
      {make_graph(4, {{0, 1}, {1, 2}, {2, 3}}), {4, 5, 5, 4}},
      {make_graph(4, {{0, 1}, {0, 2}, {0, 3}}), {7, 6, 6, 6}},
      {make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}), {8, 8, 8, 8}},
      {make_graph(4, {{0, 1}, {1, 2}, {0, 2}, {0, 3}}), {11, 10, 10, 9}},
      {make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}), {13, 13, 12, 12}},
      {make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}), {14, 14, 14, 14}}};
  return list;
}

/// Orbit of `position` inside the small graph `g` by brute-force
/// isomorphism against the reference graphlets. Returns -1 when g is
/// disconnected or matches nothing.
inline int orbit_of_position(const gfm::Graph& g, int position) {
  const int n = g.vertex_count();
  for (const auto& ref : reference_graphlets()) {
    if (ref.graph.vertex_count() != n || ref.graph.edge_count() != g.edge_count()) continue;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {  // perm maps g's vertices onto reference vertices
      bool iso = true;
      for (int u = 0; u < n && iso; ++u)
        for (int v = u + 1; v < n && iso; ++v)
          if (g.has_edge(u, v) !=
              ref.graph.has_edge(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]))
            iso = false;
      if (iso) return ref.orbits[static_cast<std::size_t>(perm[static_cast<std::size_t>(position)])];
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return -1;
}

/// Per-node orbit counts by enumerating, for every vertex, all subsets of
/// companions and classifying the induced subgraph against the reference
/// graphlets.
inline std::vector<std::array<long long, 15>> naive_orbit_counts(const gfm::Graph& g) {
  const int n = g.vertex_count();
  std::vector<std::array<long long, 15>> counts(static_cast<std::size_t>(n),
                                                std::array<long long, 15>{});
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  for (int v = 0; v < n; ++v) {
    for (int k = 2; k <= 4; ++k) {
      // enumerate (k-1)-subsets of {0..n-1} \ {v}
      std::vector<int> others;
      for (int u = 0; u < n; ++u)
        if (u != v) others.push_back(u);
      std::vector<int> idx(static_cast<std::size_t>(k - 1));
      std::iota(idx.begin(), idx.end(), 0);
      if (static_cast<int>(others.size()) < k - 1) continue;
      for (;;) {
        std::vector<int> subset{v};
        for (int i : idx) subset.push_back(others[static_cast<std::size_t>(i)]);
        std::sort(subset.begin(), subset.end());
        int position = static_cast<int>(std::find(subset.begin(), subset.end(), v) - subset.begin());
        gfm::Graph induced = gfm::induced_subgraph(g, subset);
        int orbit = orbit_of_position(induced, position);
        if (orbit >= 0) ++counts[static_cast<std::size_t>(v)][static_cast<std::size_t>(orbit)];
        // next combination
        int i = k - 2;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == static_cast<int>(others.size()) - (k - 1) + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k - 1; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return counts;
}

}  // namespace testsupport
