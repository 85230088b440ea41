#include "gfm/graphette.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gfm {

Graphon Graphon::constant(double p, int resolution) {
  return from_grid(resolution,
                   std::vector<double>(static_cast<std::size_t>(resolution) * resolution, p));
}

Graphon Graphon::from_grid(int m, std::vector<double> values) {
  Graphon w;
  w.m = m;
  w.values = std::move(values);
  w.validate();
  return w;
}

Graphon Graphon::mixture_of(std::vector<std::pair<double, Graphon>> components) {
  Graphon w;
  for (auto& [weight, graphon] : components) {
    w.mixture_weights.push_back(weight);
    w.mixture_components.push_back(std::move(graphon));
  }
  w.validate();
  return w;
}

Graphon Graphon::stochastic_block_model(const std::vector<double>& fractions, double p_in,
                                        double p_out, int resolution) {
  if (fractions.empty()) throw std::invalid_argument("stochastic_block_model: no blocks");
  // Block id of each grid cell, by cumulative fraction of the cell center.
  std::vector<int> block(static_cast<std::size_t>(resolution));
  for (int a = 0; a < resolution; ++a) {
    double x = (a + 0.5) / resolution;
    double cum = 0.0;
    int id = static_cast<int>(fractions.size()) - 1;
    for (std::size_t k = 0; k < fractions.size(); ++k) {
      cum += fractions[k];
      if (x < cum) {
        id = static_cast<int>(k);
        break;
      }
    }
    block[static_cast<std::size_t>(a)] = id;
  }
  std::vector<double> grid(static_cast<std::size_t>(resolution) * resolution);
  for (int a = 0; a < resolution; ++a)
    for (int b = 0; b < resolution; ++b)
      grid[static_cast<std::size_t>(a) * resolution + b] =
          block[static_cast<std::size_t>(a)] == block[static_cast<std::size_t>(b)] ? p_in : p_out;
  return from_grid(resolution, std::move(grid));
}

int Graphon::cell_of(double u) const {
  return std::min(m - 1, static_cast<int>(std::floor(u * m)));
}

void Graphon::validate() const {
  if (is_mixture()) {
    if (mixture_weights.size() != mixture_components.size())
      throw std::invalid_argument("Graphon: mixture weight/component count mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < mixture_weights.size(); ++k) {
      if (mixture_weights[k] < 0) throw std::invalid_argument("Graphon: negative mixture weight");
      total += mixture_weights[k];
      mixture_components[k].validate();
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("Graphon: mixture weights must sum to 1");
    return;
  }
  if (m <= 0) throw std::invalid_argument("Graphon: resolution must be positive");
  if (values.size() != static_cast<std::size_t>(m) * m)
    throw std::invalid_argument("Graphon: grid size mismatch");
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double v = value_at(a, b);
      if (v < 0.0 || v > 1.0) throw std::invalid_argument("Graphon: entries must lie in [0,1]");
      if (v != value_at(b, a)) throw std::invalid_argument("Graphon: grid must be symmetric");
    }
}

double mean_value(const Graphon& w) {
  if (w.is_mixture()) {
    double total = 0.0;
    for (std::size_t k = 0; k < w.mixture_weights.size(); ++k)
      total += w.mixture_weights[k] * mean_value(w.mixture_components[k]);
    return total;
  }
  double sum = 0.0;
  for (double v : w.values) sum += v;
  return sum / static_cast<double>(w.values.size());
}

SparsitySchedule SparsitySchedule::constant(double rho) {
  if (rho < 0.0 || rho > 1.0)
    throw std::invalid_argument("SparsitySchedule: rho must lie in [0,1]");
  SparsitySchedule s;
  s.kind = Kind::Constant;
  s.rho = rho;
  return s;
}

SparsitySchedule SparsitySchedule::inverse_mean_degree(double eps) {
  SparsitySchedule s;
  s.kind = Kind::InverseMeanDegree;
  s.eps = eps;
  return s;
}

double SparsitySchedule::evaluate(double mean_w, int n) const {
  double value = rho;
  if (kind == Kind::InverseMeanDegree) {
    double denom = mean_w * static_cast<double>(n);
    value = (denom > 0 ? 1.0 / denom : 1.0) + eps;
  }
  return std::clamp(value, 0.0, 1.0);
}

namespace {

// Pinned draw order: mixture component (if any), then latents u_1..u_n,
// then edges in lexicographic (i, j) order with i < j.
GraphonSample sample_scaled(const Graphon& w, double scale, int n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("sample: negative vertex count");
  const Graphon* grid = &w;
  if (w.is_mixture()) {
    double u = rng.uniform();
    double cum = 0.0;
    grid = &w.mixture_components.back();
    for (std::size_t k = 0; k < w.mixture_weights.size(); ++k) {
      cum += w.mixture_weights[k];
      if (u < cum) {
        grid = &w.mixture_components[k];
        break;
      }
    }
    if (grid->is_mixture()) throw std::invalid_argument("sample: nested mixtures are unsupported");
  }
  GraphonSample out;
  out.latents.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.latents[static_cast<std::size_t>(i)] = rng.uniform();
  std::vector<int> cell(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) cell[static_cast<std::size_t>(i)] = grid->cell_of(out.latents[static_cast<std::size_t>(i)]);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double p = scale * grid->value_at(cell[static_cast<std::size_t>(i)], cell[static_cast<std::size_t>(j)]);
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
    }
  out.graph = Graph::from_edge_list(n, edges);
  return out;
}

Graph append_ring(const Graph& g, int ring_size, int attach_old, int attach_ring_offset) {
  const int base = g.vertex_count();
  std::vector<std::pair<int, int>> edges = g.edges();
  for (int r = 0; r < ring_size; ++r)
    edges.emplace_back(base + r, base + (r + 1) % ring_size);
  edges.emplace_back(attach_old, base + attach_ring_offset);
  return Graph::from_edge_list(base + ring_size, edges);
}

}  // namespace

GraphonSample sample_graphon_with_latents(const Graphon& w, int n, Rng& rng) {
  w.validate();
  return sample_scaled(w, 1.0, n, rng);
}

Graph sample_graphon(const Graphon& w, int n, Rng& rng) {
  return sample_graphon_with_latents(w, n, rng).graph;
}

GraphonSample sample_sparsified_with_latents(const Graphon& w, const SparsitySchedule& rho, int n,
                                             Rng& rng) {
  w.validate();
  return sample_scaled(w, rho.evaluate(mean_value(w), n), n, rng);
}

Graph sample_sparsified(const Graphon& w, const SparsitySchedule& rho, int n, Rng& rng) {
  return sample_sparsified_with_latents(w, rho, n, rng).graph;
}

Graph cycle_deletion(const Graph& g) {
  const int n = g.vertex_count();
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<std::pair<int, int>> tree;
  std::vector<int> queue;
  for (int s = 0; s < n; ++s) {
    if (visited[static_cast<std::size_t>(s)]) continue;
    visited[static_cast<std::size_t>(s)] = 1;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      int u = queue[head];
      for (int v : g.neighbors(u)) {
        if (visited[static_cast<std::size_t>(v)]) continue;
        visited[static_cast<std::size_t>(v)] = 1;
        tree.emplace_back(u, v);
        queue.push_back(v);
      }
    }
  }
  return Graph::from_edge_list(n, tree);
}

Graph ring_addition(const Graph& g, double p, int c, Rng& rng) {
  if (c < 3) throw std::invalid_argument("ring_addition: ring size must be at least 3");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("ring_addition: p must lie in [0,1]");
  Graph out = g;
  const int original = g.vertex_count();
  for (int i = 0; i < original; ++i) {
    if (!rng.bernoulli(p)) continue;
    int offset = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(c)));
    out = append_ring(out, c, i, offset);
  }
  return out;
}

Graph ring_addition_budgeted(const Graph& g, const std::vector<std::pair<int, int>>& counts,
                             int budget, Rng& rng) {
  if (budget < g.vertex_count())
    throw std::invalid_argument("ring_addition_budgeted: budget below current vertex count");
  Graph out = g;
  for (auto [size, count] : counts) {
    for (int r = 0; r < count; ++r) {
      int remaining = budget - out.vertex_count();
      if (remaining <= 0) break;
      int truncated = std::min(size, remaining);
      if (truncated < 3) continue;
      int attach_old = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(out.vertex_count())));
      int offset = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(truncated)));
      out = append_ring(out, truncated, attach_old, offset);
    }
  }
  return out;
}

Graph star_addition(const Graph& g, double a, double b, const std::vector<double>& latents,
                    Rng& rng) {
  if (a <= 0.0) throw std::invalid_argument("star_addition: rate a must be positive");
  if (std::abs(b) >= 1.0) throw std::invalid_argument("star_addition: |b| must be below 1");
  const int n = g.vertex_count();
  if (static_cast<int>(latents.size()) != n)
    throw std::invalid_argument("star_addition: latent count must match vertex count");
  std::vector<std::pair<int, int>> edges = g.edges();
  int next = n;
  for (int i = 0; i < n; ++i) {
    long s = rng.poisson(a * static_cast<double>(n) * std::exp(latents[static_cast<std::size_t>(i)] + b));
    for (long k = 0; k < s; ++k) edges.emplace_back(i, next++);
  }
  return Graph::from_edge_list(next, edges);
}

Graph sample_graphette(const Graphette& gw, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_graphette: need at least one vertex");
  GraphonSample sample = sample_sparsified_with_latents(gw.w, gw.rho, n, rng);

  std::vector<int> keep = largest_connected_component_vertices(sample.graph);
  Graph current = induced_subgraph(sample.graph, keep);
  std::vector<double> latents;
  latents.reserve(keep.size());
  for (int v : keep) latents.push_back(sample.latents[static_cast<std::size_t>(v)]);

  if (current.vertex_count() > n) {  // cannot trigger here; kept as the documented safety rule
    std::vector<int> subset;
    std::vector<int> pool(static_cast<std::size_t>(current.vertex_count()));
    for (int i = 0; i < current.vertex_count(); ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int k = 0; k < n; ++k) {
      std::size_t pick = rng.uniform_below(pool.size());
      subset.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::sort(subset.begin(), subset.end());
    std::vector<double> kept_latents;
    for (int v : subset) kept_latents.push_back(latents[static_cast<std::size_t>(v)]);
    current = induced_subgraph(current, subset);
    latents = std::move(kept_latents);
  }

  for (const auto& edit : gw.edits) {
    if (std::holds_alternative<IdentityEdit>(edit)) continue;
    if (std::holds_alternative<CycleDeletionEdit>(edit)) {
      current = cycle_deletion(current);
      continue;
    }
    if (const auto* ring = std::get_if<RingAdditionEdit>(&edit)) {
      // Bernoulli draws are consumed for every vertex; a ring is attached
      // only when the full c fits the remaining budget.
      const int present = current.vertex_count();
      for (int i = 0; i < present; ++i) {
        bool hit = rng.bernoulli(ring->p);
        if (!hit) continue;
        if (n - current.vertex_count() < ring->c) continue;
        int offset = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(ring->c)));
        current = append_ring(current, ring->c, i, offset);
      }
      continue;
    }
    const auto& star = std::get<StarAdditionEdit>(edit);
    // Vertices created by earlier edits get fresh latents, drawn here in
    // ascending vertex order.
    while (static_cast<int>(latents.size()) < current.vertex_count()) latents.push_back(rng.uniform());
    const int present = current.vertex_count();
    std::vector<std::pair<int, int>> edges = current.edges();
    int next = present;
    for (int i = 0; i < present; ++i) {
      long s = rng.poisson(star.a * static_cast<double>(present) *
                           std::exp(latents[static_cast<std::size_t>(i)] + star.b));
      long cap = n - next;
      if (s > cap) s = cap;
      for (long k = 0; k < s; ++k) edges.emplace_back(i, next++);
    }
    current = Graph::from_edge_list(next, edges);
  }
  return current;
}

Graphette named_prior(const std::string& name, const PriorParams& params) {
  Graphette gw;
  if (name == "community") {
    gw.w = Graphon::mixture_of({
        {0.5, Graphon::stochastic_block_model({0.5, 0.5}, 0.8, 0.05, 12)},
        {0.5, Graphon::stochastic_block_model({1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.7, 0.05, 12)},
    });
    gw.rho = SparsitySchedule::constant(1.0);
    gw.edits = {IdentityEdit{}};
    return gw;
  }
  if (name == "tree") {
    gw.w = Graphon::constant(0.2);
    gw.rho = SparsitySchedule::inverse_mean_degree(params.eps);
    gw.edits = {CycleDeletionEdit{}};
    return gw;
  }
  if (name == "egonet") {
    const int m = params.grid_resolution;
    std::vector<double> grid(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double x = (a + 0.5) / m;
        double y = (b + 0.5) / m;
        grid[static_cast<std::size_t>(a) * m + b] = std::exp(-(10.0 / 3.0) * (x + y));
      }
    gw.w = Graphon::from_grid(m, std::move(grid));
    gw.rho = SparsitySchedule::constant(1.0);
    gw.edits = {StarAdditionEdit{params.star_a, params.star_b},
                RingAdditionEdit{params.ring_p, params.ring_c}};
    return gw;
  }
  if (name == "molecular") {
    gw.w = Graphon::constant(0.2);
    gw.rho = SparsitySchedule::inverse_mean_degree(params.eps);
    gw.edits = {RingAdditionEdit{params.ring_p, params.ring_c}};
    return gw;
  }
  throw std::invalid_argument("named_prior: unknown prior \"" + name + "\"");
}

}  // namespace gfm
