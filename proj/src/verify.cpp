#include "gfm/verify.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gfm/coupling.hpp"
#include "gfm/flow.hpp"
#include "gfm/graph.hpp"
#include "gfm/graphette.hpp"
#include "gfm/homomorphism.hpp"
#include "gfm/rng.hpp"

namespace gfm {

bool SuiteReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json doc;
  doc["suite"] = suite;
  doc["pass"] = all_pass();
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks)
    list.push_back({{"name", c.name}, {"pass", c.pass}, {"details", c.details}});
  doc["checks"] = list;
  if (!extra.is_null())
    for (const auto& [key, value] : extra.items()) doc[key] = value;
  return doc;
}

namespace {

Graph bowtie() {
  return Graph::from_edge_list(5, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}, {3, 4}});
}

std::vector<NamedPattern> covered_patterns() {
  return {{"triangle", Graph::complete(3)},
          {"complete4", Graph::complete(4)},
          {"bowtie", bowtie()}};
}

/// Connected base with 2..max_n vertices: a seeded prior sample (dense
/// constant kernel, no edits), retried until it has at least one edge.
Graph sample_base(Rng& rng, int max_n) {
  Graphette prior{Graphon::constant(0.6), SparsitySchedule::constant(1.0), {}};
  for (;;) {
    int n = 4 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_n - 3)));
    Graph g = sample_graphette(prior, n, rng);
    if (g.vertex_count() >= 2 && g.edge_count() >= 1) return g;
  }
}

struct EditOutcome {
  Graph after;
  EditKind kind;
  int ring_size = 0;
  long long added_vertices = 0;
  long long rings = 0;
};

EditOutcome apply_seeded_edit(const Graph& base, Rng& rng, int index) {
  EditOutcome out;
  if (index % 2 == 0) {
    out.kind = EditKind::Star;
    std::vector<double> u(static_cast<std::size_t>(base.vertex_count()));
    for (auto& x : u) x = rng.uniform();
    out.after = star_addition(base, 0.08, 0.2, u, rng);
  } else {
    out.kind = EditKind::Ring;
    out.ring_size = 4 + (index / 2) % 2;  // alternate c = 4, 5
    out.after = ring_addition(base, 0.3, out.ring_size, rng);
    out.rings = (out.after.vertex_count() - base.vertex_count()) / out.ring_size;
  }
  out.added_vertices = out.after.vertex_count() - base.vertex_count();
  return out;
}

std::string describe(long long done, long long total) {
  std::ostringstream ss;
  ss << done << "/" << total << " instances ok";
  return ss.str();
}

}  // namespace

SuiteReport verify_hom(std::uint64_t seed) {
  SuiteReport report;
  report.suite = "hom";
  const auto patterns = covered_patterns();

  {  // pattern-count preservation across 200 seeded edits
    long long ok = 0;
    const long long total = 200;
    nlohmann::json cases = nlohmann::json::array();
    for (long long i = 0; i < total; ++i) {
      Rng rng = Rng::derive(seed, 101, static_cast<std::uint64_t>(i));
      Graph base = sample_base(rng, 9);
      EditOutcome edit = apply_seeded_edit(base, rng, static_cast<int>(i));
      auto rep = verify_triangle_covered_preservation(base, edit.after, patterns, edit.kind,
                                                      edit.kind == EditKind::Ring ? edit.ring_size : 0);
      if (rep.all_ok) ++ok;
      if (i < 10 || !rep.all_ok)  // keep the report readable
        for (const auto& check : rep.checks)
          cases.push_back({{"pattern", check.pattern},
                           {"before", check.before},
                           {"after", check.after},
                           {"equal", check.counts_equal}});
    }
    report.extra["pattern_checks"] = cases;
    report.checks.push_back({"hom counts preserved for triangle-covered patterns under star/ring edits",
                             ok == total, describe(ok, total)});
  }

  {  // closed-form vertex/edge predictions on 100 seeded edits
    long long ok = 0;
    const long long total = 100;
    const Graph vertex_pattern = Graph::from_edge_list(1, {});
    const Graph edge_pattern = Graph::from_edge_list(2, {{0, 1}});
    for (long long i = 0; i < total; ++i) {
      Rng rng = Rng::derive(seed, 102, static_cast<std::uint64_t>(i));
      Graph base = sample_base(rng, 10);
      EditOutcome edit = apply_seeded_edit(base, rng, static_cast<int>(i));
      long long v_before = hom_count(vertex_pattern, base);
      long long e_before = hom_count(edge_pattern, base);
      auto pred = predict_edit_homs(edit.kind, v_before, e_before, edit.added_vertices, edit.rings);
      bool counts_ok = pred.vertex_homs == hom_count(vertex_pattern, edit.after) &&
                       pred.edge_homs == hom_count(edge_pattern, edit.after);

      // Edge-density scaling identity for the same edit.
      double n = base.vertex_count();
      double total_n = edit.after.vertex_count();
      double extra = static_cast<double>(edit.added_vertices + (edit.kind == EditKind::Ring ? edit.rings : 0));
      double scale = (n * n) / (total_n * total_n) * (1.0 + extra / base.edge_count());
      double lhs = hom_density(edge_pattern, edit.after);
      double rhs = scale * hom_density(edge_pattern, base);
      bool density_ok = std::abs(lhs - rhs) <= 1e-12;
      if (counts_ok && density_ok) ++ok;
    }
    report.checks.push_back({"closed-form vertex/edge hom predictions match brute force",
                             ok == total, describe(ok, total)});
  }
  return report;
}

namespace {

AttributedGraph random_attributed(Rng& rng, int min_n, int max_n, int dx, int df) {
  int n = min_n + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_n - min_n + 1)));
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(0.4)) edges.emplace_back(i, j);
  AttributedGraph ag;
  ag.g = Graph::from_edge_list(n, edges);
  ag.X = Eigen::MatrixXd::Zero(n, dx);
  for (int i = 0; i < n; ++i) ag.X(i, static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(dx)))) = 1.0;
  for (int c = 0; c < df; ++c) ag.F.push_back(Eigen::MatrixXd::Zero(n, n));
  for (auto [u, v] : ag.g.edges()) {
    int c = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(df)));
    ag.F[static_cast<std::size_t>(c)](u, v) = 1.0;
    ag.F[static_cast<std::size_t>(c)](v, u) = 1.0;
  }
  return ag;
}

AttributedGraph permute_attributed(const AttributedGraph& ag, const Permutation& pi) {
  const int n = ag.n();
  AttributedGraph out;
  out.g = permute(ag.g, pi);
  out.X = Eigen::MatrixXd::Zero(n, ag.dx());
  for (int i = 0; i < n; ++i) out.X.row(pi(i)) = ag.X.row(i);
  for (int c = 0; c < ag.df(); ++c) {
    Eigen::MatrixXd ch = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) ch(pi(i), pi(j)) = ag.F[static_cast<std::size_t>(c)](i, j);
    out.F.push_back(std::move(ch));
  }
  return out;
}

Permutation random_permutation(int n, Rng& rng) {
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]);
  }
  return Permutation(std::move(m));
}

}  // namespace

SuiteReport verify_fgw(std::uint64_t seed) {
  SuiteReport report;
  report.suite = "fgw";
  FgwConfig cfg;

  {  // self-distance zero on 50 seeded graphs
    long long ok = 0;
    const long long total = 50;
    double worst = 0.0;
    for (long long i = 0; i < total; ++i) {
      Rng rng = Rng::derive(seed, 201, static_cast<std::uint64_t>(i));
      AttributedGraph g = random_attributed(rng, 2, 8, 4, 4);
      double value = solve_fgw(g, g, cfg).value;
      worst = std::max(worst, value);
      if (value <= 1e-9) ++ok;
    }
    std::ostringstream ss;
    ss << describe(ok, total) << ", worst self-distance " << worst;
    report.checks.push_back({"fused distance of a graph to itself is zero", ok == total, ss.str()});
  }

  {  // solver-level relabeling invariance on 50 seeded pairs
    long long ok = 0;
    const long long total = 50;
    double worst = 0.0;
    for (long long i = 0; i < total; ++i) {
      Rng rng = Rng::derive(seed, 202, static_cast<std::uint64_t>(i));
      AttributedGraph g0 = random_attributed(rng, 2, 8, 4, 4);
      AttributedGraph g1 = random_attributed(rng, 2, 8, 4, 4);
      Permutation pi = random_permutation(g0.n(), rng);
      Permutation tau = random_permutation(g1.n(), rng);
      double v0 = solve_fgw(g0, g1, cfg).value;
      double v1 = solve_fgw(permute_attributed(g0, pi), permute_attributed(g1, tau), cfg).value;
      worst = std::max(worst, std::abs(v0 - v1));
      if (std::abs(v0 - v1) <= 1e-6) ++ok;
    }
    std::ostringstream ss;
    ss << describe(ok, total) << ", worst gap " << worst;
    report.checks.push_back({"solver value invariant under node relabelings", ok == total, ss.str()});
  }

  {  // exact objective-level relabeling identity
    long long ok = 0;
    const long long total = 50;
    for (long long i = 0; i < total; ++i) {
      Rng rng = Rng::derive(seed, 203, static_cast<std::uint64_t>(i));
      AttributedGraph g0 = random_attributed(rng, 2, 8, 4, 4);
      AttributedGraph g1 = random_attributed(rng, 2, 8, 4, 4);
      const int n0 = g0.n(), n1 = g1.n();
      Eigen::MatrixXd T(n0, n1);
      for (int r = 0; r < n0; ++r)
        for (int c = 0; c < n1; ++c) T(r, c) = rng.uniform();
      T /= T.sum();
      StructEmbedding z0 = structural_embedding(g0.g, cfg.embed_steps);
      StructEmbedding z1 = structural_embedding(g1.g, cfg.embed_steps);
      Eigen::MatrixXd M = feature_cost(g0.X, g1.X);
      Eigen::MatrixXd C0 = intra_cost(z0);
      Eigen::MatrixXd C1 = intra_cost(z1);
      double base = fgw_objective(T, M, C0, C1, cfg.alpha);

      Permutation pi = random_permutation(n0, rng);
      Permutation tau = random_permutation(n1, rng);
      Eigen::MatrixXd Tp(n0, n1), Mp(n0, n1), C0p(n0, n0), C1p(n1, n1);
      for (int r = 0; r < n0; ++r)
        for (int c = 0; c < n1; ++c) {
          Tp(pi(r), tau(c)) = T(r, c);
          Mp(pi(r), tau(c)) = M(r, c);
        }
      for (int r = 0; r < n0; ++r)
        for (int c = 0; c < n0; ++c) C0p(pi(r), pi(c)) = C0(r, c);
      for (int r = 0; r < n1; ++r)
        for (int c = 0; c < n1; ++c) C1p(tau(r), tau(c)) = C1(r, c);
      double permuted = fgw_objective(Tp, Mp, C0p, C1p, cfg.alpha);
      if (std::abs(base - permuted) <= 1e-12 * std::max(1.0, std::abs(base))) ++ok;
    }
    report.checks.push_back({"objective value identical under simultaneous relabeling",
                             ok == total, describe(ok, total)});
  }

  {  // planted-assignment recovery on 100 seeded batches
    long long ok = 0;
    const long long total = 100;
    for (long long i = 0; i < total; ++i) {
      Rng rng = Rng::derive(seed, 204, static_cast<std::uint64_t>(i));
      int b = 2 + static_cast<int>(rng.uniform_below(7));  // batch size 2..8

      // Pairwise structurally distinct noise graphs.
      std::vector<AttributedGraph> noise;
      std::vector<std::string> forms;
      while (static_cast<int>(noise.size()) < b) {
        AttributedGraph g = random_attributed(rng, 4, 8, 4, 4);
        std::string form = canonical_form(g.g);
        bool fresh = true;
        for (const auto& f : forms)
          if (f == form) fresh = false;
        if (!fresh) continue;
        forms.push_back(std::move(form));
        noise.push_back(std::move(g));
      }

      Permutation sigma = random_permutation(b, rng);
      std::vector<AttributedGraph> target(static_cast<std::size_t>(b));
      for (int k = 0; k < b; ++k) {
        Permutation node_pi = random_permutation(noise[static_cast<std::size_t>(k)].n(), rng);
        target[static_cast<std::size_t>(sigma(k))] = permute_attributed(noise[static_cast<std::size_t>(k)], node_pi);
      }
      auto batch = batch_fgw(noise, target, cfg);
      if (hungarian(batch.D).mapping() == sigma.mapping()) ++ok;
    }
    report.checks.push_back({"assignment recovers the planted batch matching", ok == total,
                             describe(ok, total)});
  }
  return report;
}

namespace {

GraphState random_state(Rng& rng, int n, int dx, int df) {
  GraphState s = GraphState::zeros(n, dx, df);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = rng.uniform();
      s.A(i, j) = v;
      s.A(j, i) = v;
    }
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dx; ++c) s.X(i, c) = rng.uniform();
  for (int f = 0; f < df; ++f)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double v = rng.uniform();
        s.F[static_cast<std::size_t>(f)](i, j) = v;
        s.F[static_cast<std::size_t>(f)](j, i) = v;
      }
  return s;
}

}  // namespace

SuiteReport verify_flow(std::uint64_t seed) {
  SuiteReport report;
  report.suite = "flow";
  const std::vector<int> step_grid{1, 2, 7, 50};

  {  // exact endpoint recovery with the constant field, 100 pairs
    long long ok = 0;
    const long long total = 100;
    double worst = 0.0;
    for (long long i = 0; i < total; ++i) {
      Rng rng = Rng::derive(seed, 301, static_cast<std::uint64_t>(i));
      int n = 2 + static_cast<int>(rng.uniform_below(7));
      GraphState s0 = random_state(rng, n, 3, 2);
      GraphState s1 = random_state(rng, n, 3, 2);
      IdealConstantField field(deltas(s0, s1));
      bool all_ok = true;
      for (int steps : step_grid) {
        GraphState end = euler_integrate(field, s0, steps).pre_activation;
        double err = deltas(s1, end).frobenius_norm();
        worst = std::max(worst, err);
        all_ok = all_ok && err <= 1e-12;
      }
      if (all_ok) ++ok;
    }
    std::ostringstream ss;
    ss << describe(ok, total) << ", worst endpoint error " << worst;
    report.checks.push_back({"constant-field integration recovers the endpoint at any step count",
                             ok == total, ss.str()});
  }

  {  // perturbed integration stays within the error bound
    Rng rng = Rng::derive(seed, 302, 0);
    GraphState s0 = random_state(rng, 6, 3, 2);
    GraphState s1 = random_state(rng, 6, 3, 2);
    Velocity delta = deltas(s0, s1);
    const std::vector<double> eps_grid{0.0, 0.01, 0.05, 0.1};
    const std::vector<int> k_grid{1, 5, 25, 125};

    bool bound_ok = true, monotone_ok = true, linear_ok = true;
    auto constant_probe = stability_probe(s0, delta, eps_grid, k_grid, 0.0);
    for (const auto& row : constant_probe) {
      bound_ok = bound_ok && row.error <= row.bound + 1e-12;
      linear_ok = linear_ok && std::abs(row.error - row.eps) <= 1e-9;
    }
    for (double eps : eps_grid) {
      double prev = -1.0;
      for (int steps : k_grid) {
        for (const auto& row : constant_probe)
          if (row.eps == eps && row.steps == steps) {
            if (prev >= 0.0) monotone_ok = monotone_ok && row.error <= prev + 1e-12;
            prev = row.error;
          }
      }
    }
    auto lipschitz_probe = stability_probe(s0, delta, eps_grid, k_grid, 1.0);
    for (const auto& row : lipschitz_probe) bound_ok = bound_ok && row.error <= row.bound + 1e-12;

    report.checks.push_back({"perturbed integration error within C(eps + 1/K)", bound_ok,
                             bound_ok ? "constant and state-dependent probes in bound" : "bound exceeded"});
    report.checks.push_back({"constant-probe error non-increasing in step count", monotone_ok,
                             monotone_ok ? "monotone across grid" : "monotonicity violated"});
    report.checks.push_back({"constant-probe error linear in perturbation size", linear_ok,
                             linear_ok ? "error equals eps across grid" : "linearity violated"});
  }
  return report;
}

SuiteReport verify_all(std::uint64_t seed) {
  SuiteReport report;
  report.suite = "all";
  for (const auto& suite : {verify_hom(seed), verify_fgw(seed), verify_flow(seed)}) {
    for (const auto& check : suite.checks) report.checks.push_back(check);
    if (!suite.extra.is_null())
      for (const auto& [key, value] : suite.extra.items()) report.extra[key] = value;
  }
  return report;
}

}  // namespace gfm
