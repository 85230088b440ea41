#include "gfm/homomorphism.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace gfm {

namespace {

// Backtracking over assignments of pattern vertices in index order.
// Candidates for vertex v are intersections of host-neighbor bitsets of
// already-assigned pattern neighbors (all hosts when v has none).
struct HomSearch {
  int pn, hn;
  std::vector<std::vector<int>> earlier;            // pattern neighbors with smaller index
  std::vector<std::vector<std::uint64_t>> hostadj;  // bitset rows
  int words;

  long long count(int v, std::vector<int>& assign) {
    if (v == pn) return 1;
    long long total = 0;
    if (earlier[static_cast<std::size_t>(v)].empty()) {
      for (int h = 0; h < hn; ++h) {
        assign[static_cast<std::size_t>(v)] = h;
        total += count(v + 1, assign);
      }
      return total;
    }
    std::vector<std::uint64_t> cand(hostadj[static_cast<std::size_t>(
        assign[static_cast<std::size_t>(earlier[static_cast<std::size_t>(v)][0])])]);
    for (std::size_t k = 1; k < earlier[static_cast<std::size_t>(v)].size(); ++k) {
      const auto& row = hostadj[static_cast<std::size_t>(
          assign[static_cast<std::size_t>(earlier[static_cast<std::size_t>(v)][k])])];
      for (int w = 0; w < words; ++w) cand[static_cast<std::size_t>(w)] &= row[static_cast<std::size_t>(w)];
    }
    for (int w = 0; w < words; ++w) {
      std::uint64_t bits = cand[static_cast<std::size_t>(w)];
      while (bits) {
        int h = w * 64 + std::countr_zero(bits);
        bits &= bits - 1;
        assign[static_cast<std::size_t>(v)] = h;
        total += count(v + 1, assign);
      }
    }
    return total;
  }
};

}  // namespace

long long hom_count(const Graph& pattern, const Graph& host, const HomConfig& cfg) {
  if (pattern.vertex_count() > cfg.pattern_bound)
    throw std::invalid_argument("hom_count: pattern exceeds bound " +
                                std::to_string(cfg.pattern_bound));
  if (host.vertex_count() > cfg.host_bound)
    throw std::invalid_argument("hom_count: host exceeds bound " + std::to_string(cfg.host_bound));
  const int pn = pattern.vertex_count();
  const int hn = host.vertex_count();
  if (pn == 0) return 1;  // the empty map
  if (hn == 0) return 0;

  HomSearch s;
  s.pn = pn;
  s.hn = hn;
  s.words = (hn + 63) / 64;
  s.earlier.assign(static_cast<std::size_t>(pn), {});
  for (auto [u, v] : pattern.edges()) s.earlier[static_cast<std::size_t>(std::max(u, v))].push_back(std::min(u, v));
  s.hostadj.assign(static_cast<std::size_t>(hn),
                   std::vector<std::uint64_t>(static_cast<std::size_t>(s.words), 0));
  for (auto [u, v] : host.edges()) {
    s.hostadj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v / 64)] |= 1ULL << (v % 64);
    s.hostadj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u / 64)] |= 1ULL << (u % 64);
  }
  std::vector<int> assign(static_cast<std::size_t>(pn), -1);
  return s.count(0, assign);
}

double hom_density(const Graph& pattern, const Graph& host, const HomConfig& cfg) {
  if (host.vertex_count() < 1) throw std::invalid_argument("hom_density: empty host graph");
  double denom = std::pow(static_cast<double>(host.vertex_count()), pattern.vertex_count());
  return static_cast<double>(hom_count(pattern, host, cfg)) / denom;
}

bool is_triangle_covered(const Graph& g) {
  for (int u = 0; u < g.vertex_count(); ++u) {
    const auto& nbrs = g.neighbors(u);
    bool covered = false;
    for (std::size_t a = 0; a < nbrs.size() && !covered; ++a)
      for (std::size_t b = a + 1; b < nbrs.size() && !covered; ++b)
        if (g.has_edge(nbrs[a], nbrs[b])) covered = true;
    if (!covered) return false;
  }
  return true;
}

EditHomPrediction predict_edit_homs(EditKind kind, long long vertex_homs_before,
                                    long long edge_homs_before, long long added_vertices,
                                    long long rings) {
  EditHomPrediction out;
  out.vertex_homs = vertex_homs_before + added_vertices;
  if (kind == EditKind::Star)
    out.edge_homs = edge_homs_before + 2 * added_vertices;
  else
    out.edge_homs = edge_homs_before + 2 * (added_vertices + rings);
  return out;
}

PreservationReport verify_triangle_covered_preservation(const Graph& before, const Graph& after,
                                                        const std::vector<NamedPattern>& patterns,
                                                        EditKind kind, int ring_size, double tol) {
  if (kind == EditKind::Ring && ring_size <= 3)
    throw std::invalid_argument(
        "verify_triangle_covered_preservation: ring size must exceed 3");
  PreservationReport report;
  const int n = before.vertex_count();
  const int total = after.vertex_count();
  for (const auto& p : patterns) {
    if (!is_triangle_covered(p.graph))
      throw std::invalid_argument("verify_triangle_covered_preservation: pattern \"" + p.name +
                                  "\" is not triangle-covered");
    PreservationCheck check;
    check.pattern = p.name;
    check.before = hom_count(p.graph, before);
    check.after = hom_count(p.graph, after);
    check.counts_equal = check.before == check.after;
    double scale = std::pow(static_cast<double>(n) / static_cast<double>(total),
                            p.graph.vertex_count());
    check.density_after = hom_density(p.graph, after);
    check.density_scaled = scale * hom_density(p.graph, before);
    check.density_ok = std::abs(check.density_after - check.density_scaled) <= tol;
    report.all_ok = report.all_ok && check.counts_equal && check.density_ok;
    report.checks.push_back(std::move(check));
  }
  return report;
}

}  // namespace gfm
