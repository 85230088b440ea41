#include "gfm/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gfm {

GraphDescriptor degree_hist(const Graph& g, int max_degree) {
  if (max_degree < 0) throw std::invalid_argument("degree_hist: negative max degree");
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(max_degree + 1);
  const int n = g.vertex_count();
  for (int v = 0; v < n; ++v) hist(std::min(g.degree(v), max_degree)) += 1.0;
  if (n > 0) hist /= static_cast<double>(n);
  return {DescriptorKind::DegreeHist, hist};
}

namespace {

std::vector<double> local_clustering(const Graph& g) {
  auto tri = per_vertex_triangles(g);
  std::vector<double> coeff(static_cast<std::size_t>(g.vertex_count()), 0.0);
  for (int v = 0; v < g.vertex_count(); ++v) {
    double deg = static_cast<double>(g.degree(v));
    double pairs = deg * (deg - 1.0) / 2.0;
    coeff[static_cast<std::size_t>(v)] =
        pairs > 0 ? static_cast<double>(tri[static_cast<std::size_t>(v)]) / pairs : 0.0;
  }
  return coeff;
}

}  // namespace

GraphDescriptor clustering_hist(const Graph& g, int bins) {
  if (bins < 1) throw std::invalid_argument("clustering_hist: need at least one bin");
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(bins);
  const int n = g.vertex_count();
  for (double c : local_clustering(g)) {
    int idx = std::min(bins - 1, static_cast<int>(std::floor(c * bins)));
    hist(idx) += 1.0;
  }
  if (n > 0) hist /= static_cast<double>(n);
  return {DescriptorKind::ClusteringHist, hist};
}

namespace {

// Orbits of connected graphlets on 2-4 vertices, in the usual order:
//   0 edge; 1/2 path-3 end/middle; 3 triangle; 4/5 path-4 end/middle;
//   6/7 star-4 leaf/center; 8 cycle-4; 9/10/11 triangle-with-pendant
//   pendant / far pair / attachment; 12/13 diamond degree-2/degree-3;
//   14 complete-4.
constexpr int kOrbitCount = 15;

void add_triple_orbits(const Graph& g, int a, int b, int c,
                       std::vector<std::array<long long, kOrbitCount>>& counts) {
  int ab = g.has_edge(a, b), ac = g.has_edge(a, c), bc = g.has_edge(b, c);
  int edges = ab + ac + bc;
  if (edges < 2) return;  // disconnected
  std::array<int, 3> vs{a, b, c};
  if (edges == 3) {
    for (int v : vs) ++counts[static_cast<std::size_t>(v)][3];
    return;
  }
  for (int v : vs) {
    int deg = (v == a ? ab + ac : v == b ? ab + bc : ac + bc);
    ++counts[static_cast<std::size_t>(v)][deg == 2 ? 2 : 1];
  }
}

void add_quad_orbits(const Graph& g, const std::array<int, 4>& vs,
                     std::vector<std::array<long long, kOrbitCount>>& counts) {
  int deg[4] = {0, 0, 0, 0};
  int edges = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (g.has_edge(vs[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(j)])) {
        ++deg[i];
        ++deg[j];
        ++edges;
      }
  if (edges < 3) return;
  // Connectivity: with >= 3 edges on 4 vertices the only disconnected
  // case is a triangle plus an isolated vertex.
  if (edges == 3 && (deg[0] == 0 || deg[1] == 0 || deg[2] == 0 || deg[3] == 0)) return;

  for (int i = 0; i < 4; ++i) {
    int v = vs[static_cast<std::size_t>(i)];
    int orbit;
    switch (edges) {
      case 3:
        // star (degrees 1,1,1,3) or path (1,1,2,2)
        if (std::max({deg[0], deg[1], deg[2], deg[3]}) == 3)
          orbit = deg[i] == 3 ? 7 : 6;
        else
          orbit = deg[i] == 2 ? 5 : 4;
        break;
      case 4:
        if (deg[0] == 2 && deg[1] == 2 && deg[2] == 2 && deg[3] == 2)
          orbit = 8;  // cycle
        else
          orbit = deg[i] == 1 ? 9 : deg[i] == 3 ? 11 : 10;  // triangle + pendant
        break;
      case 5:
        orbit = deg[i] == 2 ? 12 : 13;  // diamond
        break;
      default:
        orbit = 14;  // complete
        break;
    }
    ++counts[static_cast<std::size_t>(v)][static_cast<std::size_t>(orbit)];
  }
}

}  // namespace

GraphDescriptor orbit_counts(const Graph& g, int max_vertices) {
  const int n = g.vertex_count();
  if (n > max_vertices)
    throw std::invalid_argument("orbit_counts: graph exceeds supported size " +
                                std::to_string(max_vertices));
  std::vector<std::array<long long, kOrbitCount>> counts(
      static_cast<std::size_t>(n), std::array<long long, kOrbitCount>{});

  for (auto [u, v] : g.edges()) {
    ++counts[static_cast<std::size_t>(u)][0];
    ++counts[static_cast<std::size_t>(v)][0];
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) add_triple_orbits(g, a, b, c, counts);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) add_quad_orbits(g, {a, b, c, d}, counts);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(kOrbitCount);
  for (const auto& row : counts)
    for (int k = 0; k < kOrbitCount; ++k) mean(k) += static_cast<double>(row[static_cast<std::size_t>(k)]);
  if (n > 0) mean /= static_cast<double>(n);
  return {DescriptorKind::OrbitCounts, mean};
}

namespace {

double sq_dist_padded(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const int len = static_cast<int>(std::max(a.size(), b.size()));
  double d = 0.0;
  for (int k = 0; k < len; ++k) {
    double av = k < a.size() ? a(k) : 0.0;
    double bv = k < b.size() ? b(k) : 0.0;
    double diff = av - bv;
    d += diff * diff;
  }
  return d;
}

}  // namespace

double mmd_squared(const std::vector<GraphDescriptor>& a, const std::vector<GraphDescriptor>& b,
                   double bandwidth) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mmd_squared: empty descriptor set");
  for (const auto& d : a)
    if (d.kind != a.front().kind) throw std::invalid_argument("mmd_squared: mixed descriptor kinds");
  for (const auto& d : b)
    if (d.kind != a.front().kind) throw std::invalid_argument("mmd_squared: mixed descriptor kinds");
  if (bandwidth <= 0.0) throw std::invalid_argument("mmd_squared: bandwidth must be positive");

  const double denom = 2.0 * bandwidth * bandwidth;
  auto kernel_mean = [&](const std::vector<GraphDescriptor>& x,
                         const std::vector<GraphDescriptor>& y) {
    double sum = 0.0;
    for (const auto& xi : x)
      for (const auto& yj : y) sum += std::exp(-sq_dist_padded(xi.vector, yj.vector) / denom);
    return sum / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
  };
  return kernel_mean(a, a) + kernel_mean(b, b) - 2.0 * kernel_mean(a, b);
}

double median_pairwise_bandwidth(const std::vector<const std::vector<GraphDescriptor>*>& sets) {
  std::vector<const GraphDescriptor*> pool;
  for (const auto* set : sets)
    for (const auto& d : *set) pool.push_back(&d);
  std::vector<double> dists;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      dists.push_back(std::sqrt(sq_dist_padded(pool[i]->vector, pool[j]->vector)));
  if (dists.empty()) return 1.0;
  std::sort(dists.begin(), dists.end());
  double median = dists[dists.size() / 2];
  return median > 0.0 ? median : 1.0;
}

RatioResult descriptor_ratio(const std::vector<GraphDescriptor>& gen,
                             const std::vector<GraphDescriptor>& train,
                             const std::vector<GraphDescriptor>& test, double bandwidth) {
  RatioResult out;
  double reference = mmd_squared(train, test, bandwidth);
  if (reference <= 1e-15) {
    out.degenerate = true;
    return out;
  }
  out.value = mmd_squared(gen, test, bandwidth) / reference;
  return out;
}

namespace {

bool valence_feasible(const LabeledGraph& sample, const ChemistryTable& chem) {
  const int n = sample.g.vertex_count();
  std::vector<double> valence(static_cast<std::size_t>(n), 0.0);
  const auto& edges = sample.g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    int bond = sample.bonds.empty() ? 0 : sample.bonds[e];
    if (bond < 0 || bond >= chem.bond_orders.size()) return false;
    valence[static_cast<std::size_t>(edges[e].first)] += chem.bond_orders(bond);
    valence[static_cast<std::size_t>(edges[e].second)] += chem.bond_orders(bond);
  }
  for (int v = 0; v < n; ++v) {
    int type = sample.atoms.empty() ? 0 : sample.atoms[static_cast<std::size_t>(v)];
    if (type < 0 || type >= chem.max_valence.size()) return false;
    if (valence[static_cast<std::size_t>(v)] > chem.max_valence(type) + 1e-9) return false;
  }
  return true;
}

std::string labeled_canonical(const LabeledGraph& g, int bound) {
  return canonical_form_labeled(g.g, g.atoms, g.bonds, bound);
}

}  // namespace

VunResult vun(const std::vector<LabeledGraph>& samples, const std::vector<LabeledGraph>& train,
              const ChemistryTable& chem, int canon_bound) {
  VunResult out;
  if (samples.empty()) return out;

  std::set<std::string> train_forms;
  for (const auto& g : train) train_forms.insert(labeled_canonical(g, canon_bound));

  std::vector<std::string> valid_forms;
  for (const auto& s : samples)
    if (valence_feasible(s, chem)) valid_forms.push_back(labeled_canonical(s, canon_bound));

  out.valid_pct = 100.0 * static_cast<double>(valid_forms.size()) / static_cast<double>(samples.size());
  if (valid_forms.empty()) return out;

  std::set<std::string> distinct(valid_forms.begin(), valid_forms.end());
  out.unique_pct = 100.0 * static_cast<double>(distinct.size()) / static_cast<double>(valid_forms.size());

  std::size_t novel = 0;
  for (const auto& form : valid_forms)
    if (!train_forms.contains(form)) ++novel;
  out.novel_pct = 100.0 * static_cast<double>(novel) / static_cast<double>(valid_forms.size());
  return out;
}

}  // namespace gfm
