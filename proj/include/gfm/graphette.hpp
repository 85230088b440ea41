#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gfm/graph.hpp"
#include "gfm/rng.hpp"

namespace gfm {

/// Piecewise-constant symmetric edge-probability kernel on an m x m grid,
/// or a finite mixture of such kernels (one component is drawn per graph).
struct Graphon {
  int m = 0;
  std::vector<double> values;  // row-major m*m, symmetric, entries in [0,1]

  // Mixture node: parallel weights/components, m and values unused.
  std::vector<double> mixture_weights;
  std::vector<Graphon> mixture_components;

  static Graphon constant(double p, int resolution = 1);
  static Graphon from_grid(int m, std::vector<double> values);
  static Graphon mixture_of(std::vector<std::pair<double, Graphon>> components);

  /// Block kernel: the unit square is split into |fractions| blocks along
  /// each axis; cells get p_in on the diagonal blocks and p_out elsewhere.
  static Graphon stochastic_block_model(const std::vector<double>& fractions, double p_in,
                                        double p_out, int resolution);

  bool is_mixture() const { return !mixture_components.empty(); }
  double value_at(int a, int b) const { return values[static_cast<std::size_t>(a) * m + b]; }

  /// Grid cell for a latent position u in [0,1].
  int cell_of(double u) const;

  void validate() const;
};

/// Mean of the kernel over the unit square.
double mean_value(const Graphon& w);

/// Edge-probability scale: either a constant rho or the inverse-mean-degree
/// rule rho_n = 1/(mean(W) * n) + eps, always clamped to [0,1].
struct SparsitySchedule {
  enum class Kind { Constant, InverseMeanDegree };
  Kind kind = Kind::Constant;
  double rho = 1.0;
  double eps = 0.0;

  static SparsitySchedule constant(double rho);
  static SparsitySchedule inverse_mean_degree(double eps);
  double evaluate(double mean_w, int n) const;
};

struct IdentityEdit {};
struct CycleDeletionEdit {};
struct RingAdditionEdit {
  double p;  // per-vertex attachment probability
  int c;     // ring size, >= 3
};
struct StarAdditionEdit {
  double a;  // rate, > 0
  double b;  // offset, |b| < 1
};
using GraphEdit = std::variant<IdentityEdit, CycleDeletionEdit, RingAdditionEdit, StarAdditionEdit>;

/// Prior over graphs: kernel, sparsity schedule, and an ordered list of
/// edits applied left to right after sampling.
struct Graphette {
  Graphon w;
  SparsitySchedule rho;
  std::vector<GraphEdit> edits;
};

struct GraphonSample {
  Graph graph;
  std::vector<double> latents;  // the uniforms that chose grid cells
};

/// Latents u_i ~ U[0,1), then independent edges with probability
/// W(cell(u_i), cell(u_j)); mixtures draw one component per graph.
Graph sample_graphon(const Graphon& w, int n, Rng& rng);
GraphonSample sample_graphon_with_latents(const Graphon& w, int n, Rng& rng);

/// Same with probabilities scaled by the evaluated rho_n.
Graph sample_sparsified(const Graphon& w, const SparsitySchedule& rho, int n, Rng& rng);
GraphonSample sample_sparsified_with_latents(const Graphon& w, const SparsitySchedule& rho, int n,
                                             Rng& rng);

/// BFS spanning forest from the lowest-id unvisited vertex with ascending
/// neighbor order; connected input yields a tree.
Graph cycle_deletion(const Graph& g);

/// Per original vertex, with probability p append a fresh c-cycle and join
/// one uniformly chosen ring vertex to it by a single edge.
Graph ring_addition(const Graph& g, double p, int c, Rng& rng);

/// Budgeted variant: for each (size s, count c_s) attach c_s rings, each
/// truncated to the remaining budget and skipped entirely below size 3.
/// The attachment endpoint is uniform over pre-existing vertices.
Graph ring_addition_budgeted(const Graph& g, const std::vector<std::pair<int, int>>& counts,
                             int budget, Rng& rng);

/// Per vertex i, attach s_i ~ Poisson(a * n * exp(u_i + b)) fresh leaves.
Graph star_addition(const Graph& g, double a, double b, const std::vector<double>& latents,
                    Rng& rng);

/// Full prior pipeline: sparsified-kernel sample, largest connected
/// component, then the edit list under the node budget n. Ring edits only
/// attach full rings that fit the budget; star counts are capped by the
/// remaining budget. Star edits reuse the sampling latents and draw fresh
/// ones for edit-created vertices.
Graph sample_graphette(const Graphette& gw, int n, Rng& rng);

struct PriorParams {
  int grid_resolution = 10;  // discretization for closed-form kernels
  double eps = 0.01;         // inverse-mean-degree offset
  double ring_p = 0.2;
  int ring_c = 5;
  double star_a = 0.05;
  double star_b = 0.2;
};

/// Named priors: "community" (SBM-mixture kernel, identity edit), "tree"
/// (constant 0.2 kernel, inverse mean degree, cycle deletion), "egonet"
/// (exp(-(10/3)(x+y)) kernel, star then ring edits), "molecular"
/// (constant 0.2 kernel, inverse mean degree, ring edit).
Graphette named_prior(const std::string& name, const PriorParams& params = {});

}  // namespace gfm
