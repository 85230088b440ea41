#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gfm/graph.hpp"

namespace gfm {

/// Topology plus continuous node features X (n x d_x) and edge features F
/// (d_f symmetric n x n channels with zero diagonal).
struct AttributedGraph {
  Graph g;
  Eigen::MatrixXd X;
  std::vector<Eigen::MatrixXd> F;

  int n() const { return g.vertex_count(); }
  int dx() const { return static_cast<int>(X.cols()); }
  int df() const { return static_cast<int>(F.size()); }
  void validate() const;
};

/// Deterministic structural node embedding: per vertex
/// [degree/(n-1), local clustering coefficient, lazy-random-walk return
/// probabilities at steps 1..k]. Row-permutation equivariant exactly:
/// neighbor contributions are accumulated in sorted order so the floating
/// point result is independent of vertex labeling.
struct StructEmbedding {
  Eigen::MatrixXd rows;  // n x (2 + k)
};

StructEmbedding structural_embedding(const Graph& g, int steps);

/// Pairwise squared Euclidean distances between embedding rows
/// (symmetric, zero diagonal).
Eigen::MatrixXd intra_cost(const StructEmbedding& z);

/// Cross-graph squared distances between feature rows: M_ij = |x0_i - x1_j|^2.
Eigen::MatrixXd feature_cost(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x1);

struct TransportPlan {
  Eigen::MatrixXd T;  // n0 x n1, nonnegative
  Eigen::VectorXd p;  // prescribed row sums
  Eigen::VectorXd q;  // prescribed column sums

  bool marginals_ok(double tol = 1e-9) const;
};

/// Quartic coupling cost sum_{ikjl} (C0_ik - C1_jl)^2 T_ij T_kl evaluated
/// through the O(n^3) factorization with the plan's own row/column sums.
double gw_loss(const Eigen::MatrixXd& T, const Eigen::MatrixXd& C0, const Eigen::MatrixXd& C1);

/// (1-alpha) <T, M> + alpha * gw_loss(T, C0, C1).
double fgw_objective(const Eigen::MatrixXd& T, const Eigen::MatrixXd& M,
                     const Eigen::MatrixXd& C0, const Eigen::MatrixXd& C1, double alpha);

struct FgwConfig {
  double alpha = 0.5;
  int max_iters = 200;
  double tol = 1e-7;
  int embed_steps = 4;
};

struct FgwResult {
  double value = 0.0;
  TransportPlan plan;
  bool converged = true;
  int iterations = 0;
  std::vector<double> objective_trace;  // objective at each iterate of the winning run
  std::vector<double> marginal_gap_trace;  // max marginal violation at each iterate
};

/// Fused feature/structure distance between two attributed graphs with
/// uniform node measures, minimized by conditional gradient: linearize at
/// the current plan, solve the linear transport subproblem exactly, then
/// take the exact line-search step. Runs from the product coupling and
/// from a cross-embedding matching start; returns the better iterate.
FgwResult solve_fgw(const AttributedGraph& g0, const AttributedGraph& g1, const FgwConfig& cfg);

struct BatchFgwResult {
  Eigen::MatrixXd D;                // B x B pairwise distances
  std::vector<TransportPlan> plans; // row-major pair order
};

/// All-pairs distances between two equal-length lists; pairs are
/// independent and spread over `threads` workers.
BatchFgwResult batch_fgw(const std::vector<AttributedGraph>& noise,
                         const std::vector<AttributedGraph>& target, const FgwConfig& cfg,
                         int threads = 1);

/// Exact minimum-cost assignment (square matrix). Among cost-minimal
/// permutations, the lexicographically smallest is returned.
Permutation hungarian(const Eigen::MatrixXd& cost);

/// Exact linear transport plan for uniform marginals (1/n0, 1/n1):
/// assignment when n0 == n1, otherwise successive-shortest-path flow on
/// integer-scaled masses.
Eigen::MatrixXd solve_linear_transport_uniform(const Eigen::MatrixXd& cost);

/// Greedy extraction of n node pairs from a plan: repeatedly take the
/// largest remaining entry with unused endpoints, ties to smallest (i, j).
std::vector<std::pair<int, int>> align_nodes(const TransportPlan& plan, int n);

}  // namespace gfm
