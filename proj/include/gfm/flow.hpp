#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "gfm/graph.hpp"

namespace gfm {

/// Continuous graph state: adjacency A (symmetric, zero diagonal), node
/// features X, and edge-feature channels F (each symmetric, zero diagonal).
struct GraphState {
  Eigen::MatrixXd A;
  Eigen::MatrixXd X;
  std::vector<Eigen::MatrixXd> F;

  int n() const { return static_cast<int>(A.rows()); }
  int dx() const { return static_cast<int>(X.cols()); }
  int df() const { return static_cast<int>(F.size()); }

  static GraphState zeros(int n, int dx, int df);
  void validate() const;
};

/// Instantaneous rates for (A, X, F); same shapes and symmetry as the state.
struct Velocity {
  Eigen::MatrixXd A;
  Eigen::MatrixXd X;
  std::vector<Eigen::MatrixXd> F;

  static Velocity zeros(int n, int dx, int df);
  double frobenius_norm() const;
};

struct LossWeights {
  double lambda_x = 1.0;
  double lambda_e = 1.0;
  double beta_end = 0.0;
  double beta_val = 0.0;
  double beta_atom = 0.0;
};

struct ChemistryTable {
  Eigen::VectorXd bond_orders;  // e.g. [1, 2, 3, 1.5]
  Eigen::VectorXd max_valence;  // cap per atom type

  static ChemistryTable defaults(int atom_types = 4);
};

class VelocityField {
 public:
  virtual ~VelocityField() = default;
  virtual Velocity evaluate(const GraphState& s, double t) const = 0;
};

/// Constant field equal to a fixed displacement.
class IdealConstantField final : public VelocityField {
 public:
  explicit IdealConstantField(Velocity delta) : delta_(std::move(delta)) {}
  Velocity evaluate(const GraphState&, double) const override { return delta_; }

 private:
  Velocity delta_;
};

/// base(s, t) + eps * U for a fixed direction U with unit Frobenius norm.
class PerturbedField final : public VelocityField {
 public:
  PerturbedField(std::shared_ptr<const VelocityField> base, double eps, Velocity direction);
  Velocity evaluate(const GraphState& s, double t) const override;

 private:
  std::shared_ptr<const VelocityField> base_;
  double eps_;
  Velocity direction_;
};

/// delta + eps * cos(omega <V, s - anchor>) * U with unit-norm U, V and
/// omega = lipschitz / eps: the perturbation is bounded by eps everywhere
/// and the field is lipschitz-Lipschitz in the state.
class StateCosineField final : public VelocityField {
 public:
  StateCosineField(Velocity delta, double eps, double lipschitz, GraphState anchor,
                   Velocity direction_u, Velocity direction_v);
  Velocity evaluate(const GraphState& s, double t) const override;

 private:
  Velocity delta_;
  double eps_;
  double omega_;
  GraphState anchor_;
  Velocity u_, v_;
};

GraphState interpolate(const GraphState& s0, const GraphState& s1, double t);
Velocity deltas(const GraphState& s0, const GraphState& s1);

/// |v_A - d_A|_F^2 + lambda_x |v_X - d_X|_F^2 + lambda_e |v_F - d_F|_F^2.
double loss_vel(const Velocity& v, const Velocity& d, const LossWeights& w);

/// s_t + (1 - t) * v, the single-step endpoint extrapolation.
GraphState endpoint_prediction(const GraphState& s_t, const Velocity& v, double t);

double loss_end(const GraphState& predicted, const GraphState& target, const LossWeights& w);

/// Soft valence: sigmoid-weighted adjacency times softmax-expected bond
/// order, summed over neighbors (diagonal excluded).
Eigen::VectorXd expected_valence(const Eigen::MatrixXd& adjacency_logits,
                                 const std::vector<Eigen::MatrixXd>& bond_logits,
                                 const ChemistryTable& chem);

/// Mean hinge of expected valence above the per-type cap.
double loss_val(const Eigen::MatrixXd& adjacency_logits,
                const std::vector<Eigen::MatrixXd>& bond_logits,
                const std::vector<int>& atom_types, const ChemistryTable& chem);

/// Squared distance between the mean softmax of predicted rows and the
/// mean target row. Rows are accumulated in sorted order, so the value is
/// exactly invariant under row permutations.
double loss_atom(const Eigen::MatrixXd& predicted_logits, const Eigen::MatrixXd& target_rows);

struct LossParts {
  double vel = 0.0;
  double end = 0.0;
  double val = 0.0;
  double atom = 0.0;
};

double total_loss(const LossParts& parts, const LossWeights& w);

/// (interpolate(s0, s1, t), deltas(s0, s1)).
std::pair<GraphState, Velocity> flow_matching_targets(const GraphState& s0, const GraphState& s1,
                                                      double t);

struct IntegrationResult {
  GraphState pre_activation;  // raw K-step Euler endpoint
  GraphState activated;       // A clamped to [0,1], A and F re-symmetrized
};

/// K explicit Euler steps at t_k = k/K from s0.
IntegrationResult euler_integrate(const VelocityField& field, const GraphState& s0, int K);

struct StabilityRow {
  double eps = 0.0;
  int steps = 0;
  double error = 0.0;  // |endpoint - (s0 + delta)|_F before activation
  double bound = 0.0;  // C * (eps + 1/K)
};

/// Integrates delta + eps-bounded perturbations over an (eps, K) grid and
/// reports endpoint errors next to the bound C(eps + 1/K), where
/// C = (e^L - 1)/L (1 at L = 0) plus a discretization constant measured on
/// the eps = 0 runs. lipschitz = 0 selects the constant-direction
/// perturbation; otherwise the state-dependent cosine field is used.
std::vector<StabilityRow> stability_probe(const GraphState& s0, const Velocity& delta,
                                          const std::vector<double>& eps_grid,
                                          const std::vector<int>& step_grid, double lipschitz,
                                          std::uint64_t direction_seed = 7);

struct DiscreteProjection {
  Graph graph;
  std::vector<int> atom_types;  // per vertex
  std::vector<int> bond_types;  // aligned with graph.edges()
};

/// Threshold A at `threshold`, take argmax atom/bond types, then
/// repeatedly drop the lowest-confidence edge at any valence-violating
/// node until every cap holds.
DiscreteProjection project_discrete(const GraphState& s, const ChemistryTable& chem,
                                    double threshold = 0.5);

/// Deterministic unit-Frobenius direction with symmetric A/F components.
Velocity random_unit_direction(int n, int dx, int df, std::uint64_t seed);

}  // namespace gfm
