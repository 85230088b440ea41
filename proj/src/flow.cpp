#include "gfm/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gfm/rng.hpp"

namespace gfm {

namespace {

void check_symmetric_zero_diag(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": must be square");
  for (int i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0.0) throw std::invalid_argument(std::string(what) + ": diagonal must be zero");
    for (int j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) throw std::invalid_argument(std::string(what) + ": must be symmetric");
  }
}

void check_same_shape(const GraphState& a, const GraphState& b, const char* what) {
  if (a.n() != b.n() || a.dx() != b.dx() || a.df() != b.df() || a.X.rows() != b.X.rows())
    throw std::invalid_argument(std::string(what) + ": state shapes must match");
}

void check_same_shape(const Velocity& a, const Velocity& b, const char* what) {
  if (a.A.rows() != b.A.rows() || a.X.rows() != b.X.rows() || a.X.cols() != b.X.cols() ||
      a.F.size() != b.F.size())
    throw std::invalid_argument(std::string(what) + ": velocity shapes must match");
}

double sq_frobenius(const Eigen::MatrixXd& m) { return m.squaredNorm(); }

}  // namespace

GraphState GraphState::zeros(int n, int dx, int df) {
  GraphState s;
  s.A = Eigen::MatrixXd::Zero(n, n);
  s.X = Eigen::MatrixXd::Zero(n, dx);
  s.F.assign(static_cast<std::size_t>(df), Eigen::MatrixXd::Zero(n, n));
  return s;
}

void GraphState::validate() const {
  check_symmetric_zero_diag(A, "GraphState.A");
  if (X.rows() != A.rows()) throw std::invalid_argument("GraphState: X row count mismatch");
  for (const auto& channel : F) {
    if (channel.rows() != A.rows())
      throw std::invalid_argument("GraphState: F channel size mismatch");
    check_symmetric_zero_diag(channel, "GraphState.F");
  }
  if (!A.allFinite() || !X.allFinite())
    throw std::invalid_argument("GraphState: entries must be finite");
  for (const auto& channel : F)
    if (!channel.allFinite()) throw std::invalid_argument("GraphState: entries must be finite");
}

Velocity Velocity::zeros(int n, int dx, int df) {
  Velocity v;
  v.A = Eigen::MatrixXd::Zero(n, n);
  v.X = Eigen::MatrixXd::Zero(n, dx);
  v.F.assign(static_cast<std::size_t>(df), Eigen::MatrixXd::Zero(n, n));
  return v;
}

double Velocity::frobenius_norm() const {
  double sq = sq_frobenius(A) + sq_frobenius(X);
  for (const auto& channel : F) sq += sq_frobenius(channel);
  return std::sqrt(sq);
}

ChemistryTable ChemistryTable::defaults(int atom_types) {
  ChemistryTable chem;
  chem.bond_orders = Eigen::VectorXd(4);
  chem.bond_orders << 1.0, 2.0, 3.0, 1.5;
  chem.max_valence = Eigen::VectorXd(atom_types);
  for (int i = 0; i < atom_types; ++i) chem.max_valence(i) = std::max(1.0, 4.0 - i);
  return chem;
}

PerturbedField::PerturbedField(std::shared_ptr<const VelocityField> base, double eps,
                               Velocity direction)
    : base_(std::move(base)), eps_(eps), direction_(std::move(direction)) {
  double norm = direction_.frobenius_norm();
  if (std::abs(norm - 1.0) > 1e-9)
    throw std::invalid_argument("PerturbedField: direction must have unit Frobenius norm");
}

Velocity PerturbedField::evaluate(const GraphState& s, double t) const {
  Velocity v = base_->evaluate(s, t);
  v.A += eps_ * direction_.A;
  v.X += eps_ * direction_.X;
  for (std::size_t c = 0; c < v.F.size(); ++c) v.F[c] += eps_ * direction_.F[c];
  return v;
}

StateCosineField::StateCosineField(Velocity delta, double eps, double lipschitz, GraphState anchor,
                                   Velocity direction_u, Velocity direction_v)
    : delta_(std::move(delta)),
      eps_(eps),
      omega_(eps > 0 ? lipschitz / eps : 0.0),
      anchor_(std::move(anchor)),
      u_(std::move(direction_u)),
      v_(std::move(direction_v)) {}

Velocity StateCosineField::evaluate(const GraphState& s, double) const {
  double inner = ((s.A - anchor_.A).cwiseProduct(v_.A)).sum() +
                 ((s.X - anchor_.X).cwiseProduct(v_.X)).sum();
  for (std::size_t c = 0; c < s.F.size(); ++c)
    inner += ((s.F[c] - anchor_.F[c]).cwiseProduct(v_.F[c])).sum();
  double scale = eps_ * std::cos(omega_ * inner);
  Velocity out = delta_;
  out.A += scale * u_.A;
  out.X += scale * u_.X;
  for (std::size_t c = 0; c < out.F.size(); ++c) out.F[c] += scale * u_.F[c];
  return out;
}

GraphState interpolate(const GraphState& s0, const GraphState& s1, double t) {
  check_same_shape(s0, s1, "interpolate");
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("interpolate: t must lie in [0,1]");
  GraphState s;
  s.A = (1.0 - t) * s0.A + t * s1.A;
  s.X = (1.0 - t) * s0.X + t * s1.X;
  s.F.reserve(s0.F.size());
  for (std::size_t c = 0; c < s0.F.size(); ++c) s.F.push_back((1.0 - t) * s0.F[c] + t * s1.F[c]);
  return s;
}

Velocity deltas(const GraphState& s0, const GraphState& s1) {
  check_same_shape(s0, s1, "deltas");
  Velocity d;
  d.A = s1.A - s0.A;
  d.X = s1.X - s0.X;
  d.F.reserve(s0.F.size());
  for (std::size_t c = 0; c < s0.F.size(); ++c) d.F.push_back(s1.F[c] - s0.F[c]);
  return d;
}

double loss_vel(const Velocity& v, const Velocity& d, const LossWeights& w) {
  check_same_shape(v, d, "loss_vel");
  double value = sq_frobenius(v.A - d.A) + w.lambda_x * sq_frobenius(v.X - d.X);
  double fpart = 0.0;
  for (std::size_t c = 0; c < v.F.size(); ++c) fpart += sq_frobenius(v.F[c] - d.F[c]);
  return value + w.lambda_e * fpart;
}

GraphState endpoint_prediction(const GraphState& s_t, const Velocity& v, double t) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("endpoint_prediction: t must lie in [0,1]");
  GraphState s;
  s.A = s_t.A + (1.0 - t) * v.A;
  s.X = s_t.X + (1.0 - t) * v.X;
  s.F.reserve(s_t.F.size());
  for (std::size_t c = 0; c < s_t.F.size(); ++c) s.F.push_back(s_t.F[c] + (1.0 - t) * v.F[c]);
  return s;
}

double loss_end(const GraphState& predicted, const GraphState& target, const LossWeights& w) {
  check_same_shape(predicted, target, "loss_end");
  double value = sq_frobenius(predicted.A - target.A) +
                 w.lambda_x * sq_frobenius(predicted.X - target.X);
  double fpart = 0.0;
  for (std::size_t c = 0; c < predicted.F.size(); ++c)
    fpart += sq_frobenius(predicted.F[c] - target.F[c]);
  return value + w.lambda_e * fpart;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  Eigen::VectorXd exps = shifted.array().exp();
  return exps / exps.sum();
}

}  // namespace

Eigen::VectorXd expected_valence(const Eigen::MatrixXd& adjacency_logits,
                                 const std::vector<Eigen::MatrixXd>& bond_logits,
                                 const ChemistryTable& chem) {
  const int n = static_cast<int>(adjacency_logits.rows());
  if (adjacency_logits.cols() != n)
    throw std::invalid_argument("expected_valence: adjacency logits must be square");
  const int channels = static_cast<int>(bond_logits.size());
  if (channels != chem.bond_orders.size())
    throw std::invalid_argument("expected_valence: bond channel count must match bond orders");
  for (const auto& channel : bond_logits)
    if (channel.rows() != n || channel.cols() != n)
      throw std::invalid_argument("expected_valence: bond logit shape mismatch");

  Eigen::MatrixXd weighted = 0.5 * (adjacency_logits + adjacency_logits.transpose());
  Eigen::VectorXd val = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd logits(channels);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int c = 0; c < channels; ++c) logits(c) = bond_logits[static_cast<std::size_t>(c)](i, j);
      double order = softmax(logits).dot(chem.bond_orders);
      val(i) += sigmoid(weighted(i, j)) * order;
    }
  return val;
}

double loss_val(const Eigen::MatrixXd& adjacency_logits,
                const std::vector<Eigen::MatrixXd>& bond_logits,
                const std::vector<int>& atom_types, const ChemistryTable& chem) {
  const int n = static_cast<int>(adjacency_logits.rows());
  if (static_cast<int>(atom_types.size()) != n)
    throw std::invalid_argument("loss_val: atom type count mismatch");
  for (int t : atom_types)
    if (t < 0 || t >= chem.max_valence.size())
      throw std::invalid_argument("loss_val: unknown atom type " + std::to_string(t));
  if (n == 0) return 0.0;
  Eigen::VectorXd val = expected_valence(adjacency_logits, bond_logits, chem);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    total += std::max(0.0, val(i) - chem.max_valence(atom_types[static_cast<std::size_t>(i)]));
  return total / static_cast<double>(n);
}

double loss_atom(const Eigen::MatrixXd& predicted_logits, const Eigen::MatrixXd& target_rows) {
  if (predicted_logits.rows() != target_rows.rows() ||
      predicted_logits.cols() != target_rows.cols())
    throw std::invalid_argument("loss_atom: shape mismatch");
  const int n = static_cast<int>(predicted_logits.rows());
  const int d = static_cast<int>(predicted_logits.cols());
  if (n == 0) return 0.0;

  auto sorted_mean = [n, d](const Eigen::MatrixXd& rows) {
    std::vector<Eigen::VectorXd> list;
    list.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) list.push_back(rows.row(i).transpose());
    std::sort(list.begin(), list.end(), [d](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      for (int c = 0; c < d; ++c) {
        if (a(c) != b(c)) return a(c) < b(c);
      }
      return false;
    });
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& r : list) mean += r;
    return Eigen::VectorXd(mean / static_cast<double>(n));
  };

  Eigen::MatrixXd soft(n, d);
  for (int i = 0; i < n; ++i) soft.row(i) = softmax(predicted_logits.row(i).transpose()).transpose();
  return (sorted_mean(soft) - sorted_mean(target_rows)).squaredNorm();
}

double total_loss(const LossParts& parts, const LossWeights& w) {
  return parts.vel + w.beta_end * parts.end + w.beta_val * parts.val + w.beta_atom * parts.atom;
}

std::pair<GraphState, Velocity> flow_matching_targets(const GraphState& s0, const GraphState& s1,
                                                      double t) {
  return {interpolate(s0, s1, t), deltas(s0, s1)};
}

IntegrationResult euler_integrate(const VelocityField& field, const GraphState& s0, int K) {
  if (K < 1) throw std::invalid_argument("euler_integrate: need at least one step");
  const double h = 1.0 / static_cast<double>(K);
  GraphState s = s0;
  for (int k = 0; k < K; ++k) {
    double t = static_cast<double>(k) / static_cast<double>(K);
    Velocity v = field.evaluate(s, t);
    s.A += h * v.A;
    s.X += h * v.X;
    for (std::size_t c = 0; c < s.F.size(); ++c) s.F[c] += h * v.F[c];
  }
  IntegrationResult out;
  out.pre_activation = s;
  out.activated = s;
  out.activated.A = (0.5 * (s.A + s.A.transpose())).cwiseMax(0.0).cwiseMin(1.0);
  out.activated.A.diagonal().setZero();
  for (auto& channel : out.activated.F) {
    channel = 0.5 * (channel + channel.transpose());
    channel.diagonal().setZero();
  }
  return out;
}

Velocity random_unit_direction(int n, int dx, int df, std::uint64_t seed) {
  Rng rng(seed);
  Velocity u = Velocity::zeros(n, dx, df);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double g = rng.uniform() - 0.5;
      u.A(i, j) = g;
      u.A(j, i) = g;
    }
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dx; ++c) u.X(i, c) = rng.uniform() - 0.5;
  for (int f = 0; f < df; ++f)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double g = rng.uniform() - 0.5;
        u.F[static_cast<std::size_t>(f)](i, j) = g;
        u.F[static_cast<std::size_t>(f)](j, i) = g;
      }
  double norm = u.frobenius_norm();
  if (norm == 0.0) throw std::runtime_error("random_unit_direction: degenerate direction");
  u.A /= norm;
  u.X /= norm;
  for (auto& channel : u.F) channel /= norm;
  return u;
}

std::vector<StabilityRow> stability_probe(const GraphState& s0, const Velocity& delta,
                                          const std::vector<double>& eps_grid,
                                          const std::vector<int>& step_grid, double lipschitz,
                                          std::uint64_t direction_seed) {
  const int n = s0.n();
  const int dx = s0.dx();
  const int df = s0.df();
  GraphState s1 = endpoint_prediction(s0, delta, 0.0);
  Velocity u = random_unit_direction(n, dx, df, direction_seed);
  Velocity v = random_unit_direction(n, dx, df, direction_seed + 1);

  auto endpoint_error = [&](double eps, int steps) {
    std::unique_ptr<VelocityField> field;
    if (lipschitz > 0.0 && eps > 0.0) {
      field = std::make_unique<StateCosineField>(delta, eps, lipschitz, s0, u, v);
    } else if (eps > 0.0) {
      field = std::make_unique<PerturbedField>(std::make_shared<IdealConstantField>(delta), eps, u);
    } else {
      field = std::make_unique<IdealConstantField>(delta);
    }
    GraphState end = euler_integrate(*field, s0, steps).pre_activation;
    return deltas(s1, end).frobenius_norm();
  };

  // Discretization constant from the eps = 0 runs: smallest C2 with
  // error(0, K) <= C2 / K across the grid.
  double c2 = 0.0;
  for (int steps : step_grid) c2 = std::max(c2, endpoint_error(0.0, steps) * steps);
  double c1 = lipschitz > 0.0 ? std::expm1(lipschitz) / lipschitz : 1.0;
  double c = c1 + c2;

  std::vector<StabilityRow> table;
  for (double eps : eps_grid)
    for (int steps : step_grid) {
      StabilityRow row;
      row.eps = eps;
      row.steps = steps;
      row.error = endpoint_error(eps, steps);
      row.bound = c * (eps + 1.0 / static_cast<double>(steps));
      table.push_back(row);
    }
  return table;
}

DiscreteProjection project_discrete(const GraphState& s, const ChemistryTable& chem,
                                    double threshold) {
  const int n = s.n();
  const int channels = s.df();
  if (channels != chem.bond_orders.size())
    throw std::invalid_argument("project_discrete: bond channel count must match bond orders");

  DiscreteProjection out;
  out.atom_types.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 1; c < s.dx(); ++c)
      if (s.X(i, c) > s.X(i, best)) best = c;
    out.atom_types[static_cast<std::size_t>(i)] = s.dx() > 0 ? best : 0;
  }

  struct Candidate {
    int u, v, bond;
    double confidence;
    bool alive = true;
  };
  std::vector<Candidate> cand;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (s.A(i, j) < threshold) continue;
      int best = 0;
      for (int c = 1; c < channels; ++c)
        if (s.F[static_cast<std::size_t>(c)](i, j) > s.F[static_cast<std::size_t>(best)](i, j)) best = c;
      cand.push_back({i, j, channels > 0 ? best : 0, s.A(i, j), true});
    }

  auto cap_of = [&](int vertex) {
    int type = out.atom_types[static_cast<std::size_t>(vertex)];
    if (type >= chem.max_valence.size())
      throw std::invalid_argument("project_discrete: atom type without valence cap");
    return chem.max_valence(type);
  };

  std::vector<double> valence(static_cast<std::size_t>(n), 0.0);
  auto recompute = [&]() {
    std::fill(valence.begin(), valence.end(), 0.0);
    for (const auto& e : cand) {
      if (!e.alive) continue;
      double order = channels > 0 ? chem.bond_orders(e.bond) : 1.0;
      valence[static_cast<std::size_t>(e.u)] += order;
      valence[static_cast<std::size_t>(e.v)] += order;
    }
  };
  recompute();

  for (;;) {
    int worst = -1;
    for (std::size_t k = 0; k < cand.size(); ++k) {
      const auto& e = cand[k];
      if (!e.alive) continue;
      bool violating = valence[static_cast<std::size_t>(e.u)] > cap_of(e.u) + 1e-9 ||
                       valence[static_cast<std::size_t>(e.v)] > cap_of(e.v) + 1e-9;
      if (!violating) continue;
      if (worst == -1 || e.confidence < cand[static_cast<std::size_t>(worst)].confidence ||
          (e.confidence == cand[static_cast<std::size_t>(worst)].confidence &&
           std::pair(e.u, e.v) < std::pair(cand[static_cast<std::size_t>(worst)].u,
                                           cand[static_cast<std::size_t>(worst)].v)))
        worst = static_cast<int>(k);
    }
    if (worst == -1) break;
    cand[static_cast<std::size_t>(worst)].alive = false;
    recompute();
  }

  std::vector<std::pair<int, int>> edges;
  for (const auto& e : cand) {
    if (!e.alive) continue;
    edges.emplace_back(e.u, e.v);
    out.bond_types.push_back(e.bond);
  }
  out.graph = Graph::from_edge_list(n, edges);
  return out;
}

}  // namespace gfm
