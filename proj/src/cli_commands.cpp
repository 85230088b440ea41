#include "gfm/cli.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gfm/json_io.hpp"
#include "gfm/metrics.hpp"
#include "gfm/rng.hpp"
#include "gfm/verify.hpp"

namespace gfm {

using nlohmann::json;

namespace {

// Substream stage ids for the seed fan-out (derive(seed, stage, item)).
constexpr std::uint64_t kStageSample = 1;
constexpr std::uint64_t kStageCoupleFeatures = 2;
constexpr std::uint64_t kStageFlowDirection = 3;

Graphon parse_graphon(const json& doc) {
  if (doc.contains("mixture")) {
    std::vector<std::pair<double, Graphon>> parts;
    for (const auto& entry : doc.at("mixture"))
      parts.emplace_back(entry.at("weight").get<double>(), parse_graphon(entry.at("graphon")));
    return Graphon::mixture_of(std::move(parts));
  }
  int m = doc.at("m").get<int>();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m) * m);
  for (const auto& row : doc.at("values"))
    for (const auto& cell : row) values.push_back(cell.get<double>());
  return Graphon::from_grid(m, std::move(values));
}

SparsitySchedule parse_rho(const json& doc) {
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "constant") return SparsitySchedule::constant(doc.at("rho").get<double>());
  if (kind == "inverse_mean_degree")
    return SparsitySchedule::inverse_mean_degree(doc.at("eps").get<double>());
  throw std::invalid_argument("prior config: unknown rho kind \"" + kind + "\"");
}

GraphEdit parse_edit(const json& doc) {
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "identity") return IdentityEdit{};
  if (kind == "cycle_deletion") return CycleDeletionEdit{};
  if (kind == "ring_addition")
    return RingAdditionEdit{doc.at("p").get<double>(), doc.at("c").get<int>()};
  if (kind == "star_addition")
    return StarAdditionEdit{doc.at("a").get<double>(), doc.at("b").get<double>()};
  throw std::invalid_argument("prior config: unknown edit kind \"" + kind + "\"");
}

}  // namespace

Graphette parse_prior_config(const std::string& json_text) {
  json doc = json::parse(json_text);
  if (doc.contains("prior")) {
    PriorParams params;
    if (doc.contains("params")) {
      const auto& p = doc.at("params");
      if (p.contains("grid_resolution")) params.grid_resolution = p.at("grid_resolution").get<int>();
      if (p.contains("eps")) params.eps = p.at("eps").get<double>();
      if (p.contains("ring_p")) params.ring_p = p.at("ring_p").get<double>();
      if (p.contains("ring_c")) params.ring_c = p.at("ring_c").get<int>();
      if (p.contains("star_a")) params.star_a = p.at("star_a").get<double>();
      if (p.contains("star_b")) params.star_b = p.at("star_b").get<double>();
    }
    return named_prior(doc.at("prior").get<std::string>(), params);
  }
  Graphette gw;
  gw.w = parse_graphon(doc.at("graphon"));
  gw.rho = doc.contains("rho") ? parse_rho(doc.at("rho")) : SparsitySchedule::constant(1.0);
  if (doc.contains("edits"))
    for (const auto& e : doc.at("edits")) gw.edits.push_back(parse_edit(e));
  return gw;
}

int run_sample(const SampleOptions& opt) {
  Graphette prior = parse_prior_config(read_text_file(opt.config_path));
  std::vector<LabeledGraph> corpus;
  corpus.reserve(static_cast<std::size_t>(opt.n_graphs));
  for (int i = 0; i < opt.n_graphs; ++i) {
    Rng rng = Rng::derive(opt.seed, kStageSample, static_cast<std::uint64_t>(i));
    corpus.push_back({sample_graphette(prior, opt.n_nodes, rng), {}, {}});
  }
  write_corpus(opt.out_path, corpus);
  return 0;
}

namespace {

struct FeatureConfig {
  int dx = 4;
  int df = 4;
  std::vector<double> atom_prior;  // empty = uniform
  std::vector<double> bond_prior;
};

FeatureConfig parse_feature_config(const std::string& path) {
  FeatureConfig cfg;
  if (path.empty()) return cfg;
  json doc = json::parse(read_text_file(path));
  if (doc.contains("dx")) cfg.dx = doc.at("dx").get<int>();
  if (doc.contains("df")) cfg.df = doc.at("df").get<int>();
  if (doc.contains("atom_prior")) cfg.atom_prior = doc.at("atom_prior").get<std::vector<double>>();
  if (doc.contains("bond_prior")) cfg.bond_prior = doc.at("bond_prior").get<std::vector<double>>();
  return cfg;
}

/// Content hash of a graph document, so sampled features depend on the
/// graph itself rather than its corpus position: identical graphs get
/// identical features on both sides of a coupling.
std::uint64_t graph_content_hash(const LabeledGraph& g) {
  std::string bytes = graph_to_json(g).dump();
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (unsigned char c : bytes) h = mix64(h ^ c);
  return h;
}

int draw_categorical(const std::vector<double>& prior, int size, Rng& rng) {
  if (prior.empty()) return static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(size)));
  double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t k = 0; k < prior.size(); ++k) {
    cum += prior[k];
    if (u < cum) return static_cast<int>(k);
  }
  return static_cast<int>(prior.size()) - 1;
}

/// One-hot features from labels when present, otherwise sampled from the
/// categorical priors (the per-item substream keeps corpora reproducible).
AttributedGraph attribute_graph(const LabeledGraph& lg, const FeatureConfig& cfg, Rng& rng) {
  const int n = lg.g.vertex_count();
  AttributedGraph ag;
  ag.g = lg.g;
  ag.X = Eigen::MatrixXd::Zero(n, cfg.dx);
  for (int i = 0; i < n; ++i) {
    int type = lg.atoms.empty() ? draw_categorical(cfg.atom_prior, cfg.dx, rng)
                                : lg.atoms[static_cast<std::size_t>(i)];
    if (type < 0 || type >= cfg.dx)
      throw std::invalid_argument("attribute_graph: atom label outside feature dimension");
    ag.X(i, type) = 1.0;
  }
  for (int c = 0; c < cfg.df; ++c) ag.F.push_back(Eigen::MatrixXd::Zero(n, n));
  const auto& edges = lg.g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    int bond = lg.bonds.empty() ? draw_categorical(cfg.bond_prior, cfg.df, rng)
                                : lg.bonds[e];
    if (bond < 0 || bond >= cfg.df)
      throw std::invalid_argument("attribute_graph: bond label outside feature dimension");
    ag.F[static_cast<std::size_t>(bond)](edges[e].first, edges[e].second) = 1.0;
    ag.F[static_cast<std::size_t>(bond)](edges[e].second, edges[e].first) = 1.0;
  }
  return ag;
}

GraphState state_from_attributed(const AttributedGraph& ag) {
  GraphState s = GraphState::zeros(ag.n(), ag.dx(), ag.df());
  for (auto [u, v] : ag.g.edges()) {
    s.A(u, v) = 1.0;
    s.A(v, u) = 1.0;
  }
  s.X = ag.X;
  for (int c = 0; c < ag.df(); ++c) s.F[static_cast<std::size_t>(c)] = ag.F[static_cast<std::size_t>(c)];
  return s;
}

GraphState restrict_state(const GraphState& s, const std::vector<int>& idx) {
  const int n = static_cast<int>(idx.size());
  GraphState out = GraphState::zeros(n, s.dx(), s.df());
  for (int a = 0; a < n; ++a) {
    out.X.row(a) = s.X.row(idx[static_cast<std::size_t>(a)]);
    for (int b = 0; b < n; ++b) {
      out.A(a, b) = s.A(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
      for (int c = 0; c < s.df(); ++c)
        out.F[static_cast<std::size_t>(c)](a, b) =
            s.F[static_cast<std::size_t>(c)](idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc) {
  const int rows = static_cast<int>(doc.size());
  const int cols = rows > 0 ? static_cast<int>(doc[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = doc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  return m;
}

json state_to_json(const GraphState& s) {
  json doc;
  doc["A"] = matrix_to_json(s.A);
  doc["X"] = matrix_to_json(s.X);
  json f = json::array();
  for (const auto& channel : s.F) f.push_back(matrix_to_json(channel));
  doc["F"] = f;
  return doc;
}

GraphState state_from_json(const json& doc) {
  GraphState s;
  s.A = matrix_from_json(doc.at("A"));
  s.X = matrix_from_json(doc.at("X"));
  for (const auto& channel : doc.at("F")) s.F.push_back(matrix_from_json(channel));
  return s;
}

}  // namespace

int run_couple(const CoupleOptions& opt) {
  FeatureConfig fc = parse_feature_config(opt.config_path);
  std::vector<LabeledGraph> noise_raw = read_corpus(opt.noise_path);
  std::vector<LabeledGraph> target_raw = read_corpus(opt.target_path);
  if (noise_raw.size() != target_raw.size())
    throw std::invalid_argument("couple: corpus lengths must match");
  if (noise_raw.empty()) throw std::invalid_argument("couple: empty corpora");

  std::vector<AttributedGraph> noise, target;
  for (std::size_t i = 0; i < noise_raw.size(); ++i) {
    Rng rn = Rng::derive(opt.seed, kStageCoupleFeatures, graph_content_hash(noise_raw[i]));
    noise.push_back(attribute_graph(noise_raw[i], fc, rn));
    Rng rt = Rng::derive(opt.seed, kStageCoupleFeatures, graph_content_hash(target_raw[i]));
    target.push_back(attribute_graph(target_raw[i], fc, rt));
  }

  BatchFgwResult batch = batch_fgw(noise, target, opt.fgw, opt.threads);
  Permutation assignment = hungarian(batch.D);

  const int b = static_cast<int>(noise.size());
  json doc;
  doc["alpha"] = opt.fgw.alpha;
  doc["D"] = matrix_to_json(batch.D);
  doc["assignment"] = assignment.mapping();
  json pairs = json::array();
  for (int i = 0; i < b; ++i) {
    int j = assignment(i);
    const TransportPlan& plan = batch.plans[static_cast<std::size_t>(i) * b + static_cast<std::size_t>(j)];
    int budget = std::min(noise[static_cast<std::size_t>(i)].n(), target[static_cast<std::size_t>(j)].n());
    auto pairs_ij = align_nodes(plan, budget);
    std::vector<int> idx0, idx1;
    for (auto [a, c] : pairs_ij) {
      idx0.push_back(a);
      idx1.push_back(c);
    }
    json entry;
    entry["noise_index"] = i;
    entry["target_index"] = j;
    entry["n"] = budget;
    json corr = json::array();
    for (auto [a, c] : pairs_ij) corr.push_back(json::array({a, c}));
    entry["correspondence"] = corr;
    entry["s0"] = state_to_json(restrict_state(state_from_attributed(noise[static_cast<std::size_t>(i)]), idx0));
    entry["s1"] = state_to_json(restrict_state(state_from_attributed(target[static_cast<std::size_t>(j)]), idx1));
    pairs.push_back(std::move(entry));
  }
  doc["pairs"] = pairs;
  write_text_file(opt.out_path, doc.dump() + "\n");
  return 0;
}

namespace {

ChemistryTable parse_chem_config(const std::string& path) {
  ChemistryTable chem = ChemistryTable::defaults();
  if (path.empty()) return chem;
  json doc = json::parse(read_text_file(path));
  if (doc.contains("bond_orders")) {
    auto v = doc.at("bond_orders").get<std::vector<double>>();
    chem.bond_orders = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (doc.contains("max_valence")) {
    auto v = doc.at("max_valence").get<std::vector<double>>();
    chem.max_valence = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return chem;
}

/// Bond orders extended or truncated to `df` channels.
ChemistryTable chem_for_channels(ChemistryTable base, int df) {
  ChemistryTable out;
  out.max_valence = std::move(base.max_valence);
  out.bond_orders = Eigen::VectorXd::Ones(df);
  for (int c = 0; c < std::min<int>(static_cast<int>(base.bond_orders.size()), df); ++c)
    out.bond_orders(c) = base.bond_orders(c);
  return out;
}

}  // namespace

int run_flow(const FlowRunOptions& opt) {
  json doc = json::parse(read_text_file(opt.coupling_path));
  ChemistryTable chem = parse_chem_config(opt.config_path);
  std::vector<LabeledGraph> generated;
  double sum_vel = 0.0, sum_end = 0.0, sum_total = 0.0;

  std::uint64_t item = 0;
  for (const auto& entry : doc.at("pairs")) {
    GraphState s0 = state_from_json(entry.at("s0"));
    GraphState s1 = state_from_json(entry.at("s1"));
    Velocity delta = deltas(s0, s1);

    std::unique_ptr<VelocityField> field;
    if (opt.eps > 0.0) {
      Rng dir_rng = Rng::derive(opt.seed, kStageFlowDirection, item);
      Velocity u = random_unit_direction(s0.n(), s0.dx(), s0.df(), dir_rng.next_u64());
      field = std::make_unique<PerturbedField>(std::make_shared<IdealConstantField>(delta),
                                               opt.eps, std::move(u));
    } else {
      field = std::make_unique<IdealConstantField>(delta);
    }

    // Loss diagnostics of the integrating field at the path midpoint.
    auto [mid, target_vel] = flow_matching_targets(s0, s1, 0.5);
    Velocity v = field->evaluate(mid, 0.5);
    LossParts parts;
    parts.vel = loss_vel(v, target_vel, opt.weights);
    GraphState predicted = endpoint_prediction(mid, v, 0.5);
    parts.end = loss_end(predicted, s1, opt.weights);
    ChemistryTable chem_df = chem_for_channels(chem, s0.df());
    std::vector<int> predicted_types(static_cast<std::size_t>(predicted.n()), 0);
    for (int i = 0; i < predicted.n(); ++i) {
      int best = 0;
      for (int c = 1; c < predicted.dx(); ++c)
        if (predicted.X(i, c) > predicted.X(i, best)) best = c;
      predicted_types[static_cast<std::size_t>(i)] =
          std::min(best, static_cast<int>(chem_df.max_valence.size()) - 1);
    }
    parts.val = loss_val(predicted.A, predicted.F, predicted_types, chem_df);
    parts.atom = loss_atom(predicted.X, s1.X);
    sum_vel += parts.vel;
    sum_end += parts.end;
    sum_total += total_loss(parts, opt.weights);

    GraphState final_state = euler_integrate(*field, s0, opt.steps).activated;
    DiscreteProjection proj =
        project_discrete(final_state, chem_for_channels(chem, final_state.df()), opt.threshold);
    generated.push_back({proj.graph, proj.atom_types, proj.bond_types});
    ++item;
  }
  write_corpus(opt.out_path, generated);
  if (item > 0 && opt.print_summary) {
    json summary;
    summary["pairs"] = item;
    summary["mean_loss_vel"] = sum_vel / static_cast<double>(item);
    summary["mean_loss_end"] = sum_end / static_cast<double>(item);
    summary["mean_total_loss"] = sum_total / static_cast<double>(item);
    std::cout << summary.dump() << "\n";
  }
  return 0;
}

int run_eval(const EvalOptions& opt) {
  std::vector<LabeledGraph> gen = read_corpus(opt.gen_path);
  std::vector<LabeledGraph> train = read_corpus(opt.train_path);
  std::vector<LabeledGraph> test = read_corpus(opt.test_path);
  if (gen.empty() || train.empty() || test.empty())
    throw std::invalid_argument("eval: all three corpora must be nonempty");

  ChemistryTable chem = parse_chem_config(opt.config_path);

  int max_degree = 1;
  for (const auto* corpus : {&gen, &train, &test})
    for (const auto& g : *corpus)
      for (int v = 0; v < g.g.vertex_count(); ++v) max_degree = std::max(max_degree, g.g.degree(v));

  auto describe = [&](const std::vector<LabeledGraph>& corpus, DescriptorKind kind) {
    std::vector<GraphDescriptor> out;
    for (const auto& g : corpus) {
      switch (kind) {
        case DescriptorKind::DegreeHist: out.push_back(degree_hist(g.g, max_degree)); break;
        case DescriptorKind::ClusteringHist: out.push_back(clustering_hist(g.g, opt.clustering_bins)); break;
        case DescriptorKind::OrbitCounts: out.push_back(orbit_counts(g.g)); break;
      }
    }
    return out;
  };

  json doc;
  const char* names[3] = {"deg_ratio", "clus_ratio", "orbit_ratio"};
  const DescriptorKind kinds[3] = {DescriptorKind::DegreeHist, DescriptorKind::ClusteringHist,
                                   DescriptorKind::OrbitCounts};
  for (int k = 0; k < 3; ++k) {
    auto dg = describe(gen, kinds[k]);
    auto dtr = describe(train, kinds[k]);
    auto dte = describe(test, kinds[k]);
    double bw = median_pairwise_bandwidth({&dg, &dtr, &dte});
    RatioResult r = descriptor_ratio(dg, dtr, dte, bw);
    if (r.degenerate)
      doc[names[k]] = nullptr;
    else
      doc[names[k]] = r.value;
  }

  VunResult v = vun(gen, train, chem);
  doc["valid"] = v.valid_pct;
  doc["unique"] = v.unique_pct;
  doc["novel"] = v.novel_pct;
  write_text_file(opt.out_path, doc.dump() + "\n");
  return 0;
}

int run_verify(const VerifyOptions& opt) {
  SuiteReport report;
  if (opt.suite == "hom")
    report = verify_hom(opt.seed);
  else if (opt.suite == "fgw")
    report = verify_fgw(opt.seed);
  else if (opt.suite == "flow")
    report = verify_flow(opt.seed);
  else if (opt.suite == "all")
    report = verify_all(opt.seed);
  else
    throw std::invalid_argument("verify: unknown suite \"" + opt.suite + "\"");

  std::string text = report.to_json().dump(2) + "\n";
  if (opt.out_path.empty())
    std::cout << text;
  else
    write_text_file(opt.out_path, text);
  return report.all_pass() ? 0 : 1;
}

}  // namespace gfm
