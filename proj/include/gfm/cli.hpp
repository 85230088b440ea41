#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfm/coupling.hpp"
#include "gfm/flow.hpp"
#include "gfm/graphette.hpp"

namespace gfm {

struct SampleOptions {
  std::string config_path;  // prior config document
  std::string out_path;
  int n_graphs = 1;
  int n_nodes = 8;
  std::uint64_t seed = 0;
};

/// Writes a JSON-lines corpus of seeded prior samples.
int run_sample(const SampleOptions& opt);

struct CoupleOptions {
  std::string noise_path;
  std::string target_path;
  std::string out_path;
  std::string config_path;  // optional feature/prior settings
  FgwConfig fgw;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Computes all pairwise fused distances, the batch assignment, and the
/// per-pair node correspondences with both endpoint states; writes one
/// JSON document.
int run_couple(const CoupleOptions& opt);

struct FlowRunOptions {
  std::string coupling_path;
  std::string out_path;
  std::string config_path;  // optional chemistry table for the projection
  int steps = 50;
  double eps = 0.0;
  double threshold = 0.5;
  LossWeights weights;
  std::uint64_t seed = 0;
  bool print_summary = true;  // one JSON line of loss diagnostics on stdout
};

/// Integrates each coupled pair with the displacement field (optionally
/// eps-perturbed), projects to discrete labeled graphs, and writes a
/// JSON-lines corpus.
int run_flow(const FlowRunOptions& opt);

struct EvalOptions {
  std::string gen_path;
  std::string train_path;
  std::string test_path;
  std::string out_path;
  std::string config_path;  // optional chemistry table
  int clustering_bins = 100;
};

/// Writes {deg_ratio, clus_ratio, orbit_ratio, valid, unique, novel}.
int run_eval(const EvalOptions& opt);

struct VerifyOptions {
  std::string suite = "all";  // hom | fgw | flow | all
  std::string out_path;
  std::uint64_t seed = 0;
};

/// Runs a verification suite; returns 1 when any check fails.
int run_verify(const VerifyOptions& opt);

/// Parses a prior config document (inline kernel grid or named prior).
Graphette parse_prior_config(const std::string& json_text);

}  // namespace gfm
