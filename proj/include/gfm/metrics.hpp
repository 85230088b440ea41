#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gfm/flow.hpp"
#include "gfm/graph.hpp"
#include "gfm/json_io.hpp"

namespace gfm {

enum class DescriptorKind { DegreeHist, ClusteringHist, OrbitCounts };

struct GraphDescriptor {
  DescriptorKind kind;
  Eigen::VectorXd vector;
};

/// Normalized degree histogram over 0..max_degree; larger degrees land in
/// the top bucket.
GraphDescriptor degree_hist(const Graph& g, int max_degree);

/// Normalized histogram of per-node local clustering coefficients over
/// `bins` uniform cells of [0,1].
GraphDescriptor clustering_hist(const Graph& g, int bins = 100);

/// Mean per-node counts of the fifteen automorphism orbits of connected
/// graphlets on 2..4 vertices, by exhaustive subset enumeration.
GraphDescriptor orbit_counts(const Graph& g, int max_vertices = 64);

/// Biased squared maximum mean discrepancy with the Gaussian kernel
/// exp(-|x-y|^2 / (2 sigma^2)). Vectors of unequal length are zero-padded.
double mmd_squared(const std::vector<GraphDescriptor>& a, const std::vector<GraphDescriptor>& b,
                   double bandwidth);

/// Median pairwise distance over the pooled descriptor sets (never zero:
/// falls back to 1 when all descriptors coincide).
double median_pairwise_bandwidth(const std::vector<const std::vector<GraphDescriptor>*>& sets);

struct RatioResult {
  double value = 0.0;
  bool degenerate = false;  // reference discrepancy below 1e-15
};

/// MMD^2(gen, test) / MMD^2(train, test).
RatioResult descriptor_ratio(const std::vector<GraphDescriptor>& gen,
                             const std::vector<GraphDescriptor>& train,
                             const std::vector<GraphDescriptor>& test, double bandwidth);

struct VunResult {
  double valid_pct = 0.0;
  double unique_pct = 0.0;
  double novel_pct = 0.0;
};

/// Valence-cap validity, label-aware canonical uniqueness among the valid
/// samples, and novelty against the training corpus. Unlabeled graphs
/// default to atom type 0 and the first bond type.
VunResult vun(const std::vector<LabeledGraph>& samples, const std::vector<LabeledGraph>& train,
              const ChemistryTable& chem, int canon_bound = 12);

}  // namespace gfm
