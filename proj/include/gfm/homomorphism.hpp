#pragma once

#include <string>
#include <vector>

#include "gfm/graph.hpp"

namespace gfm {

struct HomConfig {
  int pattern_bound = 5;  // enumeration is |V(host)|^|V(pattern)|
  int host_bound = 64;
};

/// Number of maps V(pattern) -> V(host) sending every pattern edge to a
/// host edge, counted by exhaustive backtracking. This is the ground
/// truth the edit theorems are checked against.
long long hom_count(const Graph& pattern, const Graph& host, const HomConfig& cfg = {});

/// hom_count / |V(host)|^|V(pattern)|.
double hom_density(const Graph& pattern, const Graph& host, const HomConfig& cfg = {});

/// True iff every vertex lies in at least one triangle.
bool is_triangle_covered(const Graph& g);

enum class EditKind { Star, Ring };

struct EditHomPrediction {
  long long vertex_homs;
  long long edge_homs;
};

/// Closed-form effect of an edit on single-vertex and single-edge
/// homomorphism counts: stars adding m vertices give (V+m, E+2m); k rings
/// adding m vertices give (V+m, E+2(m+k)).
EditHomPrediction predict_edit_homs(EditKind kind, long long vertex_homs_before,
                                    long long edge_homs_before, long long added_vertices,
                                    long long rings = 0);

struct NamedPattern {
  std::string name;
  Graph graph;
};

struct PreservationCheck {
  std::string pattern;
  long long before = 0;
  long long after = 0;
  bool counts_equal = false;
  double density_after = 0.0;
  double density_scaled = 0.0;  // (n/(n+m))^|V(F)| * density(F, before)
  bool density_ok = false;
};

struct PreservationReport {
  std::vector<PreservationCheck> checks;
  bool all_ok = true;
};

/// Checks that an edit which adds no triangles leaves triangle-covered
/// pattern counts unchanged and scales densities by (n/(n+m))^|V(F)|.
/// Rejects ring edits with c <= 3 and patterns that are not
/// triangle-covered.
PreservationReport verify_triangle_covered_preservation(const Graph& before, const Graph& after,
                                                        const std::vector<NamedPattern>& patterns,
                                                        EditKind kind, int ring_size = 0,
                                                        double tol = 1e-12);

}  // namespace gfm
