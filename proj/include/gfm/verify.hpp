#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gfm {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string details;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  nlohmann::json extra;  // suite-specific payload merged into the report

  bool all_pass() const;
  nlohmann::json to_json() const;
};

/// Homomorphism batteries: preservation of triangle-covered pattern counts
/// under star/ring edits, and closed-form vertex/edge count predictions
/// against brute force.
SuiteReport verify_hom(std::uint64_t seed);

/// Coupling batteries: zero self-distance, relabeling invariance at the
/// objective and solver level, and planted-assignment recovery.
SuiteReport verify_fgw(std::uint64_t seed);

/// Flow batteries: exact endpoint recovery under the constant field and
/// the perturbed-integration error bound.
SuiteReport verify_flow(std::uint64_t seed);

/// All three suites concatenated.
SuiteReport verify_all(std::uint64_t seed);

}  // namespace gfm
