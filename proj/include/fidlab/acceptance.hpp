#pragma once

#include <string>
#include <vector>

#include "fidlab/config.hpp"

namespace fidlab {

struct CriterionResult {
  std::string id;
  std::string name;
  bool pass = false;
  double runtime_s = 0.0;
  std::string detail;
};

/// Runs the acceptance criteria (all of them, or the subset named in `only`)
/// and returns one result per criterion.  Thresholds are fixed in code; the
/// config contributes the base seed, iteration limits and the sanity check.
std::vector<CriterionResult> run_acceptance(const RunConfig& config,
                                            bool parallel = true,
                                            const std::vector<std::string>& only = {});

/// Pass/fail table, one line per criterion.
std::string format_results(const std::vector<CriterionResult>& results);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace fidlab
