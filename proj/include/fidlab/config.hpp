#pragma once

#include <cstdint>
#include <string>

#include "fidlab/json_io.hpp"

namespace fidlab {

/// Tunable tolerances and limits.  Defaults are compiled in; a flat JSON
/// object (FIDLAB_CONFIG or --config) overrides them, and explicit command
/// line flags override the file.
struct RunConfig {
  double psd_tol = 1e-10;
  double trace_tol = 1e-9;
  double opt_tol = 1e-6;
  double margin_tol = 1e-9;
  std::uint64_t seed = 1;
  int max_iterations = 500;
  int car_max_level = 10;

  void apply_json(const Json& j);
  Json to_json() const;

  /// Empty when every value lies in its sane range; otherwise a description
  /// of the first offending entry.
  std::string validate() const;
};

/// Defaults, overridden by the file at FIDLAB_CONFIG when the variable is
/// set, overridden again by an explicit path when one is given.
RunConfig load_run_config(const std::string& explicit_path = "");

}  // namespace fidlab
