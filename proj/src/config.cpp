#include "fidlab/config.hpp"

#include <cstdlib>

namespace fidlab {

void RunConfig::apply_json(const Json& j) {
  if (!j.is_object()) {
    throw ParseError("config: expected a flat JSON object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "psd_tol") {
      psd_tol = it->get<double>();
    } else if (key == "trace_tol") {
      trace_tol = it->get<double>();
    } else if (key == "opt_tol") {
      opt_tol = it->get<double>();
    } else if (key == "margin_tol") {
      margin_tol = it->get<double>();
    } else if (key == "seed") {
      seed = it->get<std::uint64_t>();
    } else if (key == "max_iterations") {
      max_iterations = it->get<int>();
    } else if (key == "car_max_level") {
      car_max_level = it->get<int>();
    } else {
      throw ParseError("config." + key + ": unknown field");
    }
  }
}

Json RunConfig::to_json() const {
  return Json{{"psd_tol", psd_tol},
              {"trace_tol", trace_tol},
              {"opt_tol", opt_tol},
              {"margin_tol", margin_tol},
              {"seed", seed},
              {"max_iterations", max_iterations},
              {"car_max_level", car_max_level}};
}

std::string RunConfig::validate() const {
  auto in_range = [](double v, double lo, double hi) { return v > lo && v <= hi; };
  if (!in_range(psd_tol, 0.0, 1e-6)) return "psd_tol outside (0, 1e-6]";
  if (!in_range(trace_tol, 0.0, 1e-3)) return "trace_tol outside (0, 1e-3]";
  if (!in_range(opt_tol, 0.0, 1e-2)) return "opt_tol outside (0, 1e-2]";
  if (!in_range(margin_tol, 0.0, 1e-6)) return "margin_tol outside (0, 1e-6]";
  if (max_iterations < 1) return "max_iterations must be >= 1";
  if (car_max_level < 1 || car_max_level > 24) return "car_max_level outside [1, 24]";
  return "";
}

RunConfig load_run_config(const std::string& explicit_path) {
  RunConfig cfg;
  std::string path = explicit_path;
  if (path.empty()) {
    if (const char* env = std::getenv("FIDLAB_CONFIG")) path = env;
  }
  if (!path.empty()) {
    cfg.apply_json(load_json_file(path));
  }
  return cfg;
}

}  // namespace fidlab
