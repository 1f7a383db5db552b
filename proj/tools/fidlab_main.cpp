// fidlab command line: fidelity and Bures computations, channel application,
// predual order verdicts, CAR tower stability, randomized sweeps and the
// self-test suite.  Results go to stdout as JSON; diagnostics go to stderr.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "fidlab/acceptance.hpp"
#include "fidlab/car.hpp"
#include "fidlab/config.hpp"
#include "fidlab/fidelity.hpp"
#include "fidlab/random.hpp"
#include "fidlab/sweep.hpp"

namespace {

using namespace fidlab;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool serial = false;
};

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg = load_run_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

DensityElement load_density(const std::string& path, const RunConfig& cfg) {
  AlgebraElement x = element_from_json(load_json_file(path), path);
  return DensityElement(x, cfg.psd_tol, cfg.trace_tol);
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

int run_fidelity(const std::string& sigma_path, const std::string& rho_path,
                 const std::string& routes_arg, const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  DensityElement sigma = load_density(sigma_path, cfg);
  DensityElement rho = load_density(rho_path, cfg);

  std::vector<std::string> wanted;
  if (routes_arg == "all") {
    wanted = {"direct", "mu", "block", "var1", "var2"};
  } else {
    std::string cur;
    for (char ch : routes_arg + ",") {
      if (ch == ',') {
        if (!cur.empty()) wanted.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
  }

  OptimizerConfig opt;
  opt.max_iterations = cfg.max_iterations;
  opt.opt_tol = cfg.opt_tol;

  Json routes = Json::object();
  Json diagnostics = Json::object();
  for (const std::string& route : wanted) {
    if (route == "direct") {
      routes["direct"] = fidelity(sigma, rho);
    } else if (route == "mu") {
      routes["mu"] = fidelity_via_mu(sigma, rho);
    } else if (route == "block") {
      BlockSupremumResult r = fidelity_block_supremum(sigma, rho, 64, cfg.seed);
      routes["block"] = r.value;
      diagnostics["block"] = Json{{"block_min_eigenvalue", r.block_min_eigenvalue},
                                  {"sampled_max", r.sampled_max},
                                  {"n_samples", r.n_samples}};
    } else if (route == "var1" || route == "var2") {
      VariationalWitness w = fidelity_variational(
          sigma, rho, route == "var1" ? VarRoute::Var1 : VarRoute::Var2, opt);
      routes[route] = w.value();
      diagnostics[route] = Json{{"objective", w.objective_value},
                                {"iterations", w.diag.iterations},
                                {"gradient_norm", w.diag.gradient_norm},
                                {"epsilon", w.diag.epsilon},
                                {"converged", w.diag.converged}};
    } else {
      throw ParseError("--routes: unknown route '" + route + "'");
    }
  }

  double disagreement = 0.0;
  for (auto a = routes.begin(); a != routes.end(); ++a) {
    for (auto b = routes.begin(); b != routes.end(); ++b) {
      disagreement =
          std::max(disagreement, std::abs(a->get<double>() - b->get<double>()));
    }
  }
  const double f = routes.contains("direct") ? routes["direct"].get<double>()
                                             : routes.begin()->get<double>();
  emit(Json{{"fidelity", f},
            {"routes", routes},
            {"max_disagreement", disagreement},
            {"bures", std::sqrt(std::max(0.0, 1.0 - f))},
            {"witness_diagnostics", diagnostics}});
  return 0;
}

int run_bures(const std::string& sigma_path, const std::string& rho_path,
              const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  DensityElement sigma = load_density(sigma_path, cfg);
  DensityElement rho = load_density(rho_path, cfg);
  const double f = fidelity(sigma, rho);
  emit(Json{{"fidelity", f}, {"bures", bures_distance(sigma, rho)}});
  return 0;
}

int run_channel_apply(const std::string& channel_path, const std::string& state_path,
                      const CommonOpts&) {
  KrausChannel ch = channel_from_json(load_json_file(channel_path), channel_path);
  AlgebraElement x = element_from_json(load_json_file(state_path), state_path);
  emit(element_to_json(apply(ch, x)));
  return 0;
}

int run_order(const std::string& input_path, const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  PredualMatrix omega = predual_from_json(load_json_file(input_path), input_path);
  PredualPositivity pred = is_predual_positive(omega, cfg.psd_tol);
  OperatorMatrixResult op = operator_matrix(omega, cfg.psd_tol);
  emit(Json{{"predual_positive", pred.verdict},
            {"operator_matrix_psd", op.psd},
            {"choi_min_eig", pred.min_choi_eigenvalue},
            {"operator_min_eig", op.min_eigenvalue}});
  return 0;
}

int run_sweep(const std::string& kind, int d, int n, const std::string& source_arg,
              const std::string& channel_path, const std::string& csv_path,
              double tol, const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  SweepConfig sc;
  sc.margin_tol = cfg.margin_tol;
  sc.parallel = !opts.serial;

  if (kind == "preserve") {
    if (channel_path.empty()) {
      throw ParseError("sweep preserve: --channel is required");
    }
    KrausChannel ch = channel_from_json(load_json_file(channel_path), channel_path);
    PreservationReport rep =
        preservation_classify(ch, n, cfg.seed, tol, sc.parallel);
    emit(rep.to_json());
    return 0;  // classification, not failure
  }

  SweepReport report;
  if (kind == "monotonicity") {
    std::optional<KrausChannel> user;
    ChannelSource source = ChannelSource::RandomCptp;
    if (!channel_path.empty()) {
      user = channel_from_json(load_json_file(channel_path), channel_path);
      source = ChannelSource::UserSupplied;
    } else if (source_arg == "unital-positive") {
      source = ChannelSource::RandomUnitalPositive;
    } else if (source_arg != "cptp") {
      throw ParseError("sweep: unknown --source '" + source_arg + "'");
    }
    report = monotonicity_sweep(source, d, n, cfg.seed, sc,
                                user ? &*user : nullptr);
  } else if (kind == "metric") {
    sc.margin_tol = 1e-10;
    report = metric_sweep(d, n, cfg.seed, sc);
  } else {
    throw ParseError("sweep: unknown kind '" + kind + "'");
  }

  if (!csv_path.empty()) report.write_csv(csv_path);
  emit(report.to_json(/*include_runtime=*/false));
  std::cerr << "sweep " << kind << ": " << report.runtime_ms << " ms, "
            << (report.pass ? "pass" : "FAIL") << "\n";
  return report.pass ? 0 : kExitFailure;
}

int run_car(int level, int depth, const std::string& sigma_path,
            const std::string& rho_path, const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  CarLevel lvl = car_level(level, cfg.car_max_level);
  DensityElement sigma = sigma_path.empty()
                             ? [&] {
                                 Rng rng(derive_seed(cfg.seed, 1));
                                 return random_density(rng, lvl.algebra);
                               }()
                             : load_density(sigma_path, cfg);
  DensityElement rho = rho_path.empty()
                           ? [&] {
                               Rng rng(derive_seed(cfg.seed, 2));
                               return random_density(rng, lvl.algebra);
                             }()
                           : load_density(rho_path, cfg);
  std::vector<double> values =
      fidelity_stability(sigma, rho, depth, cfg.car_max_level);
  double lo = values[0], hi = values[0];
  Json vals = Json::array();
  for (double v : values) {
    vals.push_back(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  emit(Json{{"level", level}, {"depth", depth}, {"values", vals},
            {"max_spread", hi - lo}});
  return 0;
}

int run_selftest(const std::string& criteria_arg, const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  std::vector<std::string> only;
  if (!criteria_arg.empty() && criteria_arg != "all") {
    std::string cur;
    for (char ch : criteria_arg + ",") {
      if (ch == ',') {
        if (!cur.empty()) only.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
  }
  std::vector<CriterionResult> results =
      run_acceptance(cfg, /*parallel=*/!opts.serial, only);
  std::cerr << format_results(results);
  Json list = Json::array();
  for (const auto& r : results) {
    list.push_back(Json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}});
  }
  const bool ok = all_pass(results);
  emit(Json{{"criteria", list}, {"pass", ok}});
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fidelity workbench for tracial matrix algebras"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts common;
  app.add_option("--config", common.config_path,
                 "config JSON path (overrides FIDLAB_CONFIG)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "base seed");
  app.add_flag("--serial", common.serial, "disable OpenMP parallelism");

  std::string sigma_path, rho_path, routes = "all";
  auto* fid = app.add_subcommand("fidelity", "fidelity of two density elements");
  fid->add_option("--sigma", sigma_path, "state JSON")->required();
  fid->add_option("--rho", rho_path, "state JSON")->required();
  fid->add_option("--routes", routes, "all|direct|mu|var1|var2|block[,...]");

  auto* bures = app.add_subcommand("bures", "Bures distance of two density elements");
  bures->add_option("--sigma", sigma_path, "state JSON")->required();
  bures->add_option("--rho", rho_path, "state JSON")->required();

  std::string channel_path, state_path;
  auto* channel = app.add_subcommand("channel", "channel operations");
  auto* chan_apply = channel->add_subcommand("apply", "apply a Kraus channel");
  chan_apply->add_option("--channel", channel_path, "channel JSON")->required();
  chan_apply->add_option("--state", state_path, "element JSON")->required();

  std::string order_path;
  auto* order = app.add_subcommand("order", "predual matrix order verdicts");
  order->add_option("--input", order_path, "functional matrix JSON")->required();

  std::string sweep_kind, sweep_source = "cptp", sweep_channel, sweep_csv;
  int sweep_d = 2, sweep_n = 100;
  double preserve_tol = 1e-8;
  auto* sweep = app.add_subcommand("sweep", "randomized theorem sweeps");
  sweep->add_option("kind", sweep_kind, "monotonicity|metric|preserve")->required();
  sweep->add_option("-d,--dim", sweep_d, "matrix dimension");
  sweep->add_option("-n,--trials", sweep_n, "number of trials");
  sweep->add_option("--source", sweep_source, "cptp|unital-positive");
  sweep->add_option("--channel", sweep_channel, "channel JSON (preserve/user source)");
  sweep->add_option("--csv", sweep_csv, "write per-trial margins to CSV");
  sweep->add_option("--tol", preserve_tol, "preservation tolerance");

  int car_level_arg = 1, car_depth = 3;
  std::string car_sigma, car_rho;
  auto* car = app.add_subcommand("car", "fidelity stability up the CAR tower");
  car->add_option("--level,--car-level", car_level_arg, "starting level (>= 1)");
  car->add_option("--depth", car_depth, "number of embeddings");
  car->add_option("--sigma", car_sigma, "state JSON (random when omitted)");
  car->add_option("--rho", car_rho, "state JSON (random when omitted)");

  std::string selftest_criteria;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--criteria", selftest_criteria,
                       "comma-separated criterion ids (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  if (*seed_opt) common.seed = seed_value;

  try {
    if (*fid) return run_fidelity(sigma_path, rho_path, routes, common);
    if (*bures) return run_bures(sigma_path, rho_path, common);
    if (*chan_apply) return run_channel_apply(channel_path, state_path, common);
    if (*order) return run_order(order_path, common);
    if (*sweep) {
      return run_sweep(sweep_kind, sweep_d, sweep_n, sweep_source, sweep_channel,
                       sweep_csv, preserve_tol, common);
    }
    if (*car) return run_car(car_level_arg, car_depth, car_sigma, car_rho, common);
    if (*selftest) return run_selftest(selftest_criteria, common);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const AlgebraMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotPositive& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotUnitTrace& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LevelMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
