#include "fidlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "fidlab/car.hpp"
#include "fidlab/fidelity.hpp"
#include "fidlab/predual.hpp"
#include "fidlab/random.hpp"
#include "fidlab/sweep.hpp"

namespace fidlab {

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& msg) {
    pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << msg;
  }
  void note(const std::string& msg) {
    if (detail.tellp() > 0) detail << "; ";
    detail << msg;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

TracialAlgebra two_block_algebra() {
  return TracialAlgebra({{2, 1.0}, {3, 0.5}});
}

// ---- criterion: sanity ------------------------------------------------

Check check_sanity(const RunConfig& cfg, bool) {
  Check c;
  const std::string msg = cfg.validate();
  if (!msg.empty()) {
    c.fail("config rejected: " + msg);
    return c;
  }
  // the configured tolerances must still detect a plainly indefinite element
  TracialAlgebra m2 = TracialAlgebra::single_block(2);
  Matrix ind(2, 2);
  ind << 1, 0, 0, -1;
  AlgebraElement x = AlgebraElement::from_block(m2, 0, ind);
  if (is_positive(x, cfg.psd_tol)) {
    c.fail("psd_tol accepts diag(1,-1) as positive");
  }
  try {
    DensityElement bad(AlgebraElement::identity(m2), cfg.psd_tol, cfg.trace_tol);
    (void)bad;
    c.fail("trace_tol accepts tau = 2 as a unit trace");
  } catch (const NotUnitTrace&) {
  }
  return c;
}

// ---- criterion 1: five-path agreement ---------------------------------

Check check_five_path(const RunConfig& cfg, bool parallel) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  OptimizerConfig opt;
  opt.max_iterations = cfg.max_iterations;

  struct Job {
    TracialAlgebra algebra;
    int n_pairs;
  };
  std::vector<Job> jobs;
  for (int d : {2, 3, 8, 16}) {
    jobs.push_back({TracialAlgebra::single_block(d), 200});
  }
  jobs.push_back({two_block_algebra(), 50});

  double worst_all = 0.0, worst_exact = 0.0;
  for (const auto& job : jobs) {
    std::vector<double> all_dev(job.n_pairs, 0.0), exact_dev(job.n_pairs, 0.0);
    run_indexed(
        job.n_pairs,
        [&](long t) {
          Rng rng(derive_seed(cfg.seed, 1000 + t + 131 * job.algebra.total_dim()));
          DensityElement sigma = random_density(rng, job.algebra);
          DensityElement rho = random_density(rng, job.algebra);
          const double f_direct = fidelity(sigma, rho);
          const double f_mu = fidelity_via_mu(sigma, rho);
          const double f_block = fidelity_block_supremum(sigma, rho, 8,
                                                         derive_seed(cfg.seed, t))
                                     .value;
          const double f_var1 =
              fidelity_variational(sigma, rho, VarRoute::Var1, opt).value();
          const double f_var2 =
              fidelity_variational(sigma, rho, VarRoute::Var2, opt).value();
          const double values[5] = {f_direct, f_mu, f_block, f_var1, f_var2};
          double dev_all = 0.0;
          for (int a = 0; a < 5; ++a) {
            for (int b = a + 1; b < 5; ++b) {
              dev_all = std::max(dev_all, std::abs(values[a] - values[b]));
            }
          }
          all_dev[t] = dev_all;
          exact_dev[t] = std::max({std::abs(f_direct - f_mu),
                                   std::abs(f_direct - f_block),
                                   std::abs(f_mu - f_block)});
        },
        parallel);
    for (long t = 0; t < job.n_pairs; ++t) {
      worst_all = std::max(worst_all, all_dev[t]);
      worst_exact = std::max(worst_exact, exact_dev[t]);
    }
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (worst_all > 1e-6) c.fail("five-route disagreement " + fmt(worst_all) + " > 1e-6");
  if (worst_exact > 1e-10) {
    c.fail("non-variational disagreement " + fmt(worst_exact) + " > 1e-10");
  }
  if (secs > 60.0) c.fail("runtime " + fmt(secs) + "s > 60s");
  c.note("max disagreement " + fmt(worst_all) + " (exact routes " + fmt(worst_exact) +
         ")");
  return c;
}

// ---- criterion 2: basic fidelity axioms --------------------------------

Check check_axioms(const RunConfig& cfg, bool parallel) {
  Check c;
  const int n = 200;
  std::vector<double> sym(n, 0.0), low(n, 0.0), high(n, 0.0);
  TracialAlgebra algebras[3] = {TracialAlgebra::single_block(2),
                                TracialAlgebra::single_block(5),
                                two_block_algebra()};
  run_indexed(
      n,
      [&](long t) {
        Rng rng(derive_seed(cfg.seed, 2000 + t));
        const TracialAlgebra& alg = algebras[t % 3];
        DensityElement sigma = random_density(rng, alg);
        DensityElement rho = random_density(rng, alg);
        const double f = fidelity(sigma, rho);
        sym[t] = std::abs(f - fidelity(rho, sigma));
        low[t] = f;
        high[t] = f;
      },
      parallel);
  for (long t = 0; t < n; ++t) {
    if (sym[t] > 1e-10) c.fail("symmetry deviation " + fmt(sym[t]));
    if (low[t] < -1e-12 || high[t] > 1.0 + 1e-9) c.fail("fidelity out of range");
  }

  // zero iff orthogonal, on constructed and near-orthogonal pairs
  Rng rng(derive_seed(cfg.seed, 2999));
  for (int rep = 0; rep < 20; ++rep) {
    const TracialAlgebra& alg = algebras[rep % 3];
    auto [a, b] = random_orthogonal_densities(rng, alg);
    if (fidelity(a, b) > 1e-8) c.fail("orthogonal pair with positive fidelity");
    if (!are_orthogonal(a.element(), b.element(), 1e-6)) {
      c.fail("constructed pair not orthogonal");
    }
    const double delta = 1e-4;
    DensityElement mixed(a.element() * (1.0 - delta) + b.element() * delta);
    if (fidelity(mixed, b) <= 1e-8) c.fail("near-orthogonal pair with zero fidelity");
    if (are_orthogonal(mixed.element(), b.element(), 1e-6)) {
      c.fail("near-orthogonal pair flagged orthogonal");
    }
  }

  // one iff equal, on perturbation families
  for (int rep = 0; rep < 20; ++rep) {
    const TracialAlgebra& alg = algebras[rep % 3];
    DensityElement sigma = random_density(rng, alg);
    if (fidelity(sigma, sigma) < 1.0 - 1e-10) c.fail("F(s,s) below 1 - 1e-10");
    AlgebraElement h = random_hermitian(rng, alg);
    h = h - AlgebraElement::identity(alg) *
                (trace(h).real() / alg.total_trace());  // traceless direction
    for (double delta : {1e-7, 1e-3}) {
      AlgebraElement perturbed = sigma.element() + h * delta;
      if (!is_positive(perturbed, 1e-8)) continue;
      DensityElement rho(perturbed, 1e-8);
      if (fidelity(sigma, rho) >= 1.0 - 1e-10 &&
          trace_norm(sigma.element() - rho.element()) > 1e-4) {
        c.fail("near-unit fidelity with trace distance above 1e-4");
      }
    }
  }
  return c;
}

// ---- criterion 3: monotonicity ------------------------------------------

Check check_monotonicity(const RunConfig& cfg, bool parallel) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  SweepConfig sc;
  sc.margin_tol = 1e-9;
  sc.parallel = parallel;
  double worst = std::numeric_limits<double>::infinity();
  for (int d : {2, 4, 8}) {
    SweepReport r = monotonicity_sweep(ChannelSource::RandomCptp, d, 1000,
                                       derive_seed(cfg.seed, 30 + d), sc);
    worst = std::min(worst, r.min_margin);
    if (!r.pass) c.fail("d=" + std::to_string(d) + " min margin " + fmt(r.min_margin));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > 120.0) c.fail("runtime " + fmt(secs) + "s > 120s");
  c.note("min margin " + fmt(worst));
  return c;
}

// ---- criterion 4: Bures metric -------------------------------------------

Check check_bures(const RunConfig& cfg, bool parallel) {
  Check c;
  SweepConfig sc;
  sc.margin_tol = 1e-10;
  sc.parallel = parallel;
  for (int d : {2, 3}) {
    SweepReport r = metric_sweep(d, 1000, derive_seed(cfg.seed, 40 + d), sc);
    if (!r.pass) {
      c.fail("d=" + std::to_string(d) + " triangle margin " + fmt(r.min_margin));
    }
    c.note("d=" + std::to_string(d) + " margin " + fmt(r.min_margin));
  }
  return c;
}

// ---- criterion 5: predual order examples ---------------------------------

Check check_predual(const RunConfig&, bool) {
  Check c;
  PredualMatrix omega = omega_example();
  PredualMatrix delta = delta_example();

  PredualPositivity omega_pos = is_predual_positive(omega);
  if (!omega_pos.verdict) c.fail("omega not predual-positive");
  OperatorMatrixResult omega_op = operator_matrix(omega);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(omega_op.blocks[0]);
  const double expect[4] = {-1.0, 1.0, 1.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    if (std::abs(eig.eigenvalues()(i) - expect[i]) > 1e-12) {
      c.fail("omega operator eigenvalue " + fmt(eig.eigenvalues()(i)));
    }
  }
  if (omega_op.psd) c.fail("omega operator matrix reported PSD");

  PredualPositivity delta_pos = is_predual_positive(delta);
  if (delta_pos.verdict) c.fail("delta reported predual-positive");
  if (delta_pos.min_choi_eigenvalue > -0.5) {
    c.fail("delta lift Choi minimum " + fmt(delta_pos.min_choi_eigenvalue));
  }
  OperatorMatrixResult delta_op = operator_matrix(delta);
  if (!delta_op.psd) c.fail("delta operator matrix not PSD");
  if (std::abs(delta_op.min_eigenvalue) > 1e-12) {
    c.fail("delta operator minimum eigenvalue " + fmt(delta_op.min_eigenvalue));
  }
  return c;
}

// ---- criterion 6: Schwarz / 2-positive gap --------------------------------

Check check_schwarz_gap(const RunConfig& cfg, bool) {
  Check c;
  TracialAlgebra m2 = TracialAlgebra::single_block(2);
  LinearMapOnAlgebra avg = LinearMapOnAlgebra::transpose_map(m2)
                               .scaled(0.5)
                               .plus(LinearMapOnAlgebra::trace_collapse(m2).scaled(0.5));
  SchwarzCertificate sch =
      is_schwarz_sampled(avg, 10000, derive_seed(cfg.seed, 6), 1e-10);
  if (!sch.verdict) {
    c.fail("Schwarz violation found: " + fmt(sch.worst_violation));
  }
  CpCertificate cp = is_completely_positive(avg);
  if (cp.verdict) c.fail("transpose-average reported completely positive");
  if (std::abs(cp.min_choi_eigenvalue + 0.25) > 1e-12) {
    c.fail("Choi minimum " + fmt(cp.min_choi_eigenvalue) + " != -0.25");
  }
  c.note("worst Schwarz slack " + fmt(sch.worst_violation) + ", Choi min " +
         fmt(cp.min_choi_eigenvalue));
  return c;
}

// ---- criterion 7: unitary recovery ----------------------------------------

Check check_unitary_recovery(const RunConfig& cfg, bool parallel) {
  Check c;
  for (int d : {2, 3, 4}) {
    TracialAlgebra alg = TracialAlgebra::single_block(d);
    const int n_channels = 100;
    std::vector<double> residuals(n_channels, 0.0);
    std::vector<int> verdicts(n_channels, 0);
    run_indexed(
        n_channels,
        [&](long t) {
          Rng rng(derive_seed(cfg.seed, 700 + 100 * d + t));
          AlgebraElement u = random_unitary(rng, alg);
          KrausChannel ch(alg, {u});
          PreservationReport rep =
              preservation_classify(ch, 32, derive_seed(cfg.seed, 7000 + t), 1e-8,
                                    /*parallel=*/false);
          if (rep.verdict != PreservationVerdict::Preserving || !rep.recovery_ok) {
            verdicts[t] = 1;
            return;
          }
          AlgebraElement got = element_from_json(rep.recovered_unitary);
          // align the global phase before comparing
          Complex overlap = (u.block(0).adjoint() * got.block(0)).trace();
          Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap)
                                                : Complex(1.0, 0.0);
          residuals[t] = (got.block(0) - phase * u.block(0)).norm();
        },
        parallel);
    for (int t = 0; t < n_channels; ++t) {
      if (verdicts[t] != 0) {
        c.fail("d=" + std::to_string(d) + ": unitary channel not recovered");
        break;
      }
      if (residuals[t] > 1e-8) {
        c.fail("d=" + std::to_string(d) + ": recovery residual " + fmt(residuals[t]));
        break;
      }
    }
  }

  TracialAlgebra m2 = TracialAlgebra::single_block(2);
  for (double p : {0.1, 0.5, 1.0}) {
    KrausChannel depol = depolarizing_channel(m2, p);
    PreservationReport rep =
        preservation_classify(depol, 64, derive_seed(cfg.seed, 77), 1e-8, false);
    if (rep.verdict != PreservationVerdict::StrictlyIncreasingSomewhere) {
      c.fail("depolarizing p=" + fmt(p) + " not classified as increasing");
    } else if (rep.witness.is_null()) {
      c.fail("depolarizing p=" + fmt(p) + " missing witness pair");
    }
  }
  return c;
}

// ---- criterion 8: CAR tower ------------------------------------------------

Check check_car(const RunConfig& cfg, bool parallel) {
  Check c;
  for (int k = 1; k <= 10; ++k) {
    CarLevel level = car_level(k, cfg.car_max_level);
    const double t = trace(AlgebraElement::identity(level.algebra)).real();
    if (t != 1.0) c.fail("tau_k(1) != 1 at level " + std::to_string(k));
  }
  const int n = 50;
  std::vector<double> spread(n, 0.0);
  run_indexed(
      n,
      [&](long t) {
        Rng rng(derive_seed(cfg.seed, 800 + t));
        CarLevel level = car_level(1, cfg.car_max_level);
        DensityElement sigma = random_density(rng, level.algebra);
        DensityElement rho = random_density(rng, level.algebra);
        std::vector<double> vals =
            fidelity_stability(sigma, rho, 3, cfg.car_max_level);
        double lo = vals[0], hi = vals[0];
        for (double v : vals) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        spread[t] = hi - lo;
      },
      parallel);
  for (int t = 0; t < n; ++t) {
    if (spread[t] > 1e-10) c.fail("fidelity drift " + fmt(spread[t]) + " over tower");
  }
  return c;
}

// ---- criterion 9: trace bounds ----------------------------------------------

Check check_trace_bounds(const RunConfig& cfg, bool parallel) {
  Check c;
  const int n = 150;
  std::vector<double> slack(n, 0.0), unit_slack(n, 0.0);
  TracialAlgebra algebras[3] = {TracialAlgebra::single_block(2),
                                TracialAlgebra::single_block(4),
                                two_block_algebra()};
  run_indexed(
      n,
      [&](long t) {
        Rng rng(derive_seed(cfg.seed, 900 + t));
        const TracialAlgebra& alg = algebras[t % 3];
        DensityElement sigma = random_density(rng, alg);
        DensityElement rho = random_density(rng, alg);
        const double sa = 0.5 + 2.0 * rng.uniform();
        const double sb = 0.5 + 2.0 * rng.uniform();
        auto [f, bound] = fidelity_bounds(sigma.element() * sa, rho.element() * sb);
        slack[t] = f - bound;
        unit_slack[t] = fidelity(sigma, rho) - 1.0;
      },
      parallel);
  for (int t = 0; t < n; ++t) {
    if (slack[t] > 1e-10) c.fail("geometric-mean bound violated by " + fmt(slack[t]));
    if (unit_slack[t] > 1e-9) c.fail("unit bound violated by " + fmt(unit_slack[t]));
  }
  return c;
}

// ---- criterion 10: Var1 gradient check ----------------------------------------

Check check_gradient(const RunConfig& cfg, bool parallel) {
  Check c;
  const int n = 20;
  TracialAlgebra alg = TracialAlgebra::single_block(3);
  std::vector<double> rel_err(n, 0.0);
  run_indexed(
      n,
      [&](long t) {
        Rng rng(derive_seed(cfg.seed, 1000000 + t));
        // strictly positive pair
        AlgebraElement one = AlgebraElement::identity(alg);
        DensityElement sigma(random_density(rng, alg).element() * 0.9 +
                             one * (0.1 / alg.total_trace()));
        DensityElement rho(random_density(rng, alg).element() * 0.9 +
                           one * (0.1 / alg.total_trace()));
        AlgebraElement y =
            apply_spectral(random_hermitian(rng, alg) * 0.3,
                           [](double v) { return std::exp(v); });
        AlgebraElement y_inv =
            apply_spectral(y, [](double v) { return 1.0 / v; });
        AlgebraElement grad_an =
            rho.element() - y_inv * sigma.element() * y_inv;

        auto objective = [&](const AlgebraElement& w) {
          AlgebraElement w_inv = apply_spectral(w, [](double v) { return 1.0 / v; });
          return trace(rho.element() * w).real() +
                 trace(sigma.element() * w_inv).real();
        };

        // central finite differences over a Hermitian basis
        const double step = 1e-5;
        const int d = alg.block_dim(0);
        AlgebraElement grad_fd = AlgebraElement::zero(alg);
        const double w0 = alg.block_weight(0);
        for (int i = 0; i < d; ++i) {
          for (int j = i; j < d; ++j) {
            std::vector<Matrix> dirs;
            Matrix m = Matrix::Zero(d, d);
            if (i == j) {
              m(i, i) = 1.0;
              dirs.push_back(m);
            } else {
              m(i, j) = m(j, i) = 1.0 / std::sqrt(2.0);
              dirs.push_back(m);
              m.setZero();
              m(i, j) = Complex(0.0, -1.0 / std::sqrt(2.0));
              m(j, i) = Complex(0.0, 1.0 / std::sqrt(2.0));
              dirs.push_back(m);
            }
            for (const Matrix& dm : dirs) {
              AlgebraElement k = AlgebraElement::from_block(alg, 0, dm);
              const double dd =
                  (objective(y + k * step) - objective(y - k * step)) / (2.0 * step);
              // tau-orthonormal expansion: coefficient = directional / weight
              grad_fd = grad_fd + k * (dd / w0);
            }
          }
        }
        rel_err[t] = hs_norm(grad_fd - grad_an) / std::max(hs_norm(grad_an), 1e-12);
      },
      parallel);
  for (int t = 0; t < n; ++t) {
    if (rel_err[t] > 1e-4) c.fail("gradient mismatch " + fmt(rel_err[t]));
  }
  return c;
}

struct CriterionSpec {
  const char* id;
  const char* name;
  std::function<Check(const RunConfig&, bool)> fn;
};

const std::vector<CriterionSpec>& criteria() {
  static const std::vector<CriterionSpec> specs = {
      {"sanity", "configuration sanity", check_sanity},
      {"five_path", "five-route fidelity agreement", check_five_path},
      {"axioms", "fidelity axioms", check_axioms},
      {"monotonicity", "monotonicity under random CPTP channels", check_monotonicity},
      {"bures_metric", "Bures metric axioms", check_bures},
      {"predual", "predual order divergence examples", check_predual},
      {"schwarz_gap", "Schwarz map without 2-positivity", check_schwarz_gap},
      {"unitary_recovery", "fidelity preservation and unitary recovery",
       check_unitary_recovery},
      {"car_tower", "CAR tower trace and fidelity stability", check_car},
      {"trace_bounds", "geometric-mean trace bounds", check_trace_bounds},
      {"var1_gradient", "variational gradient vs finite differences", check_gradient},
  };
  return specs;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const RunConfig& config, bool parallel,
                                            const std::vector<std::string>& only) {
  std::vector<CriterionResult> results;
  for (const auto& spec : criteria()) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), spec.id) == only.end()) {
      continue;
    }
    CriterionResult r;
    r.id = spec.id;
    r.name = spec.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      Check c = spec.fn(config, parallel);
      r.pass = c.pass;
      r.detail = c.detail.str();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_results(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << "  " << r.id;
    for (size_t i = r.id.size(); i < 18; ++i) os << ' ';
    os.precision(3);
    os << std::fixed << r.runtime_s << "s  " << r.name;
    if (!r.detail.empty()) os << " [" << r.detail << "]";
    os << "\n";
    os.unsetf(std::ios_base::fixed);
  }
  return os.str();
}

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return !results.empty();
}

}  // namespace fidlab
