#include "fidlab/sweep.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "fidlab/fidelity.hpp"
#include "fidlab/random.hpp"

namespace fidlab {

void run_indexed(long n, const std::function<void(long)>& fn, bool parallel) {
  if (!parallel) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

long now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

// index of the smallest margin, ties resolved to the lowest index
long argmin(const std::vector<double>& xs) {
  long best = -1;
  double val = std::numeric_limits<double>::infinity();
  for (long i = 0; i < static_cast<long>(xs.size()); ++i) {
    if (xs[i] < val) {
      val = xs[i];
      best = i;
    }
  }
  return best;
}

LinearMapOnAlgebra trial_map(ChannelSource source, Rng& rng,
                             const TracialAlgebra& algebra, int kraus_count,
                             const KrausChannel* user_channel, Json* descr) {
  switch (source) {
    case ChannelSource::RandomCptp: {
      KrausChannel ch = random_cptp_channel(rng, algebra, kraus_count);
      if (descr) *descr = Json{{"source", "random_cptp"}, {"channel", channel_to_json(ch)}};
      return kraus_to_map(ch);
    }
    case ChannelSource::RandomUnitalPositive: {
      if (descr) *descr = Json{{"source", "random_unital_positive"}};
      return random_positive_tp_map(rng, algebra, kraus_count);
    }
    case ChannelSource::UserSupplied: {
      if (!user_channel) {
        throw Error("monotonicity_sweep: user channel required for this source");
      }
      if (descr) {
        *descr = Json{{"source", "user_supplied"},
                      {"channel", channel_to_json(*user_channel)}};
      }
      return kraus_to_map(*user_channel);
    }
  }
  throw Error("monotonicity_sweep: unknown channel source");
}

}  // namespace

Json SweepReport::to_json(bool include_runtime) const {
  Json j{{"kind", kind},         {"n_trials", n_trials},
         {"min_margin", min_margin}, {"worst_trial", worst_trial},
         {"worst_case", worst_case}, {"pass", pass},
         {"seed", seed},         {"details", details}};
  if (include_runtime) j["runtime_ms"] = runtime_ms;
  return j;
}

void SweepReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw Error(path + ": cannot open file for writing");
  }
  out << "trial_index,margin,seed\n";
  for (long i = 0; i < static_cast<long>(margins.size()); ++i) {
    out << i << "," << Json(margins[i]).dump() << "," << derive_seed(seed, i) << "\n";
  }
}

LinearMapOnAlgebra random_positive_tp_map(Rng& rng, const TracialAlgebra& algebra,
                                          int kraus_count) {
  LinearMapOnAlgebra cp = kraus_to_map(random_cptp_channel(rng, algebra, kraus_count));
  LinearMapOnAlgebra co_cp = LinearMapOnAlgebra::transpose_map(algebra).compose(
      kraus_to_map(random_cptp_channel(rng, algebra, kraus_count)));
  const double lambda = rng.uniform();
  return cp.scaled(lambda).plus(co_cp.scaled(1.0 - lambda));
}

SweepReport monotonicity_sweep(ChannelSource source, int d, int n_trials,
                               std::uint64_t seed, const SweepConfig& config,
                               const KrausChannel* user_channel) {
  const long start = now_ms();
  TracialAlgebra algebra = user_channel != nullptr
                               ? user_channel->algebra()
                               : TracialAlgebra::single_block(d);

  SweepReport report;
  report.kind = "monotonicity";
  report.n_trials = n_trials;
  report.seed = seed;
  report.margins.assign(n_trials, 0.0);

  run_indexed(
      n_trials,
      [&](long t) {
        Rng rng(derive_seed(seed, t));
        LinearMapOnAlgebra map =
            trial_map(source, rng, algebra, config.kraus_count, user_channel, nullptr);
        DensityElement sigma = random_density(rng, algebra);
        DensityElement rho = random_density(rng, algebra);
        const double before = fidelity(sigma, rho);
        const double after = fidelity_positive(map.apply(sigma.element()),
                                               map.apply(rho.element()), 1e-8);
        report.margins[t] = after - before;
      },
      config.parallel);

  report.worst_trial = argmin(report.margins);
  report.min_margin =
      report.worst_trial >= 0 ? report.margins[report.worst_trial] : 0.0;
  report.pass = report.min_margin >= -config.margin_tol;

  if (report.worst_trial >= 0) {
    Rng rng(derive_seed(seed, report.worst_trial));
    Json descr;
    LinearMapOnAlgebra map =
        trial_map(source, rng, algebra, config.kraus_count, user_channel, &descr);
    DensityElement sigma = random_density(rng, algebra);
    DensityElement rho = random_density(rng, algebra);
    report.worst_case = Json{{"trial", report.worst_trial},
                             {"margin", report.margins[report.worst_trial]},
                             {"channel", descr},
                             {"sigma", element_to_json(sigma.element())},
                             {"rho", element_to_json(rho.element())}};
  }
  report.runtime_ms = now_ms() - start;
  return report;
}

SweepReport metric_sweep(int d, int n_triples, std::uint64_t seed,
                         const SweepConfig& config) {
  const long start = now_ms();
  TracialAlgebra algebra = TracialAlgebra::single_block(d);

  SweepReport report;
  report.kind = "metric";
  report.n_trials = n_triples;
  report.seed = seed;
  report.margins.assign(n_triples, 0.0);
  std::vector<double> sym_dev(n_triples, 0.0), self_dist(n_triples, 0.0);

  run_indexed(
      n_triples,
      [&](long t) {
        Rng rng(derive_seed(seed, t));
        DensityElement s = random_density(rng, algebra);
        DensityElement r = random_density(rng, algebra);
        DensityElement w = random_density(rng, algebra);
        const double dsr = bures_distance(s, r);
        const double drw = bures_distance(r, w);
        const double dsw = bures_distance(s, w);
        report.margins[t] = dsr + drw - dsw;
        sym_dev[t] = std::abs(dsr - bures_distance(r, s));
        self_dist[t] = bures_distance(s, s);
      },
      config.parallel);

  report.worst_trial = argmin(report.margins);
  report.min_margin =
      report.worst_trial >= 0 ? report.margins[report.worst_trial] : 0.0;
  double sym_max = 0.0, self_max = 0.0;
  for (long t = 0; t < n_triples; ++t) {
    sym_max = std::max(sym_max, sym_dev[t]);
    self_max = std::max(self_max, self_dist[t]);
  }
  report.details = Json{{"max_symmetry_deviation", sym_max},
                        {"max_self_distance", self_max}};
  report.pass = report.min_margin >= -config.margin_tol && sym_max <= 1e-10 &&
                self_max <= 1e-6;

  if (report.worst_trial >= 0) {
    Rng rng(derive_seed(seed, report.worst_trial));
    DensityElement s = random_density(rng, algebra);
    DensityElement r = random_density(rng, algebra);
    DensityElement w = random_density(rng, algebra);
    report.worst_case = Json{{"trial", report.worst_trial},
                             {"margin", report.margins[report.worst_trial]},
                             {"sigma", element_to_json(s.element())},
                             {"rho", element_to_json(r.element())},
                             {"omega", element_to_json(w.element())}};
  }
  report.runtime_ms = now_ms() - start;
  return report;
}

Json PreservationReport::to_json() const {
  Json j{{"verdict", verdict == PreservationVerdict::Preserving
                         ? "preserving"
                         : "strictly_increasing_somewhere"},
         {"n_pairs", n_pairs},
         {"seed", seed},
         {"tol", tol},
         {"max_abs_delta", max_abs_delta},
         {"max_increase", max_increase},
         {"witness", witness}};
  if (recovery_attempted) {
    j["recovery"] = Json{{"ok", recovery_ok}, {"message", recovery_message}};
    if (recovery_ok) j["unitary"] = recovered_unitary;
  }
  return j;
}

PreservationReport preservation_classify(const KrausChannel& ch, int n_pairs,
                                         std::uint64_t seed, double tol,
                                         bool parallel) {
  const TracialAlgebra& algebra = ch.algebra();
  PreservationReport report;
  report.n_pairs = n_pairs;
  report.seed = seed;
  report.tol = tol;

  // odd trials draw a constructed orthogonal pair, even trials a generic one
  auto trial_pair = [&](Rng& rng, long t) {
    if (t % 2 == 1 && algebra.total_dim() >= 2) {
      return random_orthogonal_densities(rng, algebra);
    }
    DensityElement s = random_density(rng, algebra);
    DensityElement r = random_density(rng, algebra);
    return std::make_pair(s, r);
  };

  std::vector<double> deltas(n_pairs, 0.0);
  run_indexed(
      n_pairs,
      [&](long t) {
        Rng rng(derive_seed(seed, t));
        auto [sigma, rho] = trial_pair(rng, t);
        const double before = fidelity(sigma, rho);
        const double after = fidelity_positive(apply(ch, sigma.element()),
                                               apply(ch, rho.element()), 1e-8);
        deltas[t] = after - before;
      },
      parallel);

  long worst = -1;
  for (long t = 0; t < n_pairs; ++t) {
    report.max_abs_delta = std::max(report.max_abs_delta, std::abs(deltas[t]));
    if (deltas[t] > report.max_increase) {
      report.max_increase = deltas[t];
      worst = t;
    }
  }

  if (report.max_abs_delta <= tol) {
    report.verdict = PreservationVerdict::Preserving;
    report.recovery_attempted = true;
    try {
      AlgebraElement u = recover_unitary(ch, 1e-8, 32, derive_seed(seed, 1ULL << 32));
      report.recovery_ok = true;
      report.recovery_message = "recovered";
      report.recovered_unitary = element_to_json(u);
    } catch (const Error& e) {
      report.recovery_ok = false;
      report.recovery_message = e.what();
    }
  } else {
    report.verdict = PreservationVerdict::StrictlyIncreasingSomewhere;
    Rng rng(derive_seed(seed, worst));
    auto [sigma, rho] = trial_pair(rng, worst);
    const double before = fidelity(sigma, rho);
    report.witness = Json{{"trial", worst},
                          {"fidelity_before", before},
                          {"fidelity_after", before + deltas[worst]},
                          {"sigma", element_to_json(sigma.element())},
                          {"rho", element_to_json(rho.element())}};
  }
  return report;
}

InjectivityCertificate injectivity_probe(const LinearMapOnAlgebra& map) {
  double smallest = std::numeric_limits<double>::infinity();
  for (int b = 0; b < map.algebra().block_count(); ++b) {
    const Matrix& action = map.actions()[b];
    Matrix gram = action.adjoint() * action;
    Eigen::SelfAdjointEigenSolver<Matrix> eig((gram + gram.adjoint()) * 0.5);
    smallest = std::min(smallest, std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff())));
  }
  return InjectivityCertificate{smallest};
}

}  // namespace fidlab
