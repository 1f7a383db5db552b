#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "fidlab/channel.hpp"
#include "fidlab/json_io.hpp"

namespace fidlab {

/// Runs fn(0..n-1), each call writing only to its own slot.  The parallel
/// path distributes indices over OpenMP threads; the serial path is the
/// reference implementation.  Results are identical by construction because
/// per-index work derives its own seed and the reductions downstream scan
/// slots in index order.
void run_indexed(long n, const std::function<void(long)>& fn, bool parallel);

struct SweepConfig {
  double margin_tol = 1e-9;
  bool parallel = true;
  /// Kraus operators per random channel; 0 means the block dimension.
  int kraus_count = 0;
};

struct SweepReport {
  std::string kind;
  long n_trials = 0;
  double min_margin = 0.0;
  long worst_trial = -1;
  Json worst_case;
  bool pass = false;
  std::uint64_t seed = 0;
  long runtime_ms = 0;
  /// Extra per-kind diagnostics (symmetry deviations etc.).
  Json details;

  /// Per-trial margins in trial order (also the CSV payload).
  std::vector<double> margins;

  /// include_runtime=false gives the reproducible form: identical seeds and
  /// inputs produce byte-identical dumps.
  Json to_json(bool include_runtime) const;
  void write_csv(const std::string& path) const;
};

enum class ChannelSource { RandomCptp, RandomUnitalPositive, UserSupplied };

/// Margin F(E(sigma), E(rho)) - F(sigma, rho) per (channel, pair) trial; the
/// sweep passes when the minimum margin stays above -margin_tol.
SweepReport monotonicity_sweep(ChannelSource source, int d, int n_trials,
                               std::uint64_t seed, const SweepConfig& config = {},
                               const KrausChannel* user_channel = nullptr);

/// Symmetry, identity and triangle inequality of the Bures distance on
/// random triples; the margin is d(s,r) + d(r,w) - d(s,w).
SweepReport metric_sweep(int d, int n_triples, std::uint64_t seed,
                         const SweepConfig& config = {});

enum class PreservationVerdict { Preserving, StrictlyIncreasingSomewhere };

struct PreservationReport {
  PreservationVerdict verdict = PreservationVerdict::Preserving;
  int n_pairs = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  double max_abs_delta = 0.0;
  double max_increase = 0.0;
  /// Pair realizing the largest fidelity increase (serialized states and
  /// their fidelities before/after).
  Json witness;
  /// Set when the verdict is Preserving: outcome of unitary recovery.
  bool recovery_attempted = false;
  bool recovery_ok = false;
  std::string recovery_message;
  Json recovered_unitary;

  Json to_json() const;
};

/// Sampled classification of a trace-preserving channel by its effect on
/// fidelity.  Preserving verdicts are statements about the sample only; they
/// trigger unitary recovery and attach its outcome.
PreservationReport preservation_classify(const KrausChannel& ch, int n_pairs,
                                         std::uint64_t seed, double tol = 1e-8,
                                         bool parallel = true);

struct InjectivityCertificate {
  double smallest_singular_value = 0.0;
};

/// Smallest singular value of the map's basis matrix (zero means a kernel).
InjectivityCertificate injectivity_probe(const LinearMapOnAlgebra& map);

/// Positive trace-preserving map for monotonicity sweeps over the
/// RandomUnitalPositive source: a random mixture of a CPTP channel and a
/// transpose-composed CPTP channel.
LinearMapOnAlgebra random_positive_tp_map(Rng& rng, const TracialAlgebra& algebra,
                                          int kraus_count = 0);

}  // namespace fidlab
