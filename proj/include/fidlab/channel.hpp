#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fidlab/algebra.hpp"

namespace fidlab {

class Rng;

/// A finite Kraus family {a_k} defining rho -> sum_k a_k rho a_k*.
/// Construction enforces trace preservation: || sum a_k* a_k - 1 || <= tp_tol.
class KrausChannel {
 public:
  KrausChannel(TracialAlgebra algebra, std::vector<AlgebraElement> kraus,
               double tp_tol = defaults::tp_tol);

  const TracialAlgebra& algebra() const { return algebra_; }
  const std::vector<AlgebraElement>& kraus() const { return kraus_; }

 private:
  TracialAlgebra algebra_;
  std::vector<AlgebraElement> kraus_;
};

AlgebraElement apply(const KrausChannel& ch, const AlgebraElement& x);
DensityElement apply(const KrausChannel& ch, const DensityElement& rho);

/// A block-respecting linear endomorphism of a TracialAlgebra, stored as its
/// matrix in the canonical matrix-unit basis (one d^2 x d^2 action per block,
/// column-major vectorization).
class LinearMapOnAlgebra {
 public:
  LinearMapOnAlgebra(TracialAlgebra algebra, std::vector<Matrix> actions);

  static LinearMapOnAlgebra identity(const TracialAlgebra& algebra);
  static LinearMapOnAlgebra from_function(
      const TracialAlgebra& algebra,
      const std::function<AlgebraElement(const AlgebraElement&)>& fn);
  static LinearMapOnAlgebra transpose_map(const TracialAlgebra& algebra);
  /// x -> tau(x) * 1 / tau(1).
  static LinearMapOnAlgebra trace_collapse(const TracialAlgebra& algebra);

  const TracialAlgebra& algebra() const { return algebra_; }
  const std::vector<Matrix>& actions() const { return actions_; }

  AlgebraElement apply(const AlgebraElement& x) const;
  LinearMapOnAlgebra compose(const LinearMapOnAlgebra& inner) const;
  LinearMapOnAlgebra scaled(double factor) const;
  LinearMapOnAlgebra plus(const LinearMapOnAlgebra& other) const;

 private:
  TracialAlgebra algebra_;
  std::vector<Matrix> actions_;
};

/// Schroedinger-picture action rho -> sum a_k rho a_k* as a basis matrix.
LinearMapOnAlgebra kraus_to_map(const KrausChannel& ch);
/// Heisenberg dual x -> sum a_k* x a_k.
LinearMapOnAlgebra dual(const KrausChannel& ch);

struct ChoiMatrix {
  Matrix matrix;  // C = sum_ij e_ij (x) Phi(e_ij)
};

/// Choi matrix of a single-block map; throws MultiBlockUnsupported otherwise.
ChoiMatrix choi(const LinearMapOnAlgebra& map);
/// Choi matrix of the restriction to one block.
ChoiMatrix choi_block(const LinearMapOnAlgebra& map, int b);

struct CpCertificate {
  bool verdict = false;
  double min_choi_eigenvalue = 0.0;
};

/// Complete positivity via the Choi test, blockwise.
CpCertificate is_completely_positive(const LinearMapOnAlgebra& map,
                                     double psd_tol = defaults::psd_tol);

struct SchwarzCertificate {
  bool verdict = false;
  /// Most negative eigenvalue of E(x* x) - E(x)* E(x) seen (0 if none).
  double worst_violation = 0.0;
  std::optional<AlgebraElement> counterexample;
  int n_samples = 0;
};

/// Sampled refutation search for E(x*) E(x) <= E(x* x).  A negative verdict
/// carries the violating input; a positive verdict only means no violation
/// was found in n_samples draws.
SchwarzCertificate is_schwarz_sampled(const LinearMapOnAlgebra& map, int n_samples,
                                      std::uint64_t seed,
                                      double tol = defaults::psd_tol);

bool is_trace_preserving(const LinearMapOnAlgebra& map, double tol = 1e-10);
bool is_trace_preserving(const KrausChannel& ch, double tol = 1e-10);

struct OrderZeroCertificate {
  bool verdict = false;
  double worst_overlap = 0.0;
  std::optional<std::pair<AlgebraElement, AlgebraElement>> witness;
  int n_samples = 0;
};

/// Samples orthogonal positive pairs from complementary spectral projections
/// and checks that their images stay orthogonal.
OrderZeroCertificate is_order_zero_sampled(const LinearMapOnAlgebra& map,
                                           int n_samples, std::uint64_t seed,
                                           double tol = 1e-8);

/// Reconstructs the unitary u with E(rho) = u rho u* from a single-block
/// channel that passes a sampled fidelity-preservation test.  The first
/// nonzero entry of column 1 of u is made real positive.
/// Throws NotFidelityPreserving or NotUnitaryImplementable.
AlgebraElement recover_unitary(const KrausChannel& ch, double tol = 1e-8,
                               int n_pairs = 32, std::uint64_t seed = 0x5eedULL);

/// Trace-preserving CP channel from a Haar-random Stinespring isometry split
/// into kraus_count column blocks.
KrausChannel random_cptp_channel(Rng& rng, const TracialAlgebra& algebra,
                                 int kraus_count = 0);

/// Depolarizing channel on single-block M_d with weight 1.
KrausChannel depolarizing_channel(const TracialAlgebra& algebra, double p);

}  // namespace fidlab
