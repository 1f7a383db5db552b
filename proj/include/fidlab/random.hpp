#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "fidlab/algebra.hpp"

namespace fidlab {

/// Counter-based seed splitter (splitmix64 finalizer).  Derived streams for
/// trial t of a sweep use derive_seed(seed, t), so trials are independent of
/// execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  /// Uniform integer in [0, n).
  int below(int n);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
Matrix ginibre(Rng& rng, int rows, int cols);

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
Matrix haar_unitary(Rng& rng, int d);

AlgebraElement random_element(Rng& rng, const TracialAlgebra& algebra);
AlgebraElement random_hermitian(Rng& rng, const TracialAlgebra& algebra);
AlgebraElement random_unitary(Rng& rng, const TracialAlgebra& algebra);

/// Ginibre density: g g* per block, normalized so tau(rho) = 1.
DensityElement random_density(Rng& rng, const TracialAlgebra& algebra);

/// Random element with operator norm <= 1.
AlgebraElement random_contraction(Rng& rng, const TracialAlgebra& algebra);

/// A pair of mutually orthogonal densities built from complementary spectral
/// projections of a random Hermitian element.
std::pair<DensityElement, DensityElement> random_orthogonal_densities(
    Rng& rng, const TracialAlgebra& algebra);

}  // namespace fidlab
