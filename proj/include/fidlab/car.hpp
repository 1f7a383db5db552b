#pragma once

#include <vector>

#include "fidlab/algebra.hpp"

namespace fidlab {

/// Level k of the tensor tower approximating the Fermion algebra: one block
/// of dimension 2^k with weight 2^{-k}, so the trace is normalized exactly.
struct CarLevel {
  int k;
  TracialAlgebra algebra;
};

CarLevel car_level(int k, int max_level = 10);

/// True iff the algebra is some CAR level's algebra; the level is written to
/// *k_out when given.
bool is_car_algebra(const TracialAlgebra& algebra, int* k_out = nullptr);

/// x -> x (x) 1_2, the trace-compatible unital *-embedding into level k+1.
AlgebraElement embed(const AlgebraElement& x, int max_level = 10);

/// Fidelity of (sigma, rho) at its level and after 1..depth embeddings.
std::vector<double> fidelity_stability(const DensityElement& sigma,
                                       const DensityElement& rho, int depth,
                                       int max_level = 10);

}  // namespace fidlab
