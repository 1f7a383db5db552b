#include "fidlab/car.hpp"

#include <cmath>

#include "fidlab/fidelity.hpp"

namespace fidlab {

CarLevel car_level(int k, int max_level) {
  if (k < 1 || k > max_level) {
    throw LevelMismatch("car_level: level " + std::to_string(k) +
                        " outside [1, " + std::to_string(max_level) + "]");
  }
  const int dim = 1 << k;
  const double weight = std::ldexp(1.0, -k);  // exact power of two
  return CarLevel{k, TracialAlgebra::single_block(dim, weight)};
}

bool is_car_algebra(const TracialAlgebra& algebra, int* k_out) {
  if (algebra.block_count() != 1) return false;
  const int d = algebra.block_dim(0);
  if (d < 2 || (d & (d - 1)) != 0) return false;
  int k = 0;
  for (int t = d; t > 1; t >>= 1) ++k;
  if (algebra.block_weight(0) != std::ldexp(1.0, -k)) return false;
  if (k_out) *k_out = k;
  return true;
}

AlgebraElement embed(const AlgebraElement& x, int max_level) {
  int k = 0;
  if (!is_car_algebra(x.algebra(), &k)) {
    throw LevelMismatch("embed: element does not live on a CAR level algebra");
  }
  if (k + 1 > max_level) {
    throw LevelMismatch("embed: next level exceeds the maximum");
  }
  const int d = x.algebra().block_dim(0);
  const Matrix& m = x.block(0);
  Matrix big = Matrix::Zero(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      big(2 * i, 2 * j) = m(i, j);
      big(2 * i + 1, 2 * j + 1) = m(i, j);
    }
  }
  return AlgebraElement(car_level(k + 1, max_level).algebra, {std::move(big)});
}

std::vector<double> fidelity_stability(const DensityElement& sigma,
                                       const DensityElement& rho, int depth,
                                       int max_level) {
  if (sigma.algebra() != rho.algebra()) {
    throw AlgebraMismatch("fidelity_stability: states over different algebras");
  }
  int k = 0;
  if (!is_car_algebra(sigma.algebra(), &k)) {
    throw LevelMismatch("fidelity_stability: states do not live on a CAR level");
  }
  if (k + depth > max_level) {
    throw LevelMismatch("fidelity_stability: depth exceeds the maximum level");
  }
  std::vector<double> values;
  values.reserve(depth + 1);
  AlgebraElement s = sigma.element();
  AlgebraElement r = rho.element();
  values.push_back(fidelity_positive(s, r));
  for (int step = 0; step < depth; ++step) {
    s = embed(s, max_level);
    r = embed(r, max_level);
    values.push_back(fidelity_positive(s, r));
  }
  return values;
}

}  // namespace fidlab
