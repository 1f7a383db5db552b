#include "fidlab/random.hpp"

#include <cmath>

namespace fidlab {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int Rng::below(int n) {
  std::uniform_int_distribution<int> dist(0, n - 1);
  return dist(gen_);
}

Matrix ginibre(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
    }
  }
  return m;
}

Matrix haar_unitary(Rng& rng, int d) {
  Matrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex rii = r(i, i);
    const double a = std::abs(rii);
    q.col(i) *= (a > 0.0) ? rii / a : Complex(1.0, 0.0);
  }
  return q;
}

AlgebraElement random_element(Rng& rng, const TracialAlgebra& algebra) {
  std::vector<Matrix> blocks;
  blocks.reserve(algebra.block_count());
  for (int b = 0; b < algebra.block_count(); ++b) {
    blocks.push_back(ginibre(rng, algebra.block_dim(b), algebra.block_dim(b)));
  }
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement random_hermitian(Rng& rng, const TracialAlgebra& algebra) {
  AlgebraElement g = random_element(rng, algebra);
  return (g + adjoint(g)) * 0.5;
}

AlgebraElement random_unitary(Rng& rng, const TracialAlgebra& algebra) {
  std::vector<Matrix> blocks;
  blocks.reserve(algebra.block_count());
  for (int b = 0; b < algebra.block_count(); ++b) {
    blocks.push_back(haar_unitary(rng, algebra.block_dim(b)));
  }
  return AlgebraElement(algebra, std::move(blocks));
}

DensityElement random_density(Rng& rng, const TracialAlgebra& algebra) {
  std::vector<Matrix> blocks;
  blocks.reserve(algebra.block_count());
  for (int b = 0; b < algebra.block_count(); ++b) {
    Matrix g = ginibre(rng, algebra.block_dim(b), algebra.block_dim(b));
    blocks.push_back(g * g.adjoint());
  }
  AlgebraElement raw(algebra, std::move(blocks));
  const double t = trace(raw).real();
  return DensityElement(raw * (1.0 / t));
}

AlgebraElement random_contraction(Rng& rng, const TracialAlgebra& algebra) {
  AlgebraElement g = random_element(rng, algebra);
  const double nrm = op_norm(g);
  if (nrm == 0.0) return g;
  return g * (1.0 / (nrm * (1.0 + 1e-12)));
}

std::pair<DensityElement, DensityElement> random_orthogonal_densities(
    Rng& rng, const TracialAlgebra& algebra) {
  AlgebraElement h = random_hermitian(rng, algebra);
  HermitianEig eig = eig_hermitian(h);

  // split the full list of (block, eigenvector) slots into two nonempty halves
  std::vector<std::pair<int, int>> slots;
  for (int b = 0; b < algebra.block_count(); ++b) {
    for (int i = 0; i < algebra.block_dim(b); ++i) slots.emplace_back(b, i);
  }
  const int total = static_cast<int>(slots.size());
  if (total < 2) {
    throw Error("random_orthogonal_densities: algebra has dimension < 2");
  }
  const int cut = 1 + rng.below(total - 1);

  std::vector<Matrix> first, second;
  for (int b = 0; b < algebra.block_count(); ++b) {
    const int d = algebra.block_dim(b);
    first.push_back(Matrix::Zero(d, d));
    second.push_back(Matrix::Zero(d, d));
  }
  for (int k = 0; k < total; ++k) {
    auto [b, i] = slots[k];
    const double coeff = 0.1 + rng.uniform();
    Matrix rank1 = coeff * eig.vectors[b].col(i) * eig.vectors[b].col(i).adjoint();
    if (k < cut) {
      first[b] += rank1;
    } else {
      second[b] += rank1;
    }
  }
  AlgebraElement a(algebra, std::move(first));
  AlgebraElement b(algebra, std::move(second));
  const double ta = trace(a).real();
  const double tb = trace(b).real();
  return {DensityElement(a * (1.0 / ta)), DensityElement(b * (1.0 / tb))};
}

}  // namespace fidlab
