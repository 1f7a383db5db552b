#include "fidlab/predual.hpp"

#include <cmath>
#include <limits>

namespace fidlab {

PredualMatrix::PredualMatrix(int n, TracialAlgebra algebra,
                             std::vector<FunctionalRep> entries)
    : n_(n), algebra_(std::move(algebra)), entries_(std::move(entries)) {
  if (n_ < 1) {
    throw Error("PredualMatrix: n must be >= 1");
  }
  if (static_cast<int>(entries_.size()) != n_ * n_) {
    throw Error("PredualMatrix: expected n*n entries");
  }
  for (const auto& e : entries_) {
    if (e.y.algebra() != algebra_) {
      throw AlgebraMismatch("PredualMatrix: entry over a different algebra");
    }
  }
}

LiftedMap::LiftedMap(TracialAlgebra domain, int n, std::vector<Matrix> actions)
    : domain_(std::move(domain)), n_(n), actions_(std::move(actions)) {
  if (static_cast<int>(actions_.size()) != domain_.block_count()) {
    throw Error("LiftedMap: one action per domain block required");
  }
  for (int b = 0; b < domain_.block_count(); ++b) {
    const int d2 = domain_.block_dim(b) * domain_.block_dim(b);
    if (actions_[b].rows() != n_ * n_ || actions_[b].cols() != d2) {
      throw Error("LiftedMap: action matrix has wrong size");
    }
  }
}

Matrix LiftedMap::apply(const AlgebraElement& x) const {
  if (x.algebra() != domain_) {
    throw AlgebraMismatch("LiftedMap::apply: algebra mismatch");
  }
  ComplexVector acc = ComplexVector::Zero(n_ * n_);
  for (int b = 0; b < domain_.block_count(); ++b) {
    acc += actions_[b] *
           Eigen::Map<const ComplexVector>(x.block(b).data(), x.block(b).size());
  }
  return Eigen::Map<const Matrix>(acc.data(), n_, n_);
}

LiftedMap lift_map(const PredualMatrix& omega) {
  const TracialAlgebra& alg = omega.algebra();
  const int n = omega.n();
  std::vector<Matrix> actions;
  for (int b = 0; b < alg.block_count(); ++b) {
    const int d = alg.block_dim(b);
    const double w = alg.block_weight(b);
    Matrix action(n * n, d * d);
    for (int q = 0; q < d; ++q) {
      for (int p = 0; p < d; ++p) {
        // image of the matrix unit e_pq of block b: entry (i,j) is
        // tau(e_pq y_ij) = w * (y_ij)_{qp}
        Matrix out(n, n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            out(i, j) = w * omega.entry(i, j).y.block(b)(q, p);
          }
        }
        action.col(q * d + p) =
            Eigen::Map<const ComplexVector>(out.data(), out.size());
      }
    }
    actions.push_back(std::move(action));
  }
  return LiftedMap(alg, n, std::move(actions));
}

ChoiMatrix choi_block(const LiftedMap& map, int b) {
  const int d = map.domain().block_dim(b);
  const int n = map.n();
  Matrix c = Matrix::Zero(d * n, d * n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ComplexVector col = map.actions()[b].col(j * d + i);
      c.block(i * n, j * n, n, n) = Eigen::Map<const Matrix>(col.data(), n, n);
    }
  }
  return ChoiMatrix{std::move(c)};
}

CpCertificate is_completely_positive(const LiftedMap& map, double psd_tol) {
  double min_eig = std::numeric_limits<double>::infinity();
  bool hermitian = true;
  double scale = 1.0;
  for (int b = 0; b < map.domain().block_count(); ++b) {
    ChoiMatrix c = choi_block(map, b);
    scale = std::max(scale, c.matrix.cwiseAbs().maxCoeff());
    if ((c.matrix - c.matrix.adjoint()).norm() > 1e-10 * scale * c.matrix.rows()) {
      hermitian = false;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig((c.matrix + c.matrix.adjoint()) * 0.5);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  }
  return CpCertificate{hermitian && min_eig >= -psd_tol * scale, min_eig};
}

PredualPositivity is_predual_positive(const PredualMatrix& omega, double psd_tol) {
  CpCertificate cert = is_completely_positive(lift_map(omega), psd_tol);
  return PredualPositivity{cert.verdict, cert.min_choi_eigenvalue};
}

OperatorMatrixResult operator_matrix(const PredualMatrix& omega, double psd_tol) {
  const TracialAlgebra& alg = omega.algebra();
  const int n = omega.n();
  OperatorMatrixResult out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  out.hermitian = true;
  double scale = 0.0;
  for (int b = 0; b < alg.block_count(); ++b) {
    const int d = alg.block_dim(b);
    Matrix big(n * d, n * d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        big.block(i * d, j * d, d, d) = omega.entry(i, j).y.block(b);
      }
    }
    scale = std::max({scale, big.cwiseAbs().maxCoeff(), 1.0});
    if ((big - big.adjoint()).norm() > 1e-10 * scale * big.rows()) {
      out.hermitian = false;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig((big + big.adjoint()) * 0.5);
    out.min_eigenvalue = std::min(out.min_eigenvalue, eig.eigenvalues().minCoeff());
    out.blocks.push_back(std::move(big));
  }
  out.psd = out.hermitian && out.min_eigenvalue >= -psd_tol * scale;
  return out;
}

namespace {

PredualMatrix rank_one_functionals(bool transpose_arrangement) {
  TracialAlgebra alg = TracialAlgebra::single_block(2, 1.0);
  auto unit = [&](int i, int j) {
    Matrix m = Matrix::Zero(2, 2);
    m(i, j) = 1.0;
    return FunctionalRep{AlgebraElement::from_block(alg, 0, std::move(m))};
  };
  std::vector<FunctionalRep> entries;
  if (!transpose_arrangement) {
    // lifts to the identity map
    entries = {unit(0, 0), unit(1, 0), unit(0, 1), unit(1, 1)};
  } else {
    // lifts to the transpose map
    entries = {unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)};
  }
  return PredualMatrix(2, alg, std::move(entries));
}

}  // namespace

PredualMatrix omega_example() { return rank_one_functionals(false); }
PredualMatrix delta_example() { return rank_one_functionals(true); }

PredualPositivity is_predual_cp(const LinearMapOnAlgebra& map, double psd_tol) {
  const TracialAlgebra& alg = map.algebra();
  if (alg.block_count() != 1) {
    throw MultiBlockUnsupported("is_predual_cp: single-block algebras only");
  }
  const int d = alg.block_dim(0);
  std::vector<FunctionalRep> entries;
  entries.reserve(d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Matrix unit = Matrix::Zero(d, d);
      unit(j, i) = 1.0;  // e_ji
      entries.push_back(
          FunctionalRep{map.apply(AlgebraElement::from_block(alg, 0, unit))});
    }
  }
  PredualMatrix omega(d, alg, std::move(entries));
  return is_predual_positive(omega, psd_tol);
}

}  // namespace fidlab
