#pragma once

#include <vector>

#include "fidlab/channel.hpp"

namespace fidlab {

/// A normal functional omega(x) = tau(x y), stored through its trace-duality
/// representative y.
struct FunctionalRep {
  AlgebraElement y;

  Complex evaluate(const AlgebraElement& x) const { return trace(x * y); }
};

/// An n x n matrix of functionals over a common algebra, carrying the
/// matrix order of the predual.
class PredualMatrix {
 public:
  PredualMatrix(int n, TracialAlgebra algebra, std::vector<FunctionalRep> entries);

  int n() const { return n_; }
  const TracialAlgebra& algebra() const { return algebra_; }
  const FunctionalRep& entry(int i, int j) const { return entries_[i * n_ + j]; }

 private:
  int n_;
  TracialAlgebra algebra_;
  std::vector<FunctionalRep> entries_;  // row-major
};

/// The lift x -> [omega_ij(x)]_{ij}, a linear map from the algebra into M_n,
/// stored as one (n^2 x d_b^2) action per domain block with the trace weights
/// folded in.
class LiftedMap {
 public:
  LiftedMap(TracialAlgebra domain, int n, std::vector<Matrix> actions);

  const TracialAlgebra& domain() const { return domain_; }
  int n() const { return n_; }
  const std::vector<Matrix>& actions() const { return actions_; }

  Matrix apply(const AlgebraElement& x) const;

 private:
  TracialAlgebra domain_;
  int n_;
  std::vector<Matrix> actions_;
};

LiftedMap lift_map(const PredualMatrix& omega);

ChoiMatrix choi_block(const LiftedMap& map, int b);
CpCertificate is_completely_positive(const LiftedMap& map,
                                     double psd_tol = defaults::psd_tol);

struct PredualPositivity {
  bool verdict = false;
  double min_choi_eigenvalue = 0.0;
};

/// Positivity in the matrix order of the predual: complete positivity of the
/// lifted map.
PredualPositivity is_predual_positive(const PredualMatrix& omega,
                                      double psd_tol = defaults::psd_tol);

struct OperatorMatrixResult {
  /// One (n d_b) x (n d_b) matrix per algebra block.
  std::vector<Matrix> blocks;
  double min_eigenvalue = 0.0;
  bool hermitian = false;
  bool psd = false;
};

/// The operator matrix [y_ij] assembled from the representatives, with its
/// PSD verdict.  Positivity here and positivity in the predual order are
/// different notions; the two can diverge in both directions.
OperatorMatrixResult operator_matrix(const PredualMatrix& omega,
                                     double psd_tol = defaults::psd_tol);

/// The two standard 2x2 functional matrices over M_2 whose predual-order and
/// operator-matrix positivity verdicts point in opposite directions:
/// omega lifts to the identity map, delta lifts to the transpose.
PredualMatrix omega_example();
PredualMatrix delta_example();

/// Predual-order complete positivity of an endomorphism, certified through
/// the canonical predual-positive functional matrix [E(e_ji)].  For matrix
/// algebras this coincides with complete positivity on the algebra order;
/// the coincidence is exercised empirically in the test suite.
PredualPositivity is_predual_cp(const LinearMapOnAlgebra& map,
                                double psd_tol = defaults::psd_tol);

}  // namespace fidlab
