#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fidlab/predual.hpp"
#include "fidlab/random.hpp"

using namespace fidlab;

namespace {

TracialAlgebra m2() { return TracialAlgebra::single_block(2); }

std::vector<double> sorted_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig((m + m.adjoint()) * 0.5);
  std::vector<double> out(eig.eigenvalues().data(),
                          eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

// omega with entries conjugated by c: omega'_ij(x) = omega_ij(c* x c), whose
// representative is c y_ij c*
PredualMatrix conjugated(const PredualMatrix& omega, const AlgebraElement& c) {
  std::vector<FunctionalRep> entries;
  for (int i = 0; i < omega.n(); ++i) {
    for (int j = 0; j < omega.n(); ++j) {
      entries.push_back(FunctionalRep{c * omega.entry(i, j).y * adjoint(c)});
    }
  }
  return PredualMatrix(omega.n(), omega.algebra(), std::move(entries));
}

}  // namespace

TEST_CASE("functional representatives evaluate by trace duality") {
  Rng rng(311);
  TracialAlgebra alg({{2, 1.0}, {3, 0.5}});
  FunctionalRep omega{random_element(rng, alg)};
  AlgebraElement x = random_element(rng, alg);
  AlgebraElement z = random_element(rng, alg);
  const Complex a(0.3, -0.8), b(1.1, 0.2);
  // linearity
  CHECK(std::abs(omega.evaluate(x * a + z * b) -
                 (a * omega.evaluate(x) + b * omega.evaluate(z))) <= 1e-12);

  // a density representative gives a positive functional
  DensityElement rho = random_density(rng, alg);
  FunctionalRep state{rho.element()};
  AlgebraElement g = random_element(rng, alg);
  CHECK(state.evaluate(adjoint(g) * g).real() >= 0.0);
  CHECK(std::abs(state.evaluate(AlgebraElement::identity(alg)) - 1.0) <= 1e-12);
}

TEST_CASE("lift of the two standard functional matrices") {
  PredualMatrix omega = omega_example();
  LiftedMap l_omega = lift_map(omega);
  Rng rng(313);
  for (int rep = 0; rep < 10; ++rep) {
    AlgebraElement x = random_element(rng, m2());
    CHECK((l_omega.apply(x) - x.block(0)).norm() <= 1e-13);
  }

  PredualMatrix delta = delta_example();
  LiftedMap l_delta = lift_map(delta);
  for (int rep = 0; rep < 10; ++rep) {
    AlgebraElement x = random_element(rng, m2());
    CHECK((l_delta.apply(x) - x.block(0).transpose()).norm() <= 1e-13);
  }

  // n = 1 with a density representative: the lift is the state itself
  DensityElement rho = random_density(rng, m2());
  PredualMatrix single(1, m2(), {FunctionalRep{rho.element()}});
  LiftedMap l_single = lift_map(single);
  AlgebraElement x = random_element(rng, m2());
  CHECK(std::abs(l_single.apply(x)(0, 0) - trace(x * rho.element())) <= 1e-13);
  CHECK(is_predual_positive(single).verdict);
}

TEST_CASE("predual positivity verdicts diverge from operator positivity") {
  PredualMatrix omega = omega_example();
  PredualPositivity omega_pred = is_predual_positive(omega);
  CHECK(omega_pred.verdict);
  CHECK(std::abs(omega_pred.min_choi_eigenvalue) <= 1e-12);

  OperatorMatrixResult omega_op = operator_matrix(omega);
  CHECK_FALSE(omega_op.psd);
  std::vector<double> eigs = sorted_eigenvalues(omega_op.blocks[0]);
  CHECK(eigs[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(eigs[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eigs[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eigs[3] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(omega_op.min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-14));

  PredualMatrix delta = delta_example();
  PredualPositivity delta_pred = is_predual_positive(delta);
  CHECK_FALSE(delta_pred.verdict);
  CHECK(delta_pred.min_choi_eigenvalue == doctest::Approx(-1.0).epsilon(1e-13));

  OperatorMatrixResult delta_op = operator_matrix(delta);
  CHECK(delta_op.psd);
  CHECK(std::abs(delta_op.min_eigenvalue) <= 1e-14);
  std::vector<double> delta_eigs = sorted_eigenvalues(delta_op.blocks[0]);
  CHECK(delta_eigs[3] == doctest::Approx(2.0).epsilon(1e-14));

  // diagonal functional matrix with PSD representatives is predual-positive
  Rng rng(317);
  DensityElement r1 = random_density(rng, m2());
  DensityElement r2 = random_density(rng, m2());
  AlgebraElement zero = AlgebraElement::zero(m2());
  PredualMatrix diag(2, m2(),
                     {FunctionalRep{r1.element()}, FunctionalRep{zero},
                      FunctionalRep{zero}, FunctionalRep{r2.element()}});
  CHECK(is_predual_positive(diag).verdict);
  CHECK(operator_matrix(diag).psd);
}

TEST_CASE("predual positivity at n=1 coincides with PSD of the representative") {
  Rng rng(331);
  for (const TracialAlgebra& alg :
       {TracialAlgebra::single_block(2), TracialAlgebra::single_block(3),
        TracialAlgebra({{2, 1.0}, {2, 0.5}})}) {
    for (int rep = 0; rep < 20; ++rep) {
      AlgebraElement y = random_hermitian(rng, alg);
      PredualMatrix single(1, alg, {FunctionalRep{y}});
      const bool pred = is_predual_positive(single).verdict;
      const bool psd = is_positive(y, defaults::psd_tol);
      CHECK(pred == psd);
    }
  }
}

TEST_CASE("predual positivity is stable under congruence") {
  Rng rng(337);
  for (int rep = 0; rep < 15; ++rep) {
    // start from a predual-positive matrix: [E(e_ji)] for a CP map E
    TracialAlgebra alg = m2();
    KrausChannel ch = random_cptp_channel(rng, alg);
    LinearMapOnAlgebra e = kraus_to_map(ch);
    std::vector<FunctionalRep> entries;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        Matrix unit = Matrix::Zero(2, 2);
        unit(j, i) = 1.0;
        entries.push_back(
            FunctionalRep{e.apply(AlgebraElement::from_block(alg, 0, unit))});
      }
    }
    PredualMatrix omega(2, alg, std::move(entries));
    REQUIRE(is_predual_positive(omega).verdict);
    AlgebraElement c = random_element(rng, alg);
    CHECK(is_predual_positive(conjugated(omega, c), 1e-8).verdict);
  }
}

TEST_CASE("cp on the predual order coincides with cp on the algebra order") {
  // exercised empirically over random maps on M_d, d <= 4
  Rng rng(347);
  for (int d = 2; d <= 4; ++d) {
    TracialAlgebra alg = TracialAlgebra::single_block(d);
    for (int rep = 0; rep < 10; ++rep) {
      LinearMapOnAlgebra cp_map = kraus_to_map(random_cptp_channel(rng, alg));
      LinearMapOnAlgebra not_cp =
          LinearMapOnAlgebra::transpose_map(alg).compose(cp_map).scaled(0.5).plus(
              cp_map.scaled(0.5));
      for (const LinearMapOnAlgebra& map : {cp_map, not_cp}) {
        const bool algebra_side = is_completely_positive(map).verdict;
        const bool predual_side = is_predual_cp(map).verdict;
        CHECK(algebra_side == predual_side);
      }
    }
  }
}

TEST_CASE("predual matrix validation") {
  CHECK_THROWS_AS(PredualMatrix(2, m2(), {FunctionalRep{AlgebraElement::zero(m2())}}),
                  Error);
  TracialAlgebra m3 = TracialAlgebra::single_block(3);
  CHECK_THROWS_AS(
      PredualMatrix(1, m2(), {FunctionalRep{AlgebraElement::zero(m3)}}),
      AlgebraMismatch);
}
