#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fidlab/algebra.hpp"
#include "fidlab/random.hpp"

using namespace fidlab;

namespace {

TracialAlgebra m2() { return TracialAlgebra::single_block(2); }

AlgebraElement diag2(const TracialAlgebra& alg, double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return AlgebraElement::from_block(alg, 0, m);
}

AlgebraElement unit2(const TracialAlgebra& alg, int i, int j) {
  Matrix m = Matrix::Zero(2, 2);
  m(i, j) = 1.0;
  return AlgebraElement::from_block(alg, 0, m);
}

// independent oracle for the trace norm: tau of the PSD square root of z*z
double trace_norm_oracle(const AlgebraElement& z) {
  return trace(sqrt_psd(adjoint(z) * z, 1e-8)).real();
}

}  // namespace

TEST_CASE("algebra construction and invariants") {
  TracialAlgebra alg({{2, 1.0}, {3, 0.5}});
  CHECK(alg.total_trace() == 3.5);
  CHECK(alg.total_dim() == 5);
  CHECK_THROWS_AS(TracialAlgebra({{0, 1.0}}), Error);
  CHECK_THROWS_AS(TracialAlgebra({{2, 0.0}}), Error);
  CHECK_THROWS_AS(TracialAlgebra({{2, -1.0}}), Error);

  // element block shapes must match
  CHECK_THROWS_AS(AlgebraElement(alg, {Matrix::Zero(2, 2)}), Error);
  CHECK_THROWS_AS(AlgebraElement(alg, {Matrix::Zero(3, 3), Matrix::Zero(3, 3)}), Error);

  // arithmetic across algebras is rejected
  AlgebraElement x = AlgebraElement::identity(alg);
  AlgebraElement y = AlgebraElement::identity(m2());
  CHECK_THROWS_AS(x + y, AlgebraMismatch);
  CHECK_THROWS_AS(x * y, AlgebraMismatch);
}

TEST_CASE("trace values") {
  CHECK(trace(AlgebraElement::identity(m2())).real() == 2.0);

  TracialAlgebra car2 = TracialAlgebra::single_block(4, 0.25);
  CHECK(trace(AlgebraElement::identity(car2)).real() == 1.0);

  CHECK(trace(diag2(m2(), 3.0, 1.0)).real() == 4.0);
}

TEST_CASE("trace is tracial and faithful") {
  TracialAlgebra alg({{2, 1.0}, {3, 0.5}});
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    AlgebraElement x = random_element(rng, alg);
    AlgebraElement y = random_element(rng, alg);
    const double bound = 1e-12 * op_norm(x) * op_norm(y) * alg.total_trace();
    CHECK(std::abs(trace(x * y) - trace(y * x)) <= std::max(bound, 1e-13));
    CHECK(trace(adjoint(x) * x).real() > 0.0);
  }
  CHECK(trace(adjoint(AlgebraElement::zero(alg)) * AlgebraElement::zero(alg)).real() ==
        0.0);
}

TEST_CASE("adjoint") {
  Rng rng(5);
  AlgebraElement h = random_hermitian(rng, m2());
  CHECK(op_norm(adjoint(h) - h) <= 1e-14 * std::max(1.0, op_norm(h)));

  CHECK(op_norm(adjoint(unit2(m2(), 0, 1)) - unit2(m2(), 1, 0)) == 0.0);

  AlgebraElement i_one = AlgebraElement::identity(m2()) * Complex(0.0, 1.0);
  CHECK(op_norm(adjoint(i_one) + i_one) == 0.0);

  AlgebraElement x = random_element(rng, m2());
  CHECK(op_norm(adjoint(adjoint(x)) - x) == 0.0);
}

TEST_CASE("is_positive") {
  CHECK(is_positive(diag2(m2(), 1.0, 0.0), 1e-10));
  CHECK_FALSE(is_positive(diag2(m2(), 1.0, -1e-3), 1e-10));
  CHECK_THROWS_AS(is_positive(unit2(m2(), 0, 1), 1e-10), NotSelfadjoint);
}

TEST_CASE("sqrt_psd") {
  AlgebraElement r = sqrt_psd(diag2(m2(), 4.0, 9.0));
  CHECK(op_norm(r - diag2(m2(), 2.0, 3.0)) <= 1e-12);

  AlgebraElement one = AlgebraElement::identity(m2());
  CHECK(op_norm(sqrt_psd(one) - one) <= 1e-14);

  // rank-1 projector is its own square root
  Rng rng(7);
  Matrix v = ginibre(rng, 2, 1);
  v /= v.norm();
  AlgebraElement p = AlgebraElement::from_block(m2(), 0, Matrix(v * v.adjoint()));
  CHECK(op_norm(sqrt_psd(p) - p) <= 1e-12);

  CHECK_THROWS_AS(sqrt_psd(diag2(m2(), 1.0, -1.0)), NotPositive);

  TracialAlgebra alg({{3, 1.0}, {2, 0.25}});
  for (int rep = 0; rep < 20; ++rep) {
    AlgebraElement g = random_element(rng, alg);
    AlgebraElement a = g * adjoint(g);
    AlgebraElement b = sqrt_psd(a);
    CHECK(op_norm(b * b - a) <= 1e-9 * std::max(1.0, op_norm(a)));
    // fourth power of the iterated root returns the input
    AlgebraElement quarter = sqrt_psd(sqrt_psd(a));
    AlgebraElement fourth = (quarter * quarter) * (quarter * quarter);
    CHECK(op_norm(fourth - a) <= 1e-9 * std::max(1.0, op_norm(a)));
  }
}

TEST_CASE("abs_value") {
  CHECK(op_norm(abs_value(diag2(m2(), -2.0, 3.0)) - diag2(m2(), 2.0, 3.0)) <= 1e-12);

  Rng rng(3);
  AlgebraElement u = random_unitary(rng, m2());
  CHECK(op_norm(abs_value(u) - AlgebraElement::identity(m2())) <= 1e-12);

  // |e_12| = e_22 by hand: (e_12)* e_12 = e_22, which is a projection
  CHECK(op_norm(abs_value(unit2(m2(), 0, 1)) - unit2(m2(), 1, 1)) <= 1e-12);

  TracialAlgebra alg({{2, 1.0}, {3, 0.5}});
  for (int rep = 0; rep < 20; ++rep) {
    AlgebraElement z = random_element(rng, alg);
    CHECK(op_norm(abs_value(z) - abs_value(-z)) <= 1e-10 * std::max(1.0, op_norm(z)));
    CHECK(is_positive(abs_value(z), 1e-9));
  }
}

TEST_CASE("singular value function") {
  StepFunction mu = singular_value_function(diag2(m2(), 3.0, 1.0));
  REQUIRE(mu.steps().size() == 2);
  CHECK(mu.steps()[0].value == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(mu.steps()[0].measure == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mu.steps()[1].value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mu.integral() == doctest::Approx(4.0).epsilon(1e-13));

  TracialAlgebra half = TracialAlgebra::single_block(2, 0.5);
  StepFunction mu_half = singular_value_function(diag2(half, 3.0, 1.0));
  REQUIRE(mu_half.steps().size() == 2);
  CHECK(mu_half.steps()[0].measure == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mu_half.integral() == doctest::Approx(2.0).epsilon(1e-13));

  CHECK(singular_value_function(AlgebraElement::zero(m2())).empty());

  // equal values merge into one step
  StepFunction merged = singular_value_function(AlgebraElement::identity(m2()));
  REQUIRE(merged.steps().size() == 1);
  CHECK(merged.steps()[0].measure == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(merged.value_at(0.0) == doctest::Approx(1.0));
  CHECK(merged.value_at(1.999) == doctest::Approx(1.0));
  CHECK(merged.value_at(2.001) == 0.0);
}

TEST_CASE("mu symmetry identity") {
  TracialAlgebra alg({{2, 1.0}, {3, 0.5}});
  Rng rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    AlgebraElement w = random_element(rng, alg);
    AlgebraElement z = random_element(rng, alg);
    StepFunction lhs = singular_value_function(w * adjoint(z));
    StepFunction rhs = singular_value_function(z * adjoint(w));
    // compare as functions at the breakpoints of both sides
    double t = 0.0;
    for (const auto& step : lhs.steps()) {
      CHECK(std::abs(lhs.value_at(t) - rhs.value_at(t)) <= 1e-10);
      t += step.measure;
    }
    t = 0.0;
    for (const auto& step : rhs.steps()) {
      CHECK(std::abs(lhs.value_at(t) - rhs.value_at(t)) <= 1e-10);
      t += step.measure;
    }
  }
}

TEST_CASE("mu respects increasing functional calculus") {
  TracialAlgebra alg({{3, 1.0}, {2, 0.5}});
  Rng rng(23);
  std::vector<std::function<double(double)>> psis = {
      [](double t) { return t * t; },
      [](double t) { return std::sqrt(t); },
      [](double t) { return t / (1.0 + t); },
  };
  for (int rep = 0; rep < 10; ++rep) {
    AlgebraElement g = random_element(rng, alg);
    AlgebraElement h = g * adjoint(g);
    StepFunction mu_h = singular_value_function(h);
    for (const auto& psi : psis) {
      StepFunction mu_psi = singular_value_function(apply_spectral(h, psi));
      double t = 0.0;
      for (const auto& step : mu_h.steps()) {
        CHECK(std::abs(mu_psi.value_at(t) - psi(mu_h.value_at(t))) <= 1e-10);
        t += step.measure;
      }
    }
  }
}

TEST_CASE("trace norm") {
  Rng rng(29);
  DensityElement rho = random_density(rng, m2());
  CHECK(trace_norm(rho.element()) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(trace_norm(diag2(m2(), 1.0, -1.0)) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(trace_norm(unit2(m2(), 0, 1)) == doctest::Approx(1.0).epsilon(1e-13));

  TracialAlgebra alg({{2, 1.0}, {3, 0.5}});
  for (int rep = 0; rep < 20; ++rep) {
    AlgebraElement z = random_element(rng, alg);
    const double tn = trace_norm(z);
    CHECK(tn == doctest::Approx(trace_norm_oracle(z)).epsilon(1e-11));
    CHECK(tn == doctest::Approx(trace(abs_value(z)).real()).epsilon(1e-12));
    const double lambda = -2.5;
    CHECK(trace_norm(z * lambda) ==
          doctest::Approx(std::abs(lambda) * tn).epsilon(1e-12));
  }
}

TEST_CASE("orthogonality") {
  CHECK(are_orthogonal(diag2(m2(), 1.0, 0.0), diag2(m2(), 0.0, 1.0), 1e-10));

  AlgebraElement p = diag2(m2(), 1.0, 0.0);
  AlgebraElement q = AlgebraElement::identity(m2()) - p;
  CHECK(are_orthogonal(p, q, 1e-10));

  AlgebraElement one = AlgebraElement::identity(m2());
  CHECK_FALSE(are_orthogonal(one, one, 1e-10));

  TracialAlgebra other({{3, 1.0}});
  CHECK_THROWS_AS(
      are_orthogonal(one, AlgebraElement::identity(other), 1e-10),
      AlgebraMismatch);

  // one-sided products must all be checked: nilpotent against a projection
  CHECK_FALSE(are_orthogonal(unit2(m2(), 0, 1), diag2(m2(), 1.0, 0.0), 1e-10));
}

TEST_CASE("density element validation") {
  TracialAlgebra alg = m2();
  CHECK_NOTHROW(DensityElement(diag2(alg, 0.5, 0.5)));
  CHECK_THROWS_AS(DensityElement(diag2(alg, 1.5, -0.5)), NotPositive);
  CHECK_THROWS_AS(DensityElement(diag2(alg, 0.8, 0.4)), NotUnitTrace);
  CHECK_THROWS_AS(DensityElement(unit2(alg, 0, 1)), NotSelfadjoint);
}

TEST_CASE("polar decomposition and unitary completion") {
  TracialAlgebra alg({{3, 1.0}, {2, 0.5}});
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    AlgebraElement z = random_element(rng, alg);
    AlgebraElement u = polar_unitary(z);
    AlgebraElement one = AlgebraElement::identity(alg);
    CHECK(op_norm(adjoint(u) * u - one) <= 1e-10);
    CHECK(op_norm(u * abs_value(z) - z) <= 1e-9 * std::max(1.0, op_norm(z)));
  }
  // rank-deficient case: completion still yields a unitary factor
  AlgebraElement p = diag2(m2(), 1.0, 0.0);
  AlgebraElement u = polar_unitary(p);
  CHECK(op_norm(adjoint(u) * u - AlgebraElement::identity(m2())) <= 1e-12);
  CHECK(op_norm(u * abs_value(p) - p) <= 1e-12);
  AlgebraElement zero = AlgebraElement::zero(m2());
  CHECK(op_norm(adjoint(polar_unitary(zero)) * polar_unitary(zero) -
                AlgebraElement::identity(m2())) <= 1e-12);
}
