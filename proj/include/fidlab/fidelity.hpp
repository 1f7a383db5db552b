#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fidlab/algebra.hpp"

namespace fidlab {

/// F(sigma, rho) = tau(|sigma^{1/2} rho^{1/2}|).
double fidelity(const DensityElement& sigma, const DensityElement& rho);

/// Same quantity for positive elements without the unit-trace requirement.
double fidelity_positive(const AlgebraElement& a, const AlgebraElement& b,
                         double psd_tol = defaults::psd_tol);

/// Integral of the singular value function of sigma^{1/2} rho^{1/2}.
double fidelity_via_mu(const DensityElement& sigma, const DensityElement& rho);

/// d(sigma, rho) = sqrt(1 - F(sigma, rho)).
double bures_distance(const DensityElement& sigma, const DensityElement& rho);

/// (tau(|a^{1/2} b^{1/2}|), sqrt(tau(a) tau(b))) for positive a, b.
std::pair<double, double> fidelity_bounds(const AlgebraElement& a,
                                          const AlgebraElement& b);

enum class VarRoute { TracePos, Var1, Var2 };

struct OptimizerConfig {
  int max_iterations = 500;
  double opt_tol = 1e-6;
  /// Converged when the tau-gradient norm falls below grad_tol * scale.
  double grad_tol = 1e-9;
  /// Stall detection: accepted decrease below obj_tol * max(1, initial).
  double obj_tol = 1e-12;
  /// Lower bound on witness eigenvalues.
  double y_floor = 1e-12;
  /// Inputs with a smaller minimum eigenvalue (relative to the operator
  /// norm scale) get the epsilon-regularized closed-form seed.
  double epsilon_threshold = 1e-8;
};

struct VarDiagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;
  double epsilon = 0.0;
  bool converged = false;
  std::vector<double> objective_history;
};

/// Positive invertible witness for a variational characterization, with the
/// optimal objective value found.
struct VariationalWitness {
  AlgebraElement y;
  double objective_value = 0.0;
  VarRoute route = VarRoute::Var1;
  VarDiagnostics diag;

  /// The fidelity (or trace) estimate implied by the objective.
  double value() const {
    return route == VarRoute::Var2 ? objective_value / 4.0 : objective_value / 2.0;
  }
};

/// Minimizes the variational objective over positive invertible witnesses.
///   Var1: tau(rho y) + tau(sigma y^{-1})            -> 2 F at the infimum
///   Var2: the Var1 objective plus its order-swapped twin, each over its own
///         independent witness                        -> 4 F at the infimum
/// The witness is parameterized as y = exp(h), h Hermitian, and seeded at the
/// closed-form minimizer of the (epsilon-regularized) smooth problem.
VariationalWitness fidelity_variational(const DensityElement& sigma,
                                        const DensityElement& rho, VarRoute route,
                                        const OptimizerConfig& config = {});

/// (1/2) min over positive invertible y of tau(a y) + tau(a y^{-1}) = tau(a).
VariationalWitness trace_variational(const AlgebraElement& a,
                                     const OptimizerConfig& config = {});

/// Witness for the block-matrix characterization: x = sigma^{1/2} u* rho^{1/2}
/// with u the polar unitary of rho^{1/2} sigma^{1/2}, so that
/// [[sigma, x], [x*, rho]] is positive and |tau(x)| attains the supremum.
struct BlockWitness {
  AlgebraElement x;
  AlgebraElement contraction;
};

struct BlockSupremumResult {
  double value;
  BlockWitness witness;
  /// Minimum eigenvalue of the assembled 2x2 block matrix.
  double block_min_eigenvalue;
  /// Largest |tau(sigma^{1/2} y rho^{1/2})| over sampled contractions y.
  double sampled_max;
  int n_samples;
};

BlockSupremumResult fidelity_block_supremum(const DensityElement& sigma,
                                            const DensityElement& rho,
                                            int n_samples = 64,
                                            std::uint64_t seed = 0x5eedULL);

namespace detail {
/// Objective tau(A exp(h)) + tau(B exp(-h)) and its tau-gradient in h.
double pair_objective(const AlgebraElement& a, const AlgebraElement& b,
                      const AlgebraElement& h);
AlgebraElement pair_gradient(const AlgebraElement& a, const AlgebraElement& b,
                             const AlgebraElement& h);
}  // namespace detail

}  // namespace fidlab
