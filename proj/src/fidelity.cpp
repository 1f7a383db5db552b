#include "fidlab/fidelity.hpp"

#include <algorithm>
#include <cmath>

#include "fidlab/random.hpp"

namespace fidlab {

double fidelity_positive(const AlgebraElement& a, const AlgebraElement& b,
                         double psd_tol) {
  detail::require_same_algebra(a, b);
  AlgebraElement prod = sqrt_psd(a, psd_tol) * sqrt_psd(b, psd_tol);
  return trace(abs_value(prod)).real();
}

double fidelity(const DensityElement& sigma, const DensityElement& rho) {
  return fidelity_positive(sigma.element(), rho.element());
}

double fidelity_via_mu(const DensityElement& sigma, const DensityElement& rho) {
  detail::require_same_algebra(sigma.element(), rho.element());
  AlgebraElement prod = sqrt_psd(sigma.element()) * sqrt_psd(rho.element());
  return singular_value_function(prod).integral();
}

double bures_distance(const DensityElement& sigma, const DensityElement& rho) {
  return std::sqrt(std::max(0.0, 1.0 - fidelity(sigma, rho)));
}

std::pair<double, double> fidelity_bounds(const AlgebraElement& a,
                                          const AlgebraElement& b) {
  if (!is_positive(a) || !is_positive(b)) {
    throw NotPositive("fidelity_bounds: both inputs must be positive");
  }
  const double f = fidelity_positive(a, b);
  const double g = std::sqrt(std::max(0.0, trace(a).real() * trace(b).real()));
  return {f, g};
}

namespace detail {

namespace {

// first divided difference of exp
double exp_dd(double x, double y) {
  if (std::abs(x - y) < 1e-9) return std::exp(0.5 * (x + y));
  return (std::exp(x) - std::exp(y)) / (x - y);
}

struct ExpState {
  HermitianEig eig;          // of h, eigenvalues clamped
  AlgebraElement h;          // the clamped Hermitian parameter actually used
  AlgebraElement y;          // exp(h)
  AlgebraElement y_inv;      // exp(-h)
};

ExpState exponentiate(const AlgebraElement& h_raw, double h_max) {
  // symmetrize before decomposing; line-search trials accumulate rounding
  AlgebraElement h_sym = (h_raw + adjoint(h_raw)) * 0.5;
  ExpState st{eig_hermitian(h_sym, 1.0), AlgebraElement::zero(h_raw.algebra()),
              AlgebraElement::zero(h_raw.algebra()),
              AlgebraElement::zero(h_raw.algebra())};
  std::vector<Matrix> h_blocks, y_blocks, yinv_blocks;
  for (int b = 0; b < h_raw.block_count(); ++b) {
    RealVector vals = st.eig.values[b];
    for (int i = 0; i < vals.size(); ++i) {
      vals(i) = std::clamp(vals(i), -h_max, h_max);
    }
    st.eig.values[b] = vals;
    RealVector e = vals, einv = vals;
    for (int i = 0; i < vals.size(); ++i) {
      e(i) = std::exp(vals(i));
      einv(i) = std::exp(-vals(i));
    }
    const Matrix& w = st.eig.vectors[b];
    h_blocks.push_back(w * vals.asDiagonal() * w.adjoint());
    y_blocks.push_back(w * e.asDiagonal() * w.adjoint());
    yinv_blocks.push_back(w * einv.asDiagonal() * w.adjoint());
  }
  st.h = AlgebraElement(h_raw.algebra(), std::move(h_blocks));
  st.y = AlgebraElement(h_raw.algebra(), std::move(y_blocks));
  st.y_inv = AlgebraElement(h_raw.algebra(), std::move(yinv_blocks));
  return st;
}

double objective_of(const AlgebraElement& a, const AlgebraElement& b,
                    const ExpState& st) {
  return trace(a * st.y).real() + trace(b * st.y_inv).real();
}

// tau-gradient of tau(A exp(h)) + tau(B exp(-h)) with respect to Hermitian h,
// by the Daleckii-Krein formula in the eigenbasis of h.  When asked, also
// returns a curvature-preconditioned descent direction: each eigenbasis entry
// of the gradient is divided by a diagonal Hessian estimate, which keeps the
// step length sane both near interior minimizers and along the directions
// where the infimum sits at the boundary of the positive cone.
struct GradientInfo {
  AlgebraElement gradient;
  AlgebraElement direction;  // preconditioned, tau(grad * direction) >= 0
  double slope;              // tau(grad * direction)
};

GradientInfo gradient_of(const AlgebraElement& a, const AlgebraElement& b,
                         const ExpState& st) {
  std::vector<Matrix> grad_blocks, dir_blocks;
  double slope = 0.0;
  for (int bidx = 0; bidx < a.block_count(); ++bidx) {
    const Matrix& w = st.eig.vectors[bidx];
    const RealVector& lam = st.eig.values[bidx];
    const int d = static_cast<int>(lam.size());
    Matrix at = w.adjoint() * a.block(bidx) * w;
    Matrix bt = w.adjoint() * b.block(bidx) * w;
    Matrix g(d, d), dir(d, d);
    const double floor = 1e-12;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        g(i, j) = at(i, j) * exp_dd(lam(i), lam(j)) -
                  bt(i, j) * exp_dd(-lam(i), -lam(j));
        const double curv =
            0.5 * (at(i, i).real() * std::exp(lam(i)) +
                   at(j, j).real() * std::exp(lam(j)) +
                   bt(i, i).real() * std::exp(-lam(i)) +
                   bt(j, j).real() * std::exp(-lam(j)));
        dir(i, j) = g(i, j) / std::max(curv, floor);
        // steps beyond the spectral clamp are wasted motion
        const double mag = std::abs(dir(i, j));
        if (mag > 60.0) dir(i, j) *= 60.0 / mag;
        slope += a.algebra().block_weight(bidx) *
                 (std::conj(g(i, j)) * dir(i, j)).real();
      }
    }
    grad_blocks.push_back(w * g * w.adjoint());
    dir_blocks.push_back(w * dir * w.adjoint());
  }
  return GradientInfo{AlgebraElement(a.algebra(), std::move(grad_blocks)),
                      AlgebraElement(a.algebra(), std::move(dir_blocks)), slope};
}

struct MinimizeResult {
  AlgebraElement y;
  double objective;
  VarDiagnostics diag;
};

// gradient descent with backtracking line search over y = exp(h)
MinimizeResult minimize_pair(const AlgebraElement& a, const AlgebraElement& b,
                             AlgebraElement h, const OptimizerConfig& cfg) {
  const double h_max = -std::log(cfg.y_floor);
  const double scale =
      std::max({hs_norm(a), hs_norm(b), 1e-300});

  ExpState st = exponentiate(h, h_max);
  h = st.h;
  double obj = objective_of(a, b, st);
  const double obj0 = obj;
  MinimizeResult res{st.y, obj, {}};
  res.diag.objective_history.push_back(obj);

  bool converged = false;
  double grad_norm = 0.0;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    GradientInfo info = gradient_of(a, b, st);
    grad_norm = hs_norm(info.gradient);
    if (grad_norm <= cfg.grad_tol * scale) {
      converged = true;
      break;
    }
    // Armijo backtracking on the preconditioned direction, restarted from a
    // unit step each iteration
    bool accepted = false;
    double decrease = 0.0;
    double step = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      AlgebraElement h_try = h - info.direction * step;
      ExpState st_try = exponentiate(h_try, h_max);
      const double obj_try = objective_of(a, b, st_try);
      if (obj_try <= obj - 1e-4 * step * info.slope) {
        decrease = obj - obj_try;
        h = st_try.h;  // clamped and exactly Hermitian
        st = std::move(st_try);
        obj = obj_try;
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) break;
    }
    res.diag.objective_history.push_back(obj);
    if (!accepted || decrease <= cfg.obj_tol * std::max(1.0, obj0)) {
      converged = true;  // stalled at the attainable floor
      ++it;
      break;
    }
  }
  res.y = st.y;
  res.objective = obj;
  res.diag.iterations = it;
  res.diag.gradient_norm = grad_norm;
  res.diag.converged = converged;
  if (!converged) {
    throw NonConvergence(
        "variational optimizer exhausted its iteration budget with gradient "
        "norm " +
        std::to_string(grad_norm));
  }
  return res;
}

double min_eigenvalue(const AlgebraElement& h) {
  HermitianEig eig = eig_hermitian(h);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& vals : eig.values) {
    if (vals.size() > 0) m = std::min(m, vals.minCoeff());
  }
  return m;
}

// closed-form minimizer of tau(rho y) + tau(sigma y^{-1}) for invertible
// inputs: the solution of y rho y = sigma.  Uses raw spectral functions so
// that regularizations far below the sqrt_psd noise floor stay usable.
AlgebraElement riccati_witness(const AlgebraElement& sigma,
                               const AlgebraElement& rho) {
  auto sqrt_clamped = [](double t) { return std::sqrt(std::max(t, 0.0)); };
  auto inv_sqrt = [](double t) { return 1.0 / std::sqrt(std::max(t, 1e-300)); };
  auto hermitize = [](const AlgebraElement& x) {
    return (x + adjoint(x)) * 0.5;
  };
  AlgebraElement rho_half = apply_spectral(rho, sqrt_clamped, 1e-6);
  AlgebraElement rho_half_inv = apply_spectral(rho, inv_sqrt, 1e-6);
  AlgebraElement inner = apply_spectral(
      hermitize(rho_half * sigma * rho_half), sqrt_clamped, 1e-2);
  return hermitize(rho_half_inv * inner * rho_half_inv);
}

// seed h0 = log(y*) from the epsilon-regularized closed form.  For singular
// inputs the infimum sits at the boundary; following the regularization
// toward zero along the closed-form path gives a far better start than any
// single epsilon, so the seed is the best witness over a short ladder.
AlgebraElement variational_seed(const AlgebraElement& sigma,
                                const AlgebraElement& rho,
                                const OptimizerConfig& cfg, double* epsilon_out) {
  const double scale = std::max({op_norm(sigma), op_norm(rho), 1e-300});
  std::vector<double> ladder{0.0};
  if (std::min(min_eigenvalue(sigma), min_eigenvalue(rho)) <
      cfg.epsilon_threshold * scale) {
    const double eps0 = cfg.epsilon_threshold * scale;
    ladder = {eps0, 1e-3 * eps0, 1e-6 * eps0};
  }
  AlgebraElement one = AlgebraElement::identity(sigma.algebra());
  AlgebraElement best = one;
  double best_obj = std::numeric_limits<double>::infinity();
  double best_eps = 0.0;
  for (double eps : ladder) {
    AlgebraElement y = riccati_witness(sigma + one * eps, rho + one * eps);
    AlgebraElement y_inv =
        apply_spectral(y, [](double t) { return 1.0 / std::max(t, 1e-300); }, 1e-6);
    const double obj = trace(rho * y).real() + trace(sigma * y_inv).real();
    if (obj < best_obj) {
      best_obj = obj;
      best = y;
      best_eps = eps;
    }
  }
  if (epsilon_out) *epsilon_out = best_eps;
  return apply_spectral(
      best, [](double t) { return std::log(std::max(t, 1e-300)); }, 1e-6);
}

}  // namespace

double pair_objective(const AlgebraElement& a, const AlgebraElement& b,
                      const AlgebraElement& h) {
  ExpState st = exponentiate(h, 1e6);
  return objective_of(a, b, st);
}

AlgebraElement pair_gradient(const AlgebraElement& a, const AlgebraElement& b,
                             const AlgebraElement& h) {
  ExpState st = exponentiate(h, 1e6);
  return gradient_of(a, b, st).gradient;
}

}  // namespace detail

VariationalWitness fidelity_variational(const DensityElement& sigma,
                                        const DensityElement& rho, VarRoute route,
                                        const OptimizerConfig& config) {
  detail::require_same_algebra(sigma.element(), rho.element());
  if (route == VarRoute::TracePos) {
    throw Error("fidelity_variational: use trace_variational for the trace route");
  }
  const AlgebraElement& s = sigma.element();
  const AlgebraElement& r = rho.element();

  double eps = 0.0;
  AlgebraElement h0 = detail::variational_seed(s, r, config, &eps);
  detail::MinimizeResult first = detail::minimize_pair(r, s, h0, config);

  VariationalWitness w{first.y, first.objective, route, first.diag};
  w.diag.epsilon = eps;
  if (route == VarRoute::Var2) {
    // order-swapped twin over its own independent witness
    AlgebraElement h0_swapped = detail::variational_seed(r, s, config, nullptr);
    detail::MinimizeResult second = detail::minimize_pair(s, r, h0_swapped, config);
    w.objective_value += second.objective;
    w.diag.iterations += second.diag.iterations;
    w.diag.gradient_norm = std::max(w.diag.gradient_norm, second.diag.gradient_norm);
    w.diag.converged = w.diag.converged && second.diag.converged;
  }
  return w;
}

VariationalWitness trace_variational(const AlgebraElement& a,
                                     const OptimizerConfig& config) {
  if (!is_positive(a)) {
    throw NotPositive("trace_variational: input must be positive");
  }
  AlgebraElement h0 = AlgebraElement::zero(a.algebra());
  detail::MinimizeResult res = detail::minimize_pair(a, a, h0, config);
  return VariationalWitness{res.y, res.objective, VarRoute::TracePos, res.diag};
}

BlockSupremumResult fidelity_block_supremum(const DensityElement& sigma,
                                            const DensityElement& rho,
                                            int n_samples, std::uint64_t seed) {
  detail::require_same_algebra(sigma.element(), rho.element());
  AlgebraElement s_half = sqrt_psd(sigma.element());
  AlgebraElement r_half = sqrt_psd(rho.element());
  AlgebraElement u = polar_unitary(r_half * s_half);
  AlgebraElement contraction = adjoint(u);
  AlgebraElement x = s_half * contraction * r_half;

  BlockSupremumResult out{std::abs(trace(x)), BlockWitness{x, contraction}, 0.0, 0.0,
                          n_samples};

  // minimum eigenvalue of [[sigma, x], [x*, rho]], blockwise
  double min_eig = std::numeric_limits<double>::infinity();
  const TracialAlgebra& alg = sigma.algebra();
  for (int b = 0; b < alg.block_count(); ++b) {
    const int d = alg.block_dim(b);
    Matrix big(2 * d, 2 * d);
    big.topLeftCorner(d, d) = sigma.element().block(b);
    big.topRightCorner(d, d) = x.block(b);
    big.bottomLeftCorner(d, d) = x.block(b).adjoint();
    big.bottomRightCorner(d, d) = rho.element().block(b);
    Eigen::SelfAdjointEigenSolver<Matrix> eig((big + big.adjoint()) * 0.5);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  }
  out.block_min_eigenvalue = min_eig;

  Rng rng(seed);
  double worst = out.value;
  for (int k = 0; k < n_samples; ++k) {
    AlgebraElement y = random_contraction(rng, alg);
    worst = std::max(worst, std::abs(trace(s_half * y * r_half)));
  }
  out.sampled_max = worst;
  return out;
}

}  // namespace fidlab
