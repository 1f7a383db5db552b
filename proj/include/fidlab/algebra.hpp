#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "fidlab/errors.hpp"

namespace fidlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

namespace defaults {
inline constexpr double psd_tol = 1e-10;
inline constexpr double trace_tol = 1e-9;
inline constexpr double herm_tol = 1e-10;
inline constexpr double tp_tol = 1e-8;
inline constexpr double step_merge_tol = 1e-12;
}  // namespace defaults

struct AlgebraBlock {
  int dim;
  double weight;
};

/// A finite direct sum of full complex matrix blocks, each carrying a
/// strictly positive trace weight.  The trace functional is
/// tau(x) = sum_b weight_b * tr(x_b), which is faithful by construction.
class TracialAlgebra {
 public:
  explicit TracialAlgebra(std::vector<AlgebraBlock> blocks);

  static TracialAlgebra single_block(int dim, double weight = 1.0);

  const std::vector<AlgebraBlock>& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int block_dim(int b) const { return blocks_[b].dim; }
  double block_weight(int b) const { return blocks_[b].weight; }

  /// tau(1) = sum_b weight_b * dim_b.
  double total_trace() const { return total_trace_; }
  /// Sum of block dimensions.
  int total_dim() const { return total_dim_; }

  bool operator==(const TracialAlgebra& other) const;
  bool operator!=(const TracialAlgebra& other) const { return !(*this == other); }

 private:
  std::vector<AlgebraBlock> blocks_;
  double total_trace_ = 0.0;
  int total_dim_ = 0;
};

/// A block-diagonal element of a TracialAlgebra.  Immutable after
/// construction; all arithmetic produces fresh values.
class AlgebraElement {
 public:
  AlgebraElement(TracialAlgebra algebra, std::vector<Matrix> blocks);

  static AlgebraElement zero(const TracialAlgebra& algebra);
  static AlgebraElement identity(const TracialAlgebra& algebra);
  /// Element supported on a single block, zero elsewhere.
  static AlgebraElement from_block(const TracialAlgebra& algebra, int b, Matrix m);

  const TracialAlgebra& algebra() const { return algebra_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const Matrix& block(int b) const { return blocks_[b]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  AlgebraElement operator+(const AlgebraElement& rhs) const;
  AlgebraElement operator-(const AlgebraElement& rhs) const;
  AlgebraElement operator-() const;
  AlgebraElement operator*(const AlgebraElement& rhs) const;
  AlgebraElement operator*(Complex scalar) const;
  AlgebraElement operator*(double scalar) const;

 private:
  TracialAlgebra algebra_;
  std::vector<Matrix> blocks_;
};

AlgebraElement operator*(Complex scalar, const AlgebraElement& x);
AlgebraElement operator*(double scalar, const AlgebraElement& x);

Complex trace(const AlgebraElement& x);
AlgebraElement adjoint(const AlgebraElement& x);

/// Operator norm: largest singular value over all blocks.
double op_norm(const AlgebraElement& x);
/// Hilbert-Schmidt norm in the tau inner product: sqrt(tau(x* x)).
double hs_norm(const AlgebraElement& x);

bool is_selfadjoint(const AlgebraElement& x, double tol = defaults::herm_tol);

/// True iff every block eigenvalue is >= -tol * max(1, ||x||).
/// Throws NotSelfadjoint when x is not selfadjoint within tol.
bool is_positive(const AlgebraElement& x, double tol = defaults::psd_tol);

/// Blockwise Hermitian eigendecomposition, the single spectral primitive.
struct HermitianEig {
  std::vector<RealVector> values;   // ascending per block
  std::vector<Matrix> vectors;      // unitary per block
};
HermitianEig eig_hermitian(const AlgebraElement& x, double herm_tol = defaults::herm_tol);

/// f applied to a selfadjoint element through its spectrum.
AlgebraElement apply_spectral(const AlgebraElement& x,
                              const std::function<double(double)>& f,
                              double herm_tol = defaults::herm_tol);

/// Unique PSD square root.  Eigenvalues in [-psd_tol*||a||, 0) are clamped
/// to zero; anything more negative raises NotPositive.
AlgebraElement sqrt_psd(const AlgebraElement& a, double psd_tol = defaults::psd_tol);

/// |z| = (z* z)^{1/2}, computed from the eigendecomposition of z* z.
AlgebraElement abs_value(const AlgebraElement& z);

/// Singular value decomposition z = U diag(s) V*, derived blockwise from the
/// Hermitian eigendecomposition of z* z.  U is completed to a unitary on
/// rank-deficient blocks by Gram-Schmidt against the canonical basis order.
struct SingularDecomposition {
  std::vector<Matrix> u;
  std::vector<RealVector> s;  // descending per block
  std::vector<Matrix> v;
};
SingularDecomposition svd_from_eig(const AlgebraElement& z);

/// Unitary u with z = u |z| (polar decomposition, kernel completed).
AlgebraElement polar_unitary(const AlgebraElement& z);

/// Nonincreasing step function: a list of (value, measure) pairs.  Realizes
/// the generalized singular value function mu_z, where each singular value
/// of block b occupies measure weight_b.
class StepFunction {
 public:
  struct Step {
    double value;
    double measure;
  };

  StepFunction() = default;
  /// Sorts descending, merges values within merge_tol, drops zeros.
  explicit StepFunction(std::vector<Step> steps,
                        double merge_tol = defaults::step_merge_tol);

  const std::vector<Step>& steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }

  double integral() const;
  double total_measure() const;
  /// Right-continuous evaluation; zero beyond the total measure.
  double value_at(double t) const;

 private:
  std::vector<Step> steps_;
};

StepFunction singular_value_function(const AlgebraElement& z);

/// tau(|z|), computed as the integral of the singular value function.
double trace_norm(const AlgebraElement& z);

/// True iff xy, yx, x*y and xy* all vanish within tol * max(1, ||x|| ||y||).
bool are_orthogonal(const AlgebraElement& x, const AlgebraElement& y,
                    double tol = defaults::psd_tol);

/// A positive element with tau(rho) = 1.
class DensityElement {
 public:
  explicit DensityElement(AlgebraElement element,
                          double psd_tol = defaults::psd_tol,
                          double trace_tol = defaults::trace_tol);

  const AlgebraElement& element() const { return element_; }
  const TracialAlgebra& algebra() const { return element_.algebra(); }

 private:
  AlgebraElement element_;
};

namespace detail {
void require_same_algebra(const AlgebraElement& x, const AlgebraElement& y);
/// Append orthonormal columns to u (d x r, orthonormal) until it is square,
/// drawing candidates from the canonical basis in order.
Matrix complete_unitary(const Matrix& u, int dim);
}  // namespace detail

}  // namespace fidlab
