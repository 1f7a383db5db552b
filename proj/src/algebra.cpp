#include "fidlab/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace fidlab {

TracialAlgebra::TracialAlgebra(std::vector<AlgebraBlock> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) {
    throw Error("TracialAlgebra: at least one block required");
  }
  for (const auto& b : blocks_) {
    if (b.dim < 1) {
      throw Error("TracialAlgebra: block dim must be >= 1");
    }
    if (!(b.weight > 0.0)) {
      throw Error("TracialAlgebra: block weight must be > 0");
    }
    total_trace_ += b.weight * b.dim;
    total_dim_ += b.dim;
  }
}

TracialAlgebra TracialAlgebra::single_block(int dim, double weight) {
  return TracialAlgebra({{dim, weight}});
}

bool TracialAlgebra::operator==(const TracialAlgebra& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].dim != other.blocks_[i].dim) return false;
    if (blocks_[i].weight != other.blocks_[i].weight) return false;
  }
  return true;
}

AlgebraElement::AlgebraElement(TracialAlgebra algebra, std::vector<Matrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != algebra_.block_count()) {
    throw Error("AlgebraElement: block count does not match algebra");
  }
  for (int b = 0; b < algebra_.block_count(); ++b) {
    const int d = algebra_.block_dim(b);
    if (blocks_[b].rows() != d || blocks_[b].cols() != d) {
      throw Error("AlgebraElement: block " + std::to_string(b) +
                  " has wrong dimensions");
    }
  }
}

AlgebraElement AlgebraElement::zero(const TracialAlgebra& algebra) {
  std::vector<Matrix> blocks;
  blocks.reserve(algebra.block_count());
  for (int b = 0; b < algebra.block_count(); ++b) {
    blocks.push_back(Matrix::Zero(algebra.block_dim(b), algebra.block_dim(b)));
  }
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement AlgebraElement::identity(const TracialAlgebra& algebra) {
  std::vector<Matrix> blocks;
  blocks.reserve(algebra.block_count());
  for (int b = 0; b < algebra.block_count(); ++b) {
    blocks.push_back(Matrix::Identity(algebra.block_dim(b), algebra.block_dim(b)));
  }
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement AlgebraElement::from_block(const TracialAlgebra& algebra, int b,
                                          Matrix m) {
  AlgebraElement out = zero(algebra);
  std::vector<Matrix> blocks = out.blocks_;
  if (b < 0 || b >= algebra.block_count()) {
    throw Error("from_block: block index out of range");
  }
  if (m.rows() != algebra.block_dim(b) || m.cols() != algebra.block_dim(b)) {
    throw Error("from_block: matrix dimensions do not match block");
  }
  blocks[b] = std::move(m);
  return AlgebraElement(algebra, std::move(blocks));
}

namespace detail {

void require_same_algebra(const AlgebraElement& x, const AlgebraElement& y) {
  if (x.algebra() != y.algebra()) {
    throw AlgebraMismatch("elements belong to different algebras");
  }
}

Matrix complete_unitary(const Matrix& u, int dim) {
  Matrix out(dim, dim);
  int r = static_cast<int>(u.cols());
  if (r > 0) out.leftCols(r) = u;
  for (int j = 0; j < dim && r < dim; ++j) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(j) = 1.0;
    // two rounds of projection keep the result orthonormal to working precision
    for (int pass = 0; pass < 2; ++pass) {
      for (int c = 0; c < r; ++c) {
        v -= out.col(c).dot(v) * out.col(c);
      }
    }
    const double nrm = v.norm();
    if (nrm > 1e-4) {
      out.col(r++) = v / nrm;
    }
  }
  if (r != dim) {
    throw Error("complete_unitary: failed to complete basis");
  }
  return out;
}

}  // namespace detail

AlgebraElement AlgebraElement::operator+(const AlgebraElement& rhs) const {
  detail::require_same_algebra(*this, rhs);
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) blocks.push_back(blocks_[b] + rhs.blocks_[b]);
  return AlgebraElement(algebra_, std::move(blocks));
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& rhs) const {
  detail::require_same_algebra(*this, rhs);
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) blocks.push_back(blocks_[b] - rhs.blocks_[b]);
  return AlgebraElement(algebra_, std::move(blocks));
}

AlgebraElement AlgebraElement::operator-() const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& m : blocks_) blocks.push_back(-m);
  return AlgebraElement(algebra_, std::move(blocks));
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& rhs) const {
  detail::require_same_algebra(*this, rhs);
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) blocks.push_back(blocks_[b] * rhs.blocks_[b]);
  return AlgebraElement(algebra_, std::move(blocks));
}

AlgebraElement AlgebraElement::operator*(Complex scalar) const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& m : blocks_) blocks.push_back(scalar * m);
  return AlgebraElement(algebra_, std::move(blocks));
}

AlgebraElement AlgebraElement::operator*(double scalar) const {
  return (*this) * Complex(scalar, 0.0);
}

AlgebraElement operator*(Complex scalar, const AlgebraElement& x) { return x * scalar; }
AlgebraElement operator*(double scalar, const AlgebraElement& x) { return x * scalar; }

Complex trace(const AlgebraElement& x) {
  Complex t = 0.0;
  for (int b = 0; b < x.block_count(); ++b) {
    t += x.algebra().block_weight(b) * x.block(b).trace();
  }
  return t;
}

AlgebraElement adjoint(const AlgebraElement& x) {
  std::vector<Matrix> blocks;
  blocks.reserve(x.block_count());
  for (int b = 0; b < x.block_count(); ++b) blocks.push_back(x.block(b).adjoint());
  return AlgebraElement(x.algebra(), std::move(blocks));
}

double op_norm(const AlgebraElement& x) {
  double nrm = 0.0;
  for (int b = 0; b < x.block_count(); ++b) {
    const Matrix& m = x.block(b);
    Matrix gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Matrix> eig((gram + gram.adjoint()) * 0.5);
    const double top = eig.eigenvalues().maxCoeff();
    nrm = std::max(nrm, std::sqrt(std::max(0.0, top)));
  }
  return nrm;
}

double hs_norm(const AlgebraElement& x) {
  double s = 0.0;
  for (int b = 0; b < x.block_count(); ++b) {
    s += x.algebra().block_weight(b) * x.block(b).squaredNorm();
  }
  return std::sqrt(s);
}

bool is_selfadjoint(const AlgebraElement& x, double tol) {
  const double scale = std::max(1.0, op_norm(x));
  return op_norm(x - adjoint(x)) <= tol * scale;
}

bool is_positive(const AlgebraElement& x, double tol) {
  const double scale = std::max(1.0, op_norm(x));
  if (op_norm(x - adjoint(x)) > tol * scale) {
    throw NotSelfadjoint("is_positive: element is not selfadjoint within tolerance");
  }
  HermitianEig eig = eig_hermitian(x, /*herm_tol=*/tol);
  for (const auto& vals : eig.values) {
    if (vals.size() > 0 && vals.minCoeff() < -tol * scale) return false;
  }
  return true;
}

HermitianEig eig_hermitian(const AlgebraElement& x, double herm_tol) {
  const double scale = std::max(1.0, op_norm(x));
  if (op_norm(x - adjoint(x)) > herm_tol * scale * 10.0) {
    throw NotSelfadjoint("eig_hermitian: element is not selfadjoint");
  }
  HermitianEig out;
  out.values.reserve(x.block_count());
  out.vectors.reserve(x.block_count());
  for (int b = 0; b < x.block_count(); ++b) {
    Matrix h = (x.block(b) + x.block(b).adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    if (eig.info() != Eigen::Success) {
      throw Error("eig_hermitian: eigensolver failed on block " + std::to_string(b));
    }
    out.values.push_back(eig.eigenvalues());
    out.vectors.push_back(eig.eigenvectors());
  }
  return out;
}

AlgebraElement apply_spectral(const AlgebraElement& x,
                              const std::function<double(double)>& f,
                              double herm_tol) {
  HermitianEig eig = eig_hermitian(x, herm_tol);
  std::vector<Matrix> blocks;
  blocks.reserve(x.block_count());
  for (int b = 0; b < x.block_count(); ++b) {
    RealVector vals = eig.values[b];
    for (int i = 0; i < vals.size(); ++i) vals(i) = f(vals(i));
    blocks.push_back(eig.vectors[b] * vals.asDiagonal() * eig.vectors[b].adjoint());
  }
  return AlgebraElement(x.algebra(), std::move(blocks));
}

AlgebraElement sqrt_psd(const AlgebraElement& a, double psd_tol) {
  const double scale = std::max(1.0, op_norm(a));
  if (op_norm(a - adjoint(a)) > psd_tol * scale) {
    throw NotSelfadjoint("sqrt_psd: element is not selfadjoint within tolerance");
  }
  HermitianEig eig = eig_hermitian(a, psd_tol);
  // eigenvalues at the scale of spectral noise are treated as exact zeros;
  // taking their square root would otherwise inject sqrt(eps)-size spurious
  // support into the root
  const double zero_floor = 1e-13 * scale;
  std::vector<Matrix> blocks;
  blocks.reserve(a.block_count());
  for (int b = 0; b < a.block_count(); ++b) {
    RealVector vals = eig.values[b];
    for (int i = 0; i < vals.size(); ++i) {
      if (vals(i) < -psd_tol * scale) {
        throw NotPositive("sqrt_psd: eigenvalue " + std::to_string(vals(i)) +
                          " below tolerance");
      }
      vals(i) = vals(i) <= zero_floor ? 0.0 : std::sqrt(vals(i));
    }
    blocks.push_back(eig.vectors[b] * vals.asDiagonal() * eig.vectors[b].adjoint());
  }
  return AlgebraElement(a.algebra(), std::move(blocks));
}

AlgebraElement abs_value(const AlgebraElement& z) {
  SingularDecomposition svd = svd_from_eig(z);
  std::vector<Matrix> blocks;
  blocks.reserve(z.block_count());
  for (int b = 0; b < z.block_count(); ++b) {
    blocks.push_back(svd.v[b] * svd.s[b].asDiagonal() * svd.v[b].adjoint());
  }
  return AlgebraElement(z.algebra(), std::move(blocks));
}

SingularDecomposition svd_from_eig(const AlgebraElement& z) {
  SingularDecomposition out;
  out.u.reserve(z.block_count());
  out.s.reserve(z.block_count());
  out.v.reserve(z.block_count());
  for (int b = 0; b < z.block_count(); ++b) {
    const Matrix& m = z.block(b);
    const int d = static_cast<int>(m.rows());
    const double m_scale = std::max(1.0, m.norm());

    RealVector s(d);
    Matrix vecs(d, d);
    if ((m - m.adjoint()).norm() <= 1e-13 * m_scale) {
      // selfadjoint fast path: singular values are |eigenvalues|, which
      // avoids squaring the condition number through the Gram matrix
      Eigen::SelfAdjointEigenSolver<Matrix> eig((m + m.adjoint()) * 0.5);
      if (eig.info() != Eigen::Success) {
        throw Error("svd_from_eig: eigensolver failed on block " + std::to_string(b));
      }
      std::vector<int> order(d);
      for (int i = 0; i < d; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](int a, int c) {
        return std::abs(eig.eigenvalues()(a)) > std::abs(eig.eigenvalues()(c));
      });
      for (int i = 0; i < d; ++i) {
        s(i) = std::abs(eig.eigenvalues()(order[i]));
        vecs.col(i) = eig.eigenvectors().col(order[i]);
      }
    } else {
      Matrix gram = m.adjoint() * m;
      Eigen::SelfAdjointEigenSolver<Matrix> eig((gram + gram.adjoint()) * 0.5);
      if (eig.info() != Eigen::Success) {
        throw Error("svd_from_eig: eigensolver failed on block " + std::to_string(b));
      }
      // descending order, with each value refined as ||m v|| to recover the
      // accuracy lost by squaring
      for (int i = 0; i < d; ++i) {
        vecs.col(i) = eig.eigenvectors().col(d - 1 - i);
        s(i) = (m * vecs.col(i)).norm();
      }
      std::vector<int> order(d);
      for (int i = 0; i < d; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int c) { return s(a) > s(c); });
      RealVector s_sorted(d);
      Matrix vecs_sorted(d, d);
      for (int i = 0; i < d; ++i) {
        s_sorted(i) = s(order[i]);
        vecs_sorted.col(i) = vecs.col(order[i]);
      }
      s = std::move(s_sorted);
      vecs = std::move(vecs_sorted);
    }
    const double smax = s.size() > 0 ? s(0) : 0.0;
    const double rank_tol = 1e-12 * std::max(smax, 1e-300);
    int rank = 0;
    Matrix u_range(d, d);
    for (int i = 0; i < d; ++i) {
      if (s(i) > rank_tol) {
        ComplexVector col = m * vecs.col(i) / s(i);
        // re-orthogonalize against accepted columns for numerical safety
        for (int c = 0; c < rank; ++c) {
          col -= u_range.col(c).dot(col) * u_range.col(c);
        }
        const double nrm = col.norm();
        if (nrm > 0.5) {
          u_range.col(rank++) = col / nrm;
        }
      }
    }
    out.u.push_back(detail::complete_unitary(u_range.leftCols(rank), d));
    out.s.push_back(std::move(s));
    out.v.push_back(std::move(vecs));
  }
  return out;
}

AlgebraElement polar_unitary(const AlgebraElement& z) {
  SingularDecomposition svd = svd_from_eig(z);
  std::vector<Matrix> blocks;
  blocks.reserve(z.block_count());
  for (int b = 0; b < z.block_count(); ++b) {
    blocks.push_back(svd.u[b] * svd.v[b].adjoint());
  }
  return AlgebraElement(z.algebra(), std::move(blocks));
}

StepFunction::StepFunction(std::vector<Step> steps, double merge_tol) {
  std::stable_sort(steps.begin(), steps.end(),
                   [](const Step& a, const Step& b) { return a.value > b.value; });
  for (const Step& s : steps) {
    if (!(s.measure > 0.0) || s.value <= 0.0) continue;
    if (!steps_.empty() && steps_.back().value - s.value <= merge_tol) {
      steps_.back().measure += s.measure;
    } else {
      steps_.push_back(s);
    }
  }
}

double StepFunction::integral() const {
  double acc = 0.0;
  for (const Step& s : steps_) acc += s.value * s.measure;
  return acc;
}

double StepFunction::total_measure() const {
  double acc = 0.0;
  for (const Step& s : steps_) acc += s.measure;
  return acc;
}

double StepFunction::value_at(double t) const {
  if (t < 0.0) return steps_.empty() ? 0.0 : steps_.front().value;
  double cum = 0.0;
  for (const Step& s : steps_) {
    cum += s.measure;
    if (t < cum) return s.value;
  }
  return 0.0;
}

StepFunction singular_value_function(const AlgebraElement& z) {
  SingularDecomposition svd = svd_from_eig(z);
  std::vector<StepFunction::Step> steps;
  for (int b = 0; b < z.block_count(); ++b) {
    const double w = z.algebra().block_weight(b);
    for (int i = 0; i < svd.s[b].size(); ++i) {
      steps.push_back({svd.s[b](i), w});
    }
  }
  return StepFunction(std::move(steps));
}

double trace_norm(const AlgebraElement& z) {
  return singular_value_function(z).integral();
}

bool are_orthogonal(const AlgebraElement& x, const AlgebraElement& y, double tol) {
  detail::require_same_algebra(x, y);
  const double scale = std::max(1.0, op_norm(x) * op_norm(y));
  const AlgebraElement xs = adjoint(x);
  const AlgebraElement ys = adjoint(y);
  return op_norm(x * y) <= tol * scale && op_norm(y * x) <= tol * scale &&
         op_norm(xs * y) <= tol * scale && op_norm(x * ys) <= tol * scale;
}

DensityElement::DensityElement(AlgebraElement element, double psd_tol,
                               double trace_tol)
    : element_(std::move(element)) {
  if (!is_positive(element_, psd_tol)) {
    throw NotPositive("DensityElement: element is not positive semidefinite");
  }
  const Complex t = trace(element_);
  if (std::abs(t - Complex(1.0, 0.0)) > trace_tol) {
    throw NotUnitTrace("DensityElement: tau(rho) differs from 1 beyond tolerance");
  }
}

}  // namespace fidlab
