#include "fidlab/channel.hpp"

#include <cmath>
#include <limits>

#include "fidlab/fidelity.hpp"
#include "fidlab/random.hpp"

namespace fidlab {

namespace {

Eigen::Map<const ComplexVector> vec_of(const Matrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

Matrix unvec(const ComplexVector& v, int d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

double min_herm_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig((m + m.adjoint()) * 0.5);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

KrausChannel::KrausChannel(TracialAlgebra algebra,
                           std::vector<AlgebraElement> kraus, double tp_tol)
    : algebra_(std::move(algebra)), kraus_(std::move(kraus)) {
  if (kraus_.empty()) {
    throw Error("KrausChannel: at least one Kraus element required");
  }
  AlgebraElement acc = AlgebraElement::zero(algebra_);
  for (const auto& a : kraus_) {
    if (a.algebra() != algebra_) {
      throw AlgebraMismatch("KrausChannel: Kraus element over a different algebra");
    }
    acc = acc + adjoint(a) * a;
  }
  acc = acc - AlgebraElement::identity(algebra_);
  if (op_norm(acc) > tp_tol) {
    throw Error("KrausChannel: sum a_k* a_k differs from 1 beyond tolerance");
  }
}

AlgebraElement apply(const KrausChannel& ch, const AlgebraElement& x) {
  if (x.algebra() != ch.algebra()) {
    throw AlgebraMismatch("apply: element over a different algebra");
  }
  AlgebraElement acc = AlgebraElement::zero(ch.algebra());
  for (const auto& a : ch.kraus()) {
    acc = acc + a * x * adjoint(a);
  }
  return acc;
}

DensityElement apply(const KrausChannel& ch, const DensityElement& rho) {
  return DensityElement(apply(ch, rho.element()), 1e-8, defaults::trace_tol);
}

LinearMapOnAlgebra::LinearMapOnAlgebra(TracialAlgebra algebra,
                                       std::vector<Matrix> actions)
    : algebra_(std::move(algebra)), actions_(std::move(actions)) {
  if (static_cast<int>(actions_.size()) != algebra_.block_count()) {
    throw Error("LinearMapOnAlgebra: one action matrix per block required");
  }
  for (int b = 0; b < algebra_.block_count(); ++b) {
    const int d2 = algebra_.block_dim(b) * algebra_.block_dim(b);
    if (actions_[b].rows() != d2 || actions_[b].cols() != d2) {
      throw Error("LinearMapOnAlgebra: action matrix has wrong size");
    }
  }
}

LinearMapOnAlgebra LinearMapOnAlgebra::identity(const TracialAlgebra& algebra) {
  std::vector<Matrix> actions;
  for (int b = 0; b < algebra.block_count(); ++b) {
    const int d2 = algebra.block_dim(b) * algebra.block_dim(b);
    actions.push_back(Matrix::Identity(d2, d2));
  }
  return LinearMapOnAlgebra(algebra, std::move(actions));
}

LinearMapOnAlgebra LinearMapOnAlgebra::from_function(
    const TracialAlgebra& algebra,
    const std::function<AlgebraElement(const AlgebraElement&)>& fn) {
  std::vector<Matrix> actions;
  for (int b = 0; b < algebra.block_count(); ++b) {
    const int d = algebra.block_dim(b);
    Matrix action(d * d, d * d);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) {
        Matrix unit = Matrix::Zero(d, d);
        unit(i, j) = 1.0;
        AlgebraElement out = fn(AlgebraElement::from_block(algebra, b, unit));
        action.col(j * d + i) = vec_of(out.block(b));
      }
    }
    actions.push_back(std::move(action));
  }
  return LinearMapOnAlgebra(algebra, std::move(actions));
}

LinearMapOnAlgebra LinearMapOnAlgebra::transpose_map(const TracialAlgebra& algebra) {
  return from_function(algebra, [](const AlgebraElement& x) {
    std::vector<Matrix> blocks;
    for (int b = 0; b < x.block_count(); ++b) blocks.push_back(x.block(b).transpose());
    return AlgebraElement(x.algebra(), std::move(blocks));
  });
}

LinearMapOnAlgebra LinearMapOnAlgebra::trace_collapse(const TracialAlgebra& algebra) {
  if (algebra.block_count() != 1) {
    throw MultiBlockUnsupported(
        "trace_collapse: not block-respecting on direct sums");
  }
  return from_function(algebra, [](const AlgebraElement& x) {
    return AlgebraElement::identity(x.algebra()) *
           (trace(x) / x.algebra().total_trace());
  });
}

AlgebraElement LinearMapOnAlgebra::apply(const AlgebraElement& x) const {
  if (x.algebra() != algebra_) {
    throw AlgebraMismatch("LinearMapOnAlgebra::apply: algebra mismatch");
  }
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra_.block_count(); ++b) {
    const int d = algebra_.block_dim(b);
    ComplexVector out = actions_[b] * vec_of(x.block(b));
    blocks.push_back(unvec(out, d));
  }
  return AlgebraElement(algebra_, std::move(blocks));
}

LinearMapOnAlgebra LinearMapOnAlgebra::compose(const LinearMapOnAlgebra& inner) const {
  if (algebra_ != inner.algebra_) {
    throw AlgebraMismatch("compose: algebra mismatch");
  }
  std::vector<Matrix> actions;
  for (int b = 0; b < algebra_.block_count(); ++b) {
    actions.push_back(actions_[b] * inner.actions_[b]);
  }
  return LinearMapOnAlgebra(algebra_, std::move(actions));
}

LinearMapOnAlgebra LinearMapOnAlgebra::scaled(double factor) const {
  std::vector<Matrix> actions;
  for (const auto& a : actions_) actions.push_back(factor * a);
  return LinearMapOnAlgebra(algebra_, std::move(actions));
}

LinearMapOnAlgebra LinearMapOnAlgebra::plus(const LinearMapOnAlgebra& other) const {
  if (algebra_ != other.algebra_) {
    throw AlgebraMismatch("plus: algebra mismatch");
  }
  std::vector<Matrix> actions;
  for (int b = 0; b < algebra_.block_count(); ++b) {
    actions.push_back(actions_[b] + other.actions_[b]);
  }
  return LinearMapOnAlgebra(algebra_, std::move(actions));
}

LinearMapOnAlgebra kraus_to_map(const KrausChannel& ch) {
  return LinearMapOnAlgebra::from_function(
      ch.algebra(), [&ch](const AlgebraElement& x) { return apply(ch, x); });
}

LinearMapOnAlgebra dual(const KrausChannel& ch) {
  return LinearMapOnAlgebra::from_function(
      ch.algebra(), [&ch](const AlgebraElement& x) {
        AlgebraElement acc = AlgebraElement::zero(ch.algebra());
        for (const auto& a : ch.kraus()) {
          acc = acc + adjoint(a) * x * a;
        }
        return acc;
      });
}

ChoiMatrix choi(const LinearMapOnAlgebra& map) {
  if (map.algebra().block_count() != 1) {
    throw MultiBlockUnsupported("choi: use choi_block for direct sums");
  }
  return choi_block(map, 0);
}

ChoiMatrix choi_block(const LinearMapOnAlgebra& map, int b) {
  const int d = map.algebra().block_dim(b);
  Matrix c = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ComplexVector out = map.actions()[b].col(j * d + i);
      c.block(i * d, j * d, d, d) = unvec(out, d);
    }
  }
  return ChoiMatrix{std::move(c)};
}

CpCertificate is_completely_positive(const LinearMapOnAlgebra& map, double psd_tol) {
  double min_eig = std::numeric_limits<double>::infinity();
  bool hermitian = true;
  double scale = 1.0;
  for (int b = 0; b < map.algebra().block_count(); ++b) {
    ChoiMatrix c = choi_block(map, b);
    scale = std::max(scale, c.matrix.cwiseAbs().maxCoeff());
    if ((c.matrix - c.matrix.adjoint()).norm() > 1e-10 * scale * c.matrix.rows()) {
      hermitian = false;
    }
    min_eig = std::min(min_eig, min_herm_eig(c.matrix));
  }
  return CpCertificate{hermitian && min_eig >= -psd_tol * scale, min_eig};
}

SchwarzCertificate is_schwarz_sampled(const LinearMapOnAlgebra& map, int n_samples,
                                      std::uint64_t seed, double tol) {
  Rng rng(seed);
  SchwarzCertificate cert;
  cert.n_samples = n_samples;
  cert.verdict = true;
  for (int k = 0; k < n_samples; ++k) {
    AlgebraElement x = random_element(rng, map.algebra());
    const double scale = std::max(1.0, op_norm(x));
    AlgebraElement ex = map.apply(x);
    AlgebraElement gap = map.apply(adjoint(x) * x) - adjoint(ex) * ex;
    double min_eig = std::numeric_limits<double>::infinity();
    for (int b = 0; b < gap.block_count(); ++b) {
      min_eig = std::min(min_eig, min_herm_eig(gap.block(b)));
    }
    const double rel = min_eig / (scale * scale);
    if (rel < cert.worst_violation) {
      cert.worst_violation = rel;
      if (rel < -tol) {
        cert.verdict = false;
        cert.counterexample = x;
      }
    }
  }
  return cert;
}

bool is_trace_preserving(const LinearMapOnAlgebra& map, double tol) {
  for (int b = 0; b < map.algebra().block_count(); ++b) {
    const int d = map.algebra().block_dim(b);
    const double w = map.algebra().block_weight(b);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) {
        Matrix out = unvec(map.actions()[b].col(j * d + i), d);
        const Complex got = w * out.trace();
        const Complex want = (i == j) ? Complex(w, 0.0) : Complex(0.0, 0.0);
        if (std::abs(got - want) > tol * std::max(1.0, w)) return false;
      }
    }
  }
  return true;
}

bool is_trace_preserving(const KrausChannel& ch, double tol) {
  AlgebraElement acc = AlgebraElement::zero(ch.algebra());
  for (const auto& a : ch.kraus()) acc = acc + adjoint(a) * a;
  return op_norm(acc - AlgebraElement::identity(ch.algebra())) <= tol;
}

OrderZeroCertificate is_order_zero_sampled(const LinearMapOnAlgebra& map,
                                           int n_samples, std::uint64_t seed,
                                           double tol) {
  Rng rng(seed);
  OrderZeroCertificate cert;
  cert.n_samples = n_samples;
  cert.verdict = true;
  for (int k = 0; k < n_samples; ++k) {
    auto [a, b] = random_orthogonal_densities(rng, map.algebra());
    AlgebraElement ea = map.apply(a.element());
    AlgebraElement eb = map.apply(b.element());
    const double scale = std::max(1.0, op_norm(ea) * op_norm(eb));
    const AlgebraElement eas = adjoint(ea);
    const AlgebraElement ebs = adjoint(eb);
    double overlap = std::max({op_norm(ea * eb), op_norm(eb * ea),
                               op_norm(eas * eb), op_norm(ea * ebs)}) /
                     scale;
    if (overlap > cert.worst_overlap) {
      cert.worst_overlap = overlap;
      if (overlap > tol) {
        cert.verdict = false;
        cert.witness = std::make_pair(a.element(), b.element());
      }
    }
  }
  return cert;
}

AlgebraElement recover_unitary(const KrausChannel& ch, double tol, int n_pairs,
                               std::uint64_t seed) {
  const TracialAlgebra& alg = ch.algebra();
  if (alg.block_count() != 1) {
    throw MultiBlockUnsupported("recover_unitary: single-block algebras only");
  }
  const int d = alg.block_dim(0);

  // sampled fidelity-preservation gate
  Rng rng(seed);
  for (int k = 0; k < n_pairs; ++k) {
    DensityElement sigma = random_density(rng, alg);
    DensityElement rho = random_density(rng, alg);
    if (k % 2 == 1 && d >= 2) {
      auto pair = random_orthogonal_densities(rng, alg);
      sigma = pair.first;
      rho = pair.second;
    }
    const double before = fidelity(sigma, rho);
    const double after =
        fidelity_positive(apply(ch, sigma.element()), apply(ch, rho.element()), 1e-8);
    if (std::abs(after - before) > tol) {
      throw NotFidelityPreserving(
          "recover_unitary: channel changes fidelity on a sampled pair by " +
          std::to_string(after - before));
    }
  }

  auto unit = [&](int i, int j) {
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return AlgebraElement::from_block(alg, 0, std::move(m));
  };

  // column 1 from the top eigenvector of E(e_11)
  AlgebraElement e11_out = apply(ch, unit(0, 0));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(
      (e11_out.block(0) + e11_out.block(0).adjoint()) * 0.5);
  ComplexVector col1 = eig.eigenvectors().col(d - 1);
  int first = -1;
  for (int i = 0; i < d; ++i) {
    if (std::abs(col1(i)) > 1e-6) {
      first = i;
      break;
    }
  }
  if (first < 0) {
    throw NotUnitaryImplementable("recover_unitary: image of e_11 has no usable eigenvector");
  }
  col1 *= std::conj(col1(first)) / std::abs(col1(first));

  Matrix u(d, d);
  u.col(0) = col1;
  for (int j = 1; j < d; ++j) {
    AlgebraElement e1j_out = apply(ch, unit(0, j));
    u.col(j) = e1j_out.block(0).adjoint() * col1;
  }

  if ((u.adjoint() * u - Matrix::Identity(d, d)).norm() > tol) {
    throw NotUnitaryImplementable("recover_unitary: reconstructed matrix is not unitary");
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      AlgebraElement out = apply(ch, unit(i, j));
      Matrix expect = u.col(i) * u.col(j).adjoint();
      if ((out.block(0) - expect).norm() > tol) {
        throw NotUnitaryImplementable(
            "recover_unitary: channel action differs from conjugation by the "
            "reconstructed unitary");
      }
    }
  }
  return AlgebraElement::from_block(alg, 0, std::move(u));
}

KrausChannel random_cptp_channel(Rng& rng, const TracialAlgebra& algebra,
                                 int kraus_count) {
  std::vector<std::vector<Matrix>> kraus_blocks;
  int k_max = 0;
  for (int b = 0; b < algebra.block_count(); ++b) {
    const int d = algebra.block_dim(b);
    const int k = kraus_count > 0 ? kraus_count : d;
    k_max = std::max(k_max, k);
    Matrix big = haar_unitary(rng, k * d);
    Matrix isometry = big.leftCols(d);
    std::vector<Matrix> parts;
    for (int m = 0; m < k; ++m) {
      parts.push_back(isometry.middleRows(m * d, d));
    }
    kraus_blocks.push_back(std::move(parts));
  }
  std::vector<AlgebraElement> kraus;
  for (int m = 0; m < k_max; ++m) {
    std::vector<Matrix> blocks;
    for (int b = 0; b < algebra.block_count(); ++b) {
      const int d = algebra.block_dim(b);
      if (m < static_cast<int>(kraus_blocks[b].size())) {
        blocks.push_back(kraus_blocks[b][m]);
      } else {
        blocks.push_back(Matrix::Zero(d, d));
      }
    }
    kraus.emplace_back(algebra, std::move(blocks));
  }
  return KrausChannel(algebra, std::move(kraus));
}

KrausChannel depolarizing_channel(const TracialAlgebra& algebra, double p) {
  if (algebra.block_count() != 1) {
    throw MultiBlockUnsupported("depolarizing_channel: single-block algebras only");
  }
  const int d = algebra.block_dim(0);
  std::vector<AlgebraElement> kraus;
  const double keep = std::sqrt(1.0 - p + p / (d * d));
  kraus.push_back(AlgebraElement::identity(algebra) * keep);

  if (d == 2) {
    // Pauli form
    Matrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    z << 1, 0, 0, -1;
    const double c = std::sqrt(p) / 2.0;
    for (const Matrix& pauli : {x, y, z}) {
      kraus.push_back(AlgebraElement::from_block(algebra, 0, c * pauli));
    }
  } else {
    // Heisenberg-Weyl form
    const Complex omega = std::exp(Complex(0.0, 2.0 * M_PI / d));
    Matrix shift = Matrix::Zero(d, d), clock = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      shift((i + 1) % d, i) = 1.0;
      clock(i, i) = std::pow(omega, i);
    }
    const double c = std::sqrt(p) / d;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        if (a == 0 && b == 0) continue;
        Matrix w = Matrix::Identity(d, d);
        for (int r = 0; r < a; ++r) w = shift * w;
        for (int r = 0; r < b; ++r) w = clock * w;
        kraus.push_back(AlgebraElement::from_block(algebra, 0, c * w));
      }
    }
  }
  return KrausChannel(algebra, std::move(kraus));
}

}  // namespace fidlab
