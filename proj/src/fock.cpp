#include "squeezelab/fock.hpp"

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace squeezelab {

double log_factorial(int n) {
  static std::vector<double> table{0.0};
  static std::mutex table_mutex;
  if (n < 0) throw ValidationError("log_factorial: negative argument");
  std::lock_guard lock(table_mutex);
  while (static_cast<int>(table.size()) <= n) {
    const auto k = static_cast<double>(table.size());
    table.push_back(table.back() + std::log(k));
  }
  return table[n];
}

namespace {

void require_cutoff(int cutoff) {
  if (cutoff < 2) throw DimensionError(fmt::format("cutoff must be >= 2, got {}", cutoff));
}

// alpha^n / sqrt(n!) without overflow.
Complex scaled_power(Complex alpha, int n) {
  if (n == 0) return 1.0;
  const double mag = std::abs(alpha);
  if (mag == 0.0) return 0.0;
  const double log_mag = n * std::log(mag) - 0.5 * log_factorial(n);
  return std::polar(std::exp(log_mag), n * std::arg(alpha));
}

}  // namespace

Ket::Ket(CVector amplitudes, double truncation_deficit)
    : amps_(std::move(amplitudes)), deficit_(truncation_deficit) {
  if (amps_.size() < 2) throw DimensionError("ket dimension must be >= 2");
  const double norm2 = amps_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTolerance) {
    throw ValidationError(fmt::format("ket is not normalized: |psi|^2 = {:.12g}", norm2));
  }
}

Ket Ket::normalized(CVector amplitudes, double max_deficit) {
  const double norm2 = amplitudes.squaredNorm();
  if (!(norm2 > 0.0)) throw ValidationError("cannot normalize a zero vector");
  const double deficit = std::max(0.0, 1.0 - norm2);
  if (deficit > max_deficit) {
    throw CutoffError(fmt::format("truncation deficit {:.3e} exceeds {:.1e}", deficit, max_deficit),
                      deficit);
  }
  amplitudes /= std::sqrt(norm2);
  return Ket(std::move(amplitudes), deficit);
}

DensityMatrix::DensityMatrix(CMatrix elems, double truncation_deficit)
    : elems_(std::move(elems)), deficit_(truncation_deficit) {
  if (elems_.rows() != elems_.cols()) throw DimensionError("density matrix must be square");
  if (elems_.rows() < 2) throw DimensionError("density matrix dimension must be >= 2");
  const double herm = (elems_ - elems_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTolerance) {
    throw ValidationError(fmt::format("density matrix not Hermitian (residual {:.3e})", herm));
  }
  const Complex tr = elems_.trace();
  if (std::abs(tr - 1.0) > kNormTolerance) {
    throw ValidationError(fmt::format("density matrix trace {:.12g}{:+.3e}i != 1", tr.real(), tr.imag()));
  }
  const double lowest = min_eigenvalue(elems_);
  if (lowest < -kNegativeEigenTolerance) {
    throw ValidationError(fmt::format("density matrix has eigenvalue {:.3e} < 0", lowest));
  }
}

DensityMatrix DensityMatrix::normalized(const CMatrix& elems, double truncation_deficit) {
  CMatrix herm = 0.5 * (elems + elems.adjoint());
  const double tr = herm.trace().real();
  if (!(tr > 0.0)) throw ValidationError("cannot normalize an operator with non-positive trace");
  herm /= tr;
  return DensityMatrix(std::move(herm), truncation_deficit);
}

DensityMatrix DensityMatrix::from_ket(const Ket& ket) {
  const CVector& v = ket.amplitudes();
  return DensityMatrix(v * v.adjoint(), ket.truncation_deficit());
}

DensityMatrix DensityMatrix::resized(int new_dim) const {
  require_cutoff(new_dim);
  if (new_dim == dim()) return *this;
  if (new_dim > dim()) {
    CMatrix big = CMatrix::Zero(new_dim, new_dim);
    big.topLeftCorner(dim(), dim()) = elems_;
    return DensityMatrix(std::move(big), deficit_);
  }
  CMatrix small = elems_.topLeftCorner(new_dim, new_dim);
  const double kept = small.trace().real();
  const double lost = 1.0 - kept;
  if (lost > kMaxSilentDeficit) {
    throw CutoffError(fmt::format("truncating to cutoff {} discards weight {:.3e}", new_dim, lost), lost);
  }
  return DensityMatrix::normalized(small, deficit_ + std::max(lost, 0.0));
}

DensityMatrix DensityMatrix::mixed_with(const DensityMatrix& other, double weight) const {
  if (other.dim() != dim()) throw DimensionError("mixture of states with different cutoffs");
  if (weight < 0.0 || weight > 1.0) throw ValidationError("mixture weight outside [0,1]");
  return DensityMatrix(weight * elems_ + (1.0 - weight) * other.elems_,
                       weight * deficit_ + (1.0 - weight) * other.deficit_);
}

ModeOperator::ModeOperator(CMatrix elems, OperatorKind kind, int modes)
    : elems_(std::move(elems)), kind_(kind), modes_(modes), cutoff_(0) {
  if (elems_.rows() != elems_.cols()) throw DimensionError("operator must be square");
  if (modes_ == 1) {
    cutoff_ = static_cast<int>(elems_.rows());
  } else if (modes_ == 2) {
    cutoff_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(elems_.rows()))));
    if (cutoff_ * cutoff_ != elems_.rows()) throw DimensionError("two-mode operator dimension is not a square");
  } else {
    throw DimensionError("only one- and two-mode operators are supported");
  }
}

ModeOperator annihilation(int cutoff) {
  require_cutoff(cutoff);
  CMatrix a = CMatrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return ModeOperator(std::move(a), OperatorKind::annihilation);
}

ModeOperator creation(int cutoff) {
  return ModeOperator(annihilation(cutoff).matrix().adjoint(), OperatorKind::creation);
}

ModeOperator number_operator(int cutoff) {
  require_cutoff(cutoff);
  CMatrix n = CMatrix::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = k;
  return ModeOperator(std::move(n), OperatorKind::number);
}

ModeOperator quadrature(double theta, int cutoff) {
  const CMatrix a = annihilation(cutoff).matrix();
  const Complex phase = std::polar(1.0, -theta);
  CMatrix x = (a * phase + a.adjoint() * std::conj(phase)) / std::sqrt(2.0);
  return ModeOperator(std::move(x), OperatorKind::quadrature);
}

Ket make_fock(int n, int cutoff) {
  require_cutoff(cutoff);
  if (n < 0 || n >= cutoff) {
    throw CutoffError(fmt::format("Fock level {} is outside cutoff {}", n, cutoff), 1.0);
  }
  CVector v = CVector::Zero(cutoff);
  v(n) = 1.0;
  return Ket(std::move(v));
}

namespace {

// Coherent amplitudes before truncation renormalization. Throws if the
// weight beyond the cutoff is 1e-8 or more.
CVector coherent_amplitudes(Complex alpha, int cutoff) {
  CVector v(cutoff);
  const double envelope = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < cutoff; ++n) v(n) = envelope * scaled_power(alpha, n);
  const double tail = std::max(0.0, 1.0 - v.squaredNorm());
  if (tail >= 1e-8) {
    throw CutoffError(fmt::format("coherent amplitude |alpha|={:.4g} leaves tail weight {:.3e} beyond cutoff {}",
                                  std::abs(alpha), tail, cutoff),
                      tail);
  }
  return v;
}

}  // namespace

Ket make_coherent(Complex alpha, int cutoff) {
  require_cutoff(cutoff);
  return Ket::normalized(coherent_amplitudes(alpha, cutoff));
}

Ket make_css(Complex alpha, Parity parity, int cutoff) {
  require_cutoff(cutoff);
  const double mag2 = std::norm(alpha);
  if (parity == Parity::odd && mag2 == 0.0) {
    throw ValidationError("odd cat state with alpha = 0 has zero norm");
  }
  const bool odd = parity == Parity::odd;
  CVector v = CVector::Zero(cutoff);
  for (int n = odd ? 1 : 0; n < cutoff; n += 2) v(n) = scaled_power(alpha, n);
  // Untruncated norm^2 of sum_{n of given parity} alpha^n/sqrt(n!) |n>.
  const double exact_norm2 = odd ? std::sinh(mag2) : std::cosh(mag2);
  const double tail = std::max(0.0, 1.0 - v.squaredNorm() / exact_norm2);
  if (tail >= 1e-8) {
    throw CutoffError(fmt::format("cat amplitude |alpha|={:.4g} leaves tail weight {:.3e} beyond cutoff {}",
                                  std::abs(alpha), tail, cutoff),
                      tail);
  }
  return Ket::normalized(v / std::sqrt(exact_norm2));
}

DensityMatrix ket_to_dm(const Ket& ket) { return DensityMatrix::from_ket(ket); }

double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double fidelity(const DensityMatrix& rho, const Ket& psi) {
  if (rho.dim() != psi.dim()) throw DimensionError("fidelity: cutoff mismatch");
  const CVector& v = psi.amplitudes();
  return v.dot(rho.matrix() * v).real();
}

namespace {

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  Eigen::VectorXd ev = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: cutoff mismatch");
  const CMatrix root = psd_sqrt(rho.matrix());
  CMatrix inner = root * sigma.matrix() * root;
  inner = 0.5 * (inner + inner.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(inner, Eigen::EigenvaluesOnly);
  const double s = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return s * s;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("trace_distance: cutoff mismatch");
  CMatrix diff = rho.matrix() - sigma.matrix();
  diff = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double purity(const DensityMatrix& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

Complex expectation(const DensityMatrix& rho, const ModeOperator& op) {
  if (op.modes() != 1 || op.dim() != rho.dim()) throw DimensionError("expectation: operator/state mismatch");
  return (rho.matrix() * op.matrix()).trace();
}

double mean_photon_number(const DensityMatrix& rho) {
  double n = 0.0;
  for (int k = 0; k < rho.dim(); ++k) n += k * rho.population(k);
  return n;
}

TwoModeState::TwoModeState(CMatrix elems, int dim_first, int dim_second)
    : elems_(std::move(elems)), dim_a_(dim_first), dim_b_(dim_second) {
  if (dim_a_ < 2 || dim_b_ < 2) throw DimensionError("two-mode state cutoffs must be >= 2");
  if (elems_.rows() != dim_a_ * dim_b_ || elems_.cols() != elems_.rows()) {
    throw DimensionError("two-mode state matrix does not match its cutoffs");
  }
  const double herm = (elems_ - elems_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTolerance) throw ValidationError("two-mode state not Hermitian");
  if (std::abs(elems_.trace() - 1.0) > kNormTolerance) throw ValidationError("two-mode state trace != 1");
}

TwoModeState tensor(const DensityMatrix& first, const DensityMatrix& second) {
  const int na = first.dim();
  const int nb = second.dim();
  CMatrix joint(na * nb, na * nb);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      joint.block(i * nb, j * nb, nb, nb) = first.matrix()(i, j) * second.matrix();
    }
  }
  return TwoModeState(std::move(joint), na, nb);
}

TwoModeState tensor(const Ket& first, const Ket& second) {
  return tensor(ket_to_dm(first), ket_to_dm(second));
}

DensityMatrix partial_trace(const TwoModeState& joint, int traced_mode) {
  const int na = joint.dim_first();
  const int nb = joint.dim_second();
  const CMatrix& m = joint.matrix();
  if (traced_mode == 1) {
    CMatrix out = CMatrix::Zero(na, na);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < nb; ++k) out(i, j) += m(joint.index(i, k), joint.index(j, k));
    return DensityMatrix::normalized(out);
  }
  if (traced_mode == 0) {
    CMatrix out = CMatrix::Zero(nb, nb);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j)
        for (int k = 0; k < na; ++k) out(i, j) += m(joint.index(k, i), joint.index(k, j));
    return DensityMatrix::normalized(out);
  }
  throw DimensionError(fmt::format("partial_trace: mode index {} is not 0 or 1", traced_mode));
}

TwoModeState apply(const ModeOperator& unitary, const TwoModeState& joint) {
  if (unitary.modes() != 2 || unitary.dim() != joint.matrix().rows()) {
    throw DimensionError("apply: operator does not act on this two-mode space");
  }
  CMatrix out = unitary.matrix() * joint.matrix() * unitary.matrix().adjoint();
  out = 0.5 * (out + out.adjoint());
  out /= out.trace().real();
  return TwoModeState(std::move(out), joint.dim_first(), joint.dim_second());
}

}  // namespace squeezelab
