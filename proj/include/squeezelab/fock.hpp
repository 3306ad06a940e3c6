#pragma once

// Truncated single-mode and two-mode Fock-space states.
//
// Conventions used throughout the library:
//   x = (a + a^dag)/sqrt(2),  p = (a - a^dag)/(i sqrt(2)),  [x, p] = i,
//   vacuum quadrature variance 1/2,
//   x(theta) = cos(theta) x + sin(theta) p = (a e^{-i theta} + h.c.)/sqrt(2).

#include <complex>
#include <Eigen/Dense>

#include "squeezelab/errors.hpp"

namespace squeezelab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kDefaultCutoff = 40;

// Tolerances for the state invariants.
inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kHermitianTolerance = 1e-9;
inline constexpr double kNegativeEigenTolerance = 1e-8;
// Largest truncation deficit that may be silently renormalized away.
inline constexpr double kMaxSilentDeficit = 1e-6;

/// log(n!) from a cached table; valid for any n >= 0.
double log_factorial(int n);

class Ket {
 public:
  /// Takes amplitudes that are already normalized (within kNormTolerance).
  explicit Ket(CVector amplitudes, double truncation_deficit = 0.0);

  /// Renormalizes `amplitudes`; the missing weight 1 - |amps|^2 is recorded
  /// as the truncation deficit and must not exceed `max_deficit`.
  static Ket normalized(CVector amplitudes, double max_deficit = kMaxSilentDeficit);

  int dim() const { return static_cast<int>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](int n) const { return amps_(n); }
  double truncation_deficit() const { return deficit_; }

 private:
  CVector amps_;
  double deficit_ = 0.0;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity.
  explicit DensityMatrix(CMatrix elems, double truncation_deficit = 0.0);

  /// Hermitizes and rescales to unit trace before validating. Used for the
  /// outputs of numerical channels.
  static DensityMatrix normalized(const CMatrix& elems, double truncation_deficit = 0.0);

  static DensityMatrix from_ket(const Ket& ket);

  int dim() const { return static_cast<int>(elems_.rows()); }
  const CMatrix& matrix() const { return elems_; }
  double population(int n) const { return elems_(n, n).real(); }
  Eigen::VectorXd populations() const { return elems_.diagonal().real(); }
  double truncation_deficit() const { return deficit_; }

  /// Embeds into a larger cutoff or truncates to a smaller one. Truncation
  /// discards weight and renormalizes; it fails above kMaxSilentDeficit.
  DensityMatrix resized(int new_dim) const;

  /// Mixture w*this + (1-w)*other.
  DensityMatrix mixed_with(const DensityMatrix& other, double weight) const;

 private:
  CMatrix elems_;
  double deficit_ = 0.0;
};

enum class OperatorKind { annihilation, creation, quadrature, number, general };

// A matrix acting on one mode (dim = cutoff) or two modes (dim = cutoff^2,
// index = n_first * cutoff + n_second).
class ModeOperator {
 public:
  ModeOperator(CMatrix elems, OperatorKind kind, int modes = 1);

  const CMatrix& matrix() const { return elems_; }
  OperatorKind kind() const { return kind_; }
  int modes() const { return modes_; }
  int dim() const { return static_cast<int>(elems_.rows()); }
  int cutoff() const { return cutoff_; }

 private:
  CMatrix elems_;
  OperatorKind kind_;
  int modes_;
  int cutoff_;
};

ModeOperator annihilation(int cutoff);
ModeOperator creation(int cutoff);
ModeOperator number_operator(int cutoff);
/// x(theta), the Hermitian part of a e^{-i theta} scaled by sqrt(2).
ModeOperator quadrature(double theta, int cutoff);

Ket make_fock(int n, int cutoff);
Ket make_coherent(Complex alpha, int cutoff);

enum class Parity { even, odd };
/// Normalized |alpha> + |-alpha> (even) or |alpha> - |-alpha> (odd).
Ket make_css(Complex alpha, Parity parity, int cutoff);

DensityMatrix ket_to_dm(const Ket& ket);

/// <psi|rho|psi>.
double fidelity(const DensityMatrix& rho, const Ket& psi);
/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double purity(const DensityMatrix& rho);
Complex expectation(const DensityMatrix& rho, const ModeOperator& op);
double mean_photon_number(const DensityMatrix& rho);
double min_eigenvalue(const CMatrix& hermitian);

// Joint state of two modes with independent cutoffs.
class TwoModeState {
 public:
  TwoModeState(CMatrix elems, int dim_first, int dim_second);

  int dim_first() const { return dim_a_; }
  int dim_second() const { return dim_b_; }
  const CMatrix& matrix() const { return elems_; }
  int index(int n_first, int n_second) const { return n_first * dim_b_ + n_second; }

 private:
  CMatrix elems_;
  int dim_a_;
  int dim_b_;
};

TwoModeState tensor(const DensityMatrix& first, const DensityMatrix& second);
TwoModeState tensor(const Ket& first, const Ket& second);
/// Traces out `traced_mode` (0 or 1) and returns the other mode.
DensityMatrix partial_trace(const TwoModeState& joint, int traced_mode);
/// U rho U^dag for a two-mode operator of matching dimension.
TwoModeState apply(const ModeOperator& unitary, const TwoModeState& joint);

}  // namespace squeezelab
