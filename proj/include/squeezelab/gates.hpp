#pragma once

#include "squeezelab/fock.hpp"

namespace squeezelab {

// Imperfections of the heralded single-photon source.
struct LossBudget {
  double eta_detection = 1.0;
  double eta_propagation = 1.0;
  double dark_fraction = 0.0;         // false heralds: vacuum admixture
  double multiphoton_fraction = 0.0;  // |2> admixture
  // Inefficiency not attributed to any of the above, applied as extra loss.
  double eta_residual = 1.0;

  double total_efficiency() const { return eta_detection * eta_propagation * eta_residual; }
  void validate() const;

  static LossBudget ideal() { return {}; }
  /// 7% detection, 4% propagation, 1% fake heralds, 2% two-photon
  /// contamination, plus the 3% extra loss that brings the single-photon
  /// population to 0.84.
  static LossBudget experiment();
};

enum class SqueezedQuadrature { x, p };

// Gaussian ancilla: squeezed thermal state with zero mean.
struct AncillaModel {
  double squeezed_variance = 0.5;
  double antisqueezed_variance = 0.5;
  SqueezedQuadrature orientation = SqueezedQuadrature::p;

  void validate() const;
  bool is_pure() const;

  /// Linear variance from a level in dB relative to shot noise (1/2).
  static double variance_from_db(double db);
  static AncillaModel from_db(double squeezing_db, double antisqueezing_db, SqueezedQuadrature orientation);
  /// Minimum-uncertainty ancilla with the given squeezed variance.
  static AncillaModel pure(double squeezed_variance, SqueezedQuadrature orientation);
  /// -6.8 dB squeezing, +10.3 dB antisqueezing.
  static AncillaModel experiment(SqueezedQuadrature orientation);
};

/// S(gamma) = exp(gamma (a^dag^2 - a^2)/2), exponentiated at twice the
/// cutoff and projected back. gamma > 0 stretches x and squeezes p.
ModeOperator squeeze_unitary(double gamma, int cutoff);

/// Applies S(gamma); throws CutoffError if the output weight beyond the
/// cutoff exceeds 1e-6.
Ket squeeze(const Ket& psi, double gamma);
DensityMatrix squeeze(const DensityMatrix& rho, double gamma);

/// Exact matrix elements <m|D(alpha)|n> for m, n < cutoff, with no
/// tail-weight check.
CMatrix displacement_matrix(Complex alpha, int cutoff);
/// D(alpha); throws CutoffError if |alpha> is not representable at the cutoff.
ModeOperator displace(Complex alpha, int cutoff);

/// exp(-i theta n). Maps x to x(theta) in the Heisenberg picture, so
/// rotate(pi/2) takes x to p.
ModeOperator rotate(double theta, int cutoff);

/// Two-mode beam splitter with transmittance T. Heisenberg action:
///   a -> sqrt(T) a + sqrt(1-T) b,   b -> -sqrt(1-T) a + sqrt(T) b.
/// Matrix elements are exact in every total-photon-number sector.
ModeOperator beam_splitter(double transmittance, int cutoff);
/// Block of the beam splitter in the sector with `total` photons, indexed by
/// the photon number of the first mode.
Eigen::MatrixXd beam_splitter_sector(double transmittance, int total);

/// Pure-loss channel of efficiency eta.
DensityMatrix loss_channel(const DensityMatrix& rho, double eta);
/// Heisenberg-picture (adjoint) loss channel, used for detector POVMs.
CMatrix loss_channel_adjoint(const CMatrix& effect, double eta);

struct SubtractionResult {
  DensityMatrix state;
  double probability;  // tr(a rho a^dag)
};
/// a rho a^dag, renormalized.
SubtractionResult photon_subtract(const DensityMatrix& rho);

/// Gaussian phase jitter with standard deviation sigma (radians):
/// rho_mn -> rho_mn exp(-(m-n)^2 sigma^2 / 2).
DensityMatrix dephase(const DensityMatrix& rho, double sigma);

/// Lossy heralded photon: loss first, then vacuum and |2> admixtures.
DensityMatrix prepare_experimental_photon(const LossBudget& budget, int cutoff);

/// Squeezed thermal state with the model's quadrature variances.
DensityMatrix prepare_squeezed_thermal(const AncillaModel& model, int cutoff);

}  // namespace squeezelab
