#pragma once

// Measurement-based squeezing gate: beam splitter with a squeezed ancilla,
// homodyne detection of the ancilla arm, and feedforward displacement.
//
// For gamma > 0 the ancilla is p-squeezed, x' of the ancilla arm is measured
// and the outcome is fed forward to x; gamma < 0 is the same circuit rotated
// by 90 degrees. Output quadratures for gain g and outcome operator q':
//   q_out = q_in' - g q_anc',  c_out = c_in'
// where q is the measured direction and c its conjugate.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "squeezelab/gates.hpp"

namespace squeezelab {

enum class GateOrientation { squeeze_x, squeeze_p };

/// T = exp(-2|gamma|).
double gamma_to_T(double gamma);
/// |gamma| = -ln(T)/2; T must lie in (0,1).
double T_to_gamma(double transmittance);

struct SqueezeGateConfig {
  double gamma = 0.0;
  std::optional<double> feedforward_gain;  // default sqrt((1-T)/T)
  AncillaModel ancilla;

  double transmittance() const { return gamma_to_T(gamma); }
  double gain() const;
  GateOrientation orientation() const {
    return gamma < 0.0 ? GateOrientation::squeeze_x : GateOrientation::squeeze_p;
  }
  /// Phase of the measured and fed-forward quadrature: 0 (x) or pi/2 (p).
  double feedforward_phase() const;
  void validate() const;

  /// Gate with the experiment's -6.8/+10.3 dB ancilla in the matching orientation.
  static SqueezeGateConfig experiment(double gamma);
  /// Gate with a pure ancilla of the given squeezed variance.
  static SqueezeGateConfig pure_ancilla(double gamma, double squeezed_variance);
};

struct GaussianMoments {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = 0.5 * Eigen::Matrix2d::Identity();

  void validate() const;
};

/// First and second moments of (x, p); cov is the symmetrized covariance.
GaussianMoments moments_of(const DensityMatrix& rho);

/// Heisenberg-picture moments after the gate, including a non-default gain.
GaussianMoments heisenberg_moments(const GaussianMoments& input, const SqueezeGateConfig& cfg);

struct ConditionalOutput {
  CMatrix state;   // unnormalized; its trace is `density`
  double density;  // probability density of the outcome
};

/// Unnormalized post-feedforward state for a given ancilla-arm outcome.
ConditionalOutput mb_squeeze_conditional(const DensityMatrix& rho, const SqueezeGateConfig& cfg, double outcome);

/// Probability density of the ancilla-arm homodyne outcome.
double outcome_density(const DensityMatrix& rho, const SqueezeGateConfig& cfg, double outcome);

struct ChannelOptions {
  int outcome_nodes = 64;
  int basis_nodes = 0;  // 0 selects default_node_count(cutoff)
  double max_residual = 1e-6;
};

/// Unconditional gate: conditional outputs integrated over all outcomes.
/// Throws ConvergenceError if the integrated trace misses 1 by more than
/// `max_residual`.
DensityMatrix mb_squeeze_channel(const DensityMatrix& rho, const SqueezeGateConfig& cfg,
                                 const ChannelOptions& options = {});

struct TrajectoryRecord {
  double measurement_outcome;
  double weight;  // outcome probability density
  std::optional<DensityMatrix> conditional_state;
};

struct MonteCarloOptions {
  bool keep_states = false;
  std::optional<double> forced_outcome;
  int sampling_grid = 4001;
  int basis_nodes = 0;
};

struct MonteCarloResult {
  std::vector<TrajectoryRecord> trajectories;
  DensityMatrix average;
};

/// Shot-by-shot gate. Shot i draws its outcome from a generator seeded with
/// (seed, i); the average is accumulated in shot order, so results depend only
/// on (seed, n_shots).
MonteCarloResult mb_squeeze_mc(const DensityMatrix& rho, const SqueezeGateConfig& cfg, int n_shots,
                               std::uint64_t seed, const MonteCarloOptions& options = {});

struct HomodyneResult {
  CMatrix conditional;  // unnormalized state of the unmeasured mode
  double density;
};

/// Projects `mode` of a two-mode state onto |x, theta>.
HomodyneResult homodyne_project(const TwoModeState& joint, int mode, double theta, double x);

/// The gate outcome computed literally on the two-mode Fock space: ancilla
/// prepared at the joint cutoff, beam splitter, homodyne projection and
/// displacement. Only usable for ancillas that fit the cutoff.
ConditionalOutput mb_squeeze_two_mode_reference(const DensityMatrix& rho, const SqueezeGateConfig& cfg, double outcome);

}  // namespace squeezelab
