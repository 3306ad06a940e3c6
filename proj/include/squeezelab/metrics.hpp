#pragma once

// Coherent-probe figures of merit: distinguishability D, interference V,
// classical bounds on V, the two-detector anti-correlation parameter A, and
// fitting an odd cat amplitude to a state.

#include <string>
#include <vector>

#include "squeezelab/fock.hpp"

namespace squeezelab {

/// D(beta) = (<beta|rho|beta> + <-beta|rho|-beta>) / 2.
double distinguishability(const DensityMatrix& rho, Complex beta);
/// V(beta) = (<beta|rho|-beta> + <-beta|rho|beta>) / 2.
double interference(const DensityMatrix& rho, Complex beta);

struct MetricExtremum {
  double axis;
  double value;
};

struct MetricCurve {
  std::vector<double> axis;  // |beta| grid or phase grid
  std::vector<double> d_values;
  std::vector<double> v_values;
  std::string state_label;
  MetricExtremum d_max;
  MetricExtremum v_min;
};

/// D and V along beta = b e^{i phase} for b in `magnitudes`.
MetricCurve metric_curve_beta(const DensityMatrix& rho, const std::vector<double>& magnitudes, double phase = 0.0,
                              std::string label = {});
/// D and V along beta = beta0 e^{i phi} for phi in `phases`.
MetricCurve metric_curve_phase(const DensityMatrix& rho, double beta0, const std::vector<double>& phases,
                               std::string label = {});

/// Lowest V(beta) reachable by any mixture of coherent states:
/// min over y of exp(-beta^2 - y^2) cos(2 beta y).
double coherent_mixture_bound(double beta);

struct GaussianBound {
  double value;
  Complex displacement;
  Complex squeezing;  // r e^{i phi}
  bool converged;
};

struct GaussianBoundOptions {
  int phase_points = 16;  // coarse grid over the displacement and squeezing phases
  int magnitude_points = 13;
  int starts = 5;  // local refinements from the best coarse points
};

/// Lowest V(beta) over pure Gaussian states D(delta) S(zeta)|0>, which also
/// bounds every mixture of Gaussian states.
GaussianBound gaussian_mixture_bound(double beta, const GaussianBoundOptions& options = {});
/// <beta| D(delta) S(zeta) |0> with S(zeta) = exp((zeta^* a^2 - zeta a^dag^2)/2).
Complex gaussian_overlap(Complex beta, Complex delta, Complex zeta);

struct AnticorrelationResult {
  double p_c;
  double p_s;
  double a_value;
  double detector_efficiency;
};

/// Splits rho on a balanced beam splitter and detects both arms with on/off
/// detectors of efficiency eta. A = p_c / p_s^2.
AnticorrelationResult anticorrelation(const DensityMatrix& rho, double detector_efficiency = 1.0);

struct CssFit {
  double alpha;
  double fidelity;
};

/// Real alpha > 0 maximizing the fidelity with the odd cat of amplitude alpha.
CssFit fit_css_amplitude(const DensityMatrix& rho);

}  // namespace squeezelab
