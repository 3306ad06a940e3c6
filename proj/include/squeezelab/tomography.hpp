#pragma once

// Simulated phase-scanned homodyne data and maximum-likelihood
// reconstruction of the density matrix.

#include <cstdint>
#include <string>
#include <vector>

#include "squeezelab/fock.hpp"

namespace squeezelab {

struct QuadratureRecord {
  double theta;  // local-oscillator phase in [0, 2 pi)
  double x;
};

/// Phase wrapped to [0, 2 pi).
double wrap_phase(double theta);

/// n uniformly spaced phases k pi / n, k = 0..n-1 (half a period suffices
/// since x(theta + pi) = -x(theta)).
std::vector<double> uniform_phases(int n);

/// Draws n_per_phase outcomes per phase by inverse CDF of the marginal on a
/// dense grid. Phase k uses its own generator derived from (seed, k).
std::vector<QuadratureRecord> sample_quadratures(const DensityMatrix& rho, const std::vector<double>& phases,
                                                 int n_per_phase, std::uint64_t seed);

/// Integral of |x,theta><x,theta| over [x - width/2, x + width/2], seen
/// through a detector of the given efficiency.
ModeOperator povm_element(double theta, double x, double bin_width, double efficiency, int cutoff);

struct MaxLikOptions {
  int max_iters = 2000;
  double tol = 1e-9;  // stop when the per-record log-likelihood gains less than tol in one iteration
  double bin_width = 0.1;
  double efficiency = 1.0;
};

struct ReconstructionReport {
  DensityMatrix rho;
  int iterations = 0;
  std::vector<double> log_likelihood_trace;  // mean log-likelihood per record
  bool converged = false;
  double efficiency_assumed = 1.0;
  int distinct_elements = 0;
  std::vector<std::string> warnings;
};

/// Iterates rho -> R rho R with R = sum_k Pi_k / tr(rho Pi_k) over binned
/// records; when a step would lower the likelihood, the diluted update
/// (1 + eps R) rho (1 + eps R) with halving eps is used instead.
ReconstructionReport maxlik_reconstruct(const std::vector<QuadratureRecord>& records, int cutoff,
                                        const MaxLikOptions& options = {});

/// Quadrature variance at each phase.
std::vector<double> phase_variances(const DensityMatrix& rho, const std::vector<double>& phases);
/// (max - min) / mean of the values.
double relative_spread(const std::vector<double>& values);

}  // namespace squeezelab
