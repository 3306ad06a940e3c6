#pragma once

// Wigner functions and quadrature marginals in (x, p) units, normalized so
// that the integral over dx dp is 1 (vacuum peak 1/pi).

#include <vector>

#include "squeezelab/fock.hpp"

namespace squeezelab {

struct GridSpec {
  double x_min = -5.0;
  double x_max = 5.0;
  int nx = 201;
  double p_min = -5.0;
  double p_max = 5.0;
  int np = 201;

  void validate() const;
  double x(int i) const { return nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1); }
  double p(int j) const { return np == 1 ? p_min : p_min + (p_max - p_min) * j / (np - 1); }
  double dx() const { return nx == 1 ? 0.0 : (x_max - x_min) / (nx - 1); }
  double dp() const { return np == 1 ? 0.0 : (p_max - p_min) / (np - 1); }
};

struct WignerGrid {
  GridSpec spec;
  Eigen::MatrixXd values;  // values(i, j) = W(x_i, p_j)

  /// Riemann sum of W dx dp.
  double integral() const;
};

struct MarginalDistribution {
  double theta;
  std::vector<double> xs;
  std::vector<double> pdf;

  /// Trapezoidal integral of the pdf.
  double integral() const;
};

struct WignerMinimum {
  double value;
  double x;
  double p;
};

/// W(x, p) = (1/pi) tr[rho D(2 alpha) Pi], alpha = (x + i p)/sqrt(2).
double wigner_at(const DensityMatrix& rho, double x, double p);

/// Wigner function on a grid. With `require_coverage`, throws
/// ValidationError unless the grid contains the disk of radius
/// 2 sqrt(<x^2 + p^2>) = 2 sqrt(2<n> + 1).
WignerGrid wigner(const DensityMatrix& rho, const GridSpec& spec = {}, bool require_coverage = true);

/// Grid scan of `region` followed by quadratic-fit refinement around the
/// lowest grid point.
WignerMinimum wigner_min(const DensityMatrix& rho, const GridSpec& region = {-3.0, 3.0, 61, -3.0, 3.0, 61});

/// pr(x; theta) = <x,theta|rho|x,theta> on the given abscissae.
MarginalDistribution marginal(const DensityMatrix& rho, double theta, const std::vector<double>& xs);
/// Uniform abscissae on [-limit, limit].
std::vector<double> uniform_grid(double limit, int count);

/// Integral of |W| over phase space minus 1.
double negativity_volume(const DensityMatrix& rho, const GridSpec& spec = {-6.0, 6.0, 241, -6.0, 6.0, 241});

}  // namespace squeezelab
