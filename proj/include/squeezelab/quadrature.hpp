#pragma once

// Quadrature-eigenstate machinery: Hermite functions, Gauss-Hermite rules,
// and the node representation used to apply functions of a rotated
// quadrature operator to Fock-basis matrices.

#include <functional>
#include <span>
#include <vector>

#include "squeezelab/fock.hpp"

namespace squeezelab {

/// psi_n(x) for n = 0..cutoff-1, the position wavefunctions of |n>.
Eigen::VectorXd hermite_functions(double x, int cutoff);

/// Fock coefficients <n|x,theta> = e^{i n theta} psi_n(x) of the x(theta)
/// eigenstate |x,theta>.
CVector quadrature_eigenvector(double theta, double x, int cutoff);

/// Largest |x| at which quadrature eigenvectors are meaningful for a cutoff.
double quadrature_support(int cutoff);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;         // for the e^{-x^2} weight
  std::vector<double> scaled_weights;  // weights[k] * exp(nodes[k]^2)
};

/// n-point Gauss-Hermite rule. Nodes from the Jacobi matrix, weights from the
/// Christoffel sum so that the far-tail scaled weights stay accurate.
QuadratureRule gauss_hermite(int n);

/// Integral of f over the real line for f roughly Gaussian around `center`
/// with width `scale`, by an n-point Gauss-Hermite rule.
double integrate_gaussian_scaled(const std::function<double(double)>& f, double center, double scale, int n);

// Matrices diagonal in x(theta): column k of `columns()` is
// sqrt(lambda_k)|x_k,theta> truncated to the cutoff, with x_k the
// Gauss-Hermite nodes. Then f(x(theta)) ~ Phi diag(f(x_k)) Phi^dag, exact for
// polynomial f of low degree and spectrally accurate for smooth f.
class QuadratureBasis {
 public:
  QuadratureBasis(int cutoff, double theta, int n_nodes);

  int cutoff() const { return cutoff_; }
  double theta() const { return theta_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const CMatrix& columns() const { return phi_; }

  /// Phi^dag A Phi: the kernel A(x_k, x_l) with quadrature weights folded in.
  CMatrix to_nodes(const CMatrix& op) const;
  /// Phi K Phi^dag.
  CMatrix from_nodes(const CMatrix& node_matrix) const;
  CMatrix function_of_quadrature(const std::function<double(double)>& f) const;

 private:
  int cutoff_;
  double theta_;
  std::vector<double> nodes_;
  CMatrix phi_;
};

/// Default node count for a QuadratureBasis at the given cutoff.
int default_node_count(int cutoff);

}  // namespace squeezelab
