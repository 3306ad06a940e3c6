#include "squeezelab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace squeezelab {

Eigen::VectorXd hermite_functions(double x, int cutoff) {
  Eigen::VectorXd psi(cutoff);
  psi(0) = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (cutoff > 1) psi(1) = std::sqrt(2.0) * x * psi(0);
  for (int n = 1; n + 1 < cutoff; ++n) {
    psi(n + 1) = std::sqrt(2.0 / (n + 1)) * x * psi(n) - std::sqrt(static_cast<double>(n) / (n + 1)) * psi(n - 1);
  }
  return psi;
}

CVector quadrature_eigenvector(double theta, double x, int cutoff) {
  const Eigen::VectorXd psi = hermite_functions(x, cutoff);
  CVector v(cutoff);
  for (int n = 0; n < cutoff; ++n) v(n) = std::polar(psi(n), n * theta);
  return v;
}

double quadrature_support(int cutoff) { return std::sqrt(2.0 * cutoff + 1.0) + 6.0; }

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw ValidationError("Gauss-Hermite rule needs at least one node");
  // Jacobi matrix of the orthonormal Hermite functions is the truncated x.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  QuadratureRule rule;
  rule.nodes.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  for (double x : rule.nodes) {
    const double christoffel = hermite_functions(x, n).squaredNorm();
    const double scaled = 1.0 / christoffel;
    rule.scaled_weights.push_back(scaled);
    rule.weights.push_back(scaled * std::exp(-x * x));
  }
  return rule;
}

double integrate_gaussian_scaled(const std::function<double(double)>& f, double center, double scale, int n) {
  const QuadratureRule rule = gauss_hermite(n);
  const double stretch = std::sqrt(2.0) * scale;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += rule.scaled_weights[k] * f(center + stretch * rule.nodes[k]);
  return stretch * sum;
}

QuadratureBasis::QuadratureBasis(int cutoff, double theta, int n_nodes)
    : cutoff_(cutoff), theta_(theta) {
  if (n_nodes < cutoff) throw ValidationError("QuadratureBasis needs at least `cutoff` nodes");
  const QuadratureRule rule = gauss_hermite(n_nodes);
  nodes_ = rule.nodes;
  phi_.resize(cutoff, n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    phi_.col(k) = std::sqrt(rule.scaled_weights[k]) * quadrature_eigenvector(theta, nodes_[k], cutoff);
  }
}

CMatrix QuadratureBasis::to_nodes(const CMatrix& op) const { return phi_.adjoint() * op * phi_; }

CMatrix QuadratureBasis::from_nodes(const CMatrix& node_matrix) const {
  return phi_ * node_matrix * phi_.adjoint();
}

CMatrix QuadratureBasis::function_of_quadrature(const std::function<double(double)>& f) const {
  Eigen::VectorXd values(size());
  for (int k = 0; k < size(); ++k) values(k) = f(nodes_[k]);
  return phi_ * values.asDiagonal() * phi_.adjoint();
}

int default_node_count(int cutoff) { return 2 * cutoff + 40; }

}  // namespace squeezelab
