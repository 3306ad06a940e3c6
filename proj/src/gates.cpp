#include "squeezelab/gates.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/laguerre.hpp>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace squeezelab {

namespace {

constexpr double kSqueezeTailLimit = 1e-6;

void require_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("{} = {} is outside [0,1]", name, v));
}

// exp(gamma (a^dag^2 - a^2)/2) on a dim-dimensional space.
Eigen::MatrixXd squeeze_full(double gamma, int dim) {
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n + 2 < dim; ++n) {
    const double c = 0.5 * std::sqrt((n + 1.0) * (n + 2.0));
    gen(n + 2, n) = c;
    gen(n, n + 2) = -c;
  }
  return (gamma * gen).exp();
}

CMatrix embed(const CMatrix& m, int dim) {
  CMatrix big = CMatrix::Zero(dim, dim);
  big.topLeftCorner(m.rows(), m.cols()) = m;
  return big;
}

double log_binomial(int n, int k) { return log_factorial(n) - log_factorial(k) - log_factorial(n - k); }

// Kraus element <n-k| E_k |n> of the pure-loss channel.
double loss_kraus(int n, int k, double eta) {
  if (k > n) return 0.0;
  const double a = (n - k) == 0 ? 1.0 : std::pow(eta, 0.5 * (n - k));
  const double b = k == 0 ? 1.0 : std::pow(1.0 - eta, 0.5 * k);
  return std::exp(0.5 * log_binomial(n, k)) * a * b;
}

}  // namespace

void LossBudget::validate() const {
  require_fraction(eta_detection, "eta_detection");
  require_fraction(eta_propagation, "eta_propagation");
  require_fraction(dark_fraction, "dark_fraction");
  require_fraction(multiphoton_fraction, "multiphoton_fraction");
  require_fraction(eta_residual, "eta_residual");
  if (dark_fraction + multiphoton_fraction >= 1.0) {
    throw ValidationError("dark_fraction + multiphoton_fraction must be < 1");
  }
}

LossBudget LossBudget::experiment() {
  LossBudget b;
  b.eta_detection = 0.93;
  b.eta_propagation = 0.96;
  b.dark_fraction = 0.01;
  b.multiphoton_fraction = 0.02;
  b.eta_residual = 0.97;
  return b;
}

void AncillaModel::validate() const {
  constexpr double tol = 1e-12;
  if (!(squeezed_variance > 0.0)) throw ValidationError("ancilla squeezed variance must be positive");
  if (squeezed_variance > 0.5 + tol || antisqueezed_variance < 0.5 - tol) {
    throw ValidationError(fmt::format("ancilla variances ({}, {}) must satisfy v_sq <= 1/2 <= v_anti",
                                      squeezed_variance, antisqueezed_variance));
  }
  if (squeezed_variance * antisqueezed_variance < 0.25 - tol) {
    throw ValidationError(fmt::format("ancilla variances ({}, {}) violate the uncertainty relation",
                                      squeezed_variance, antisqueezed_variance));
  }
}

bool AncillaModel::is_pure() const { return std::abs(squeezed_variance * antisqueezed_variance - 0.25) < 1e-12; }

double AncillaModel::variance_from_db(double db) { return 0.5 * std::pow(10.0, db / 10.0); }

AncillaModel AncillaModel::from_db(double squeezing_db, double antisqueezing_db, SqueezedQuadrature orientation) {
  AncillaModel m{variance_from_db(squeezing_db), variance_from_db(antisqueezing_db), orientation};
  m.validate();
  return m;
}

AncillaModel AncillaModel::pure(double squeezed_variance, SqueezedQuadrature orientation) {
  AncillaModel m{squeezed_variance, 0.25 / squeezed_variance, orientation};
  m.validate();
  return m;
}

AncillaModel AncillaModel::experiment(SqueezedQuadrature orientation) { return from_db(-6.8, 10.3, orientation); }

ModeOperator squeeze_unitary(double gamma, int cutoff) {
  if (cutoff < 2) throw DimensionError("cutoff must be >= 2");
  const Eigen::MatrixXd full = squeeze_full(gamma, 2 * cutoff);
  return ModeOperator(full.topLeftCorner(cutoff, cutoff).cast<Complex>(), OperatorKind::general);
}

Ket squeeze(const Ket& psi, double gamma) {
  const int n = psi.dim();
  CVector big = CVector::Zero(2 * n);
  big.head(n) = psi.amplitudes();
  const CVector out = squeeze_full(gamma, 2 * n).cast<Complex>() * big;
  const double tail = out.tail(n).squaredNorm();
  if (tail > kSqueezeTailLimit) {
    throw CutoffError(fmt::format("S({}) leaves weight {:.3e} beyond cutoff {}", gamma, tail, n), tail);
  }
  return Ket::normalized(out.head(n));
}

DensityMatrix squeeze(const DensityMatrix& rho, double gamma) {
  const int n = rho.dim();
  const CMatrix u = squeeze_full(gamma, 2 * n).cast<Complex>();
  const CMatrix out = u * embed(rho.matrix(), 2 * n) * u.adjoint();
  const double tail = std::max(0.0, 1.0 - out.topLeftCorner(n, n).trace().real());
  if (tail > kSqueezeTailLimit) {
    throw CutoffError(fmt::format("S({}) leaves weight {:.3e} beyond cutoff {}", gamma, tail, n), tail);
  }
  return DensityMatrix::normalized(out.topLeftCorner(n, n), rho.truncation_deficit() + tail);
}

CMatrix displacement_matrix(Complex alpha, int cutoff) {
  // <m|D|n> = sqrt(n!/m!) alpha^{m-n} e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2) for m >= n,
  // and the mirrored form with -conj(alpha) above the diagonal.
  CMatrix d = CMatrix::Zero(cutoff, cutoff);
  const double r = std::abs(alpha);
  const double x = r * r;
  const double arg = std::arg(alpha);
  std::vector<double> lf(cutoff);
  for (int n = 0; n < cutoff; ++n) lf[n] = log_factorial(n);
  for (int k = 0; k < cutoff; ++k) {
    if (k > 0 && r == 0.0) break;
    const double log_r_power = k == 0 ? 0.0 : k * std::log(r);
    const Complex lower_phase = std::polar(1.0, k * arg);
    const Complex upper_phase = std::polar(k % 2 == 0 ? 1.0 : -1.0, -k * arg);
    double l_prev = 0.0;
    double l_cur = 1.0;
    for (int j = 0; j + k < cutoff; ++j) {
      if (j == 1) {
        l_prev = l_cur;
        l_cur = 1.0 + k - x;
      } else if (j > 1) {
        const double next = boost::math::laguerre_next(j - 1, k, x, l_cur, l_prev);
        l_prev = l_cur;
        l_cur = next;
      }
      const double mag = std::exp(0.5 * (lf[j] - lf[j + k]) + log_r_power - 0.5 * x) * l_cur;
      d(j + k, j) = mag * lower_phase;
      if (k > 0) d(j, j + k) = mag * upper_phase;
    }
  }
  return d;
}

ModeOperator displace(Complex alpha, int cutoff) {
  make_coherent(alpha, cutoff);  // throws CutoffError when |alpha> does not fit
  return ModeOperator(displacement_matrix(alpha, cutoff), OperatorKind::general);
}

ModeOperator rotate(double theta, int cutoff) {
  if (cutoff < 2) throw DimensionError("cutoff must be >= 2");
  CMatrix r = CMatrix::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) r(n, n) = std::polar(1.0, -n * theta);
  return ModeOperator(std::move(r), OperatorKind::general);
}

Eigen::MatrixXd beam_splitter_sector(double transmittance, int total) {
  if (!(transmittance > 0.0 && transmittance < 1.0)) {
    throw ValidationError(fmt::format("beam splitter transmittance {} is outside (0,1)", transmittance));
  }
  // U = exp(phi (a^dag b - a b^dag)), cos(phi) = sqrt(T), basis |k, total-k>.
  const double phi = std::acos(std::sqrt(transmittance));
  const int size = total + 1;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(size, size);
  for (int k = 0; k < total; ++k) {
    const double c = std::sqrt((k + 1.0) * (total - k));
    gen(k + 1, k) = c;
    gen(k, k + 1) = -c;
  }
  return (phi * gen).exp();
}

ModeOperator beam_splitter(double transmittance, int cutoff) {
  if (cutoff < 2) throw DimensionError("cutoff must be >= 2");
  const int dim = cutoff * cutoff;
  CMatrix u = CMatrix::Zero(dim, dim);
  for (int total = 0; total <= 2 * (cutoff - 1); ++total) {
    const Eigen::MatrixXd block = beam_splitter_sector(transmittance, total);
    const int k_lo = std::max(0, total - cutoff + 1);
    const int k_hi = std::min(total, cutoff - 1);
    for (int out = k_lo; out <= k_hi; ++out) {
      for (int in = k_lo; in <= k_hi; ++in) {
        u(out * cutoff + (total - out), in * cutoff + (total - in)) = block(out, in);
      }
    }
  }
  return ModeOperator(std::move(u), OperatorKind::general, 2);
}

DensityMatrix loss_channel(const DensityMatrix& rho, double eta) {
  require_fraction(eta, "efficiency");
  const int n = rho.dim();
  const CMatrix& m = rho.matrix();
  CMatrix out = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a + k < n; ++a) {
      const double ea = loss_kraus(a + k, k, eta);
      if (ea == 0.0) continue;
      for (int b = 0; b + k < n; ++b) out(a, b) += ea * loss_kraus(b + k, k, eta) * m(a + k, b + k);
    }
  }
  return DensityMatrix::normalized(out, rho.truncation_deficit());
}

CMatrix loss_channel_adjoint(const CMatrix& effect, double eta) {
  require_fraction(eta, "efficiency");
  const int n = static_cast<int>(effect.rows());
  CMatrix out = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int a = k; a < n; ++a) {
      const double ea = loss_kraus(a, k, eta);
      if (ea == 0.0) continue;
      for (int b = k; b < n; ++b) out(a, b) += ea * loss_kraus(b, k, eta) * effect(a - k, b - k);
    }
  }
  return out;
}

SubtractionResult photon_subtract(const DensityMatrix& rho) {
  const CMatrix a = annihilation(rho.dim()).matrix();
  const CMatrix out = a * rho.matrix() * a.adjoint();
  const double p = out.trace().real();
  if (!(p > 1e-14)) throw ValidationError("photon subtraction has zero success probability");
  return {DensityMatrix::normalized(out, rho.truncation_deficit()), p};
}

DensityMatrix dephase(const DensityMatrix& rho, double sigma) {
  if (!(sigma >= 0.0)) throw ValidationError("dephasing width must be non-negative");
  CMatrix out = rho.matrix();
  for (int m = 0; m < rho.dim(); ++m) {
    for (int n = 0; n < rho.dim(); ++n) out(m, n) *= std::exp(-0.5 * (m - n) * (m - n) * sigma * sigma);
  }
  return DensityMatrix::normalized(out, rho.truncation_deficit());
}

DensityMatrix prepare_experimental_photon(const LossBudget& budget, int cutoff) {
  budget.validate();
  if (cutoff < 3) throw CutoffError("experimental photon needs cutoff >= 3", budget.multiphoton_fraction);
  const DensityMatrix lossy = loss_channel(ket_to_dm(make_fock(1, cutoff)), budget.total_efficiency());
  const double clean = 1.0 - budget.dark_fraction - budget.multiphoton_fraction;
  CMatrix m = clean * lossy.matrix();
  m(0, 0) += budget.dark_fraction;
  m(2, 2) += budget.multiphoton_fraction;
  return DensityMatrix::normalized(m);
}

DensityMatrix prepare_squeezed_thermal(const AncillaModel& model, int cutoff) {
  model.validate();
  if (cutoff < 2) throw DimensionError("cutoff must be >= 2");
  const double nu = std::sqrt(model.squeezed_variance * model.antisqueezed_variance);
  const double nbar = nu - 0.5;
  CMatrix thermal = CMatrix::Zero(cutoff, cutoff);
  const double ratio = nbar / (nbar + 1.0);
  for (int n = 0; n < cutoff; ++n) thermal(n, n) = std::pow(ratio, n) / (nbar + 1.0);
  const double thermal_tail = std::pow(ratio, cutoff);
  if (thermal_tail > kSqueezeTailLimit) {
    throw CutoffError(fmt::format("thermal occupation {:.4g} does not fit cutoff {}", nbar, cutoff), thermal_tail);
  }
  const double r = 0.25 * std::log(model.antisqueezed_variance / model.squeezed_variance);
  const double gamma = model.orientation == SqueezedQuadrature::p ? r : -r;
  return squeeze(DensityMatrix::normalized(thermal, thermal_tail), gamma);
}

}  // namespace squeezelab
