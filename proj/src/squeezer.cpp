#include "squeezelab/squeezer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "squeezelab/quadrature.hpp"
#include "squeezelab/random.hpp"

namespace squeezelab {

namespace {

constexpr double kPi = std::numbers::pi;

double gaussian_pdf(double x, double mean, double var) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * kPi * var);
}

// Quantities shared by every outcome of one gate application. With
// y the measured-quadrature coordinate of the output mode, the outcome-m
// conditional wavefunction is
//   psi_in(sqrt(T) y + delta m) * phi_anc(a y + kappa m),
// i.e. the Kraus operator T^{-1/4} phi_anc(a y + kappa m) D S.
struct GateGeometry {
  double theta;
  double t;
  double a;
  double kappa;
  double delta;
  double v_meas;
  double v_conj;

  explicit GateGeometry(const SqueezeGateConfig& cfg)
      : theta(cfg.feedforward_phase()),
        t(cfg.transmittance()),
        a(std::sqrt(1.0 - t)),
        kappa(a * cfg.gain() + std::sqrt(t)),
        delta(std::sqrt(t) * cfg.gain() - a),
        v_meas(cfg.ancilla.antisqueezed_variance),
        v_conj(cfg.ancilla.squeezed_variance) {}

  // Displacement that realizes the shift y -> y + delta m / sqrt(T).
  Complex shift(double m) const { return std::polar(-delta * m / std::sqrt(t) / std::sqrt(2.0), theta); }
};

double quadrature_mean(const DensityMatrix& rho, double theta) {
  return expectation(rho, quadrature(theta, rho.dim())).real();
}

double quadrature_variance(const DensityMatrix& rho, double theta) {
  const CMatrix x = quadrature(theta, rho.dim()).matrix();
  const double mean = (x * rho.matrix()).trace().real();
  return (x * x * rho.matrix()).trace().real() - mean * mean;
}

class KrausEvaluator {
 public:
  KrausEvaluator(const DensityMatrix& rho, const SqueezeGateConfig& cfg, int basis_nodes)
      : geo_(cfg),
        basis_(rho.dim(), geo_.theta, basis_nodes > 0 ? basis_nodes : default_node_count(rho.dim())),
        squeezed_(squeeze(rho, cfg.gamma).matrix()),
        conj_factor_(basis_.size(), basis_.size()) {
    const auto& y = basis_.nodes();
    for (int k = 0; k < basis_.size(); ++k) {
      for (int l = 0; l < basis_.size(); ++l) {
        const double d = geo_.a * (y[k] - y[l]);
        conj_factor_(k, l) = std::exp(-0.5 * geo_.v_conj * d * d);
      }
    }
    if (std::abs(geo_.delta) < 1e-14) fixed_nodes_ = basis_.to_nodes(squeezed_);
    gram_ = basis_.columns().adjoint() * basis_.columns();
  }

  const GateGeometry& geometry() const { return geo_; }

  // Conditional state for outcome m in node space, including T^{-1/2}.
  CMatrix node_state(double m) const {
    CMatrix y = fixed_nodes_ ? *fixed_nodes_ : shifted_nodes(m);
    const auto& nodes = basis_.nodes();
    const int k_count = basis_.size();
    Eigen::VectorXd sum_term(k_count);
    for (int k = 0; k < k_count; ++k) sum_term(k) = geo_.a * nodes[k] + geo_.kappa * m;
    const double norm = 1.0 / std::sqrt(2.0 * kPi * geo_.v_meas) / std::sqrt(geo_.t);
    for (int k = 0; k < k_count; ++k) {
      for (int l = 0; l < k_count; ++l) {
        const double s = sum_term(k) + sum_term(l);
        y(k, l) *= norm * std::exp(-s * s / (8.0 * geo_.v_meas)) * conj_factor_(k, l);
      }
    }
    return y;
  }

  double node_trace(const CMatrix& node) const { return node.cwiseProduct(gram_.transpose()).sum().real(); }

  CMatrix to_fock(const CMatrix& node) const { return basis_.from_nodes(node); }

 private:
  CMatrix shifted_nodes(double m) const {
    const CMatrix d = displacement_matrix(geo_.shift(m), basis_.cutoff());
    return basis_.to_nodes(d * squeezed_ * d.adjoint());
  }

  GateGeometry geo_;
  QuadratureBasis basis_;
  CMatrix squeezed_;
  Eigen::MatrixXd conj_factor_;
  std::optional<CMatrix> fixed_nodes_;
  CMatrix gram_;
};

// Mean and standard deviation of the ancilla-arm outcome:
// m = -sqrt(1-T) q_in + sqrt(T) q_anc.
std::pair<double, double> outcome_moments(const DensityMatrix& rho, const GateGeometry& geo) {
  const double mean = -geo.a * quadrature_mean(rho, geo.theta);
  const double var = geo.a * geo.a * quadrature_variance(rho, geo.theta) + geo.t * geo.v_meas;
  return {mean, std::sqrt(var)};
}

}  // namespace

double gamma_to_T(double gamma) { return std::exp(-2.0 * std::abs(gamma)); }

double T_to_gamma(double transmittance) {
  if (!(transmittance > 0.0 && transmittance < 1.0)) {
    throw ValidationError(fmt::format("transmittance {} is outside (0,1)", transmittance));
  }
  return -0.5 * std::log(transmittance);
}

double SqueezeGateConfig::gain() const {
  if (feedforward_gain) return *feedforward_gain;
  const double t = transmittance();
  return std::sqrt((1.0 - t) / t);
}

double SqueezeGateConfig::feedforward_phase() const {
  return orientation() == GateOrientation::squeeze_p ? 0.0 : kPi / 2;
}

void SqueezeGateConfig::validate() const {
  if (!std::isfinite(gamma)) throw ValidationError("gamma must be finite");
  const double t = transmittance();
  if (!(t > 0.0)) throw ValidationError(fmt::format("gamma {} gives transmittance 0", gamma));
  if (feedforward_gain && !(*feedforward_gain > 0.0) && gamma != 0.0) {
    throw ValidationError("feedforward gain must be positive");
  }
  ancilla.validate();
  const SqueezedQuadrature needed =
      orientation() == GateOrientation::squeeze_p ? SqueezedQuadrature::p : SqueezedQuadrature::x;
  if (ancilla.orientation != needed) {
    throw ValidationError(fmt::format("gamma = {} needs a {}-squeezed ancilla", gamma,
                                      needed == SqueezedQuadrature::p ? "p" : "x"));
  }
}

SqueezeGateConfig SqueezeGateConfig::experiment(double gamma) {
  SqueezeGateConfig cfg;
  cfg.gamma = gamma;
  cfg.ancilla = AncillaModel::experiment(gamma < 0.0 ? SqueezedQuadrature::x : SqueezedQuadrature::p);
  return cfg;
}

SqueezeGateConfig SqueezeGateConfig::pure_ancilla(double gamma, double squeezed_variance) {
  SqueezeGateConfig cfg;
  cfg.gamma = gamma;
  cfg.ancilla = AncillaModel::pure(squeezed_variance, gamma < 0.0 ? SqueezedQuadrature::x : SqueezedQuadrature::p);
  return cfg;
}

void GaussianMoments::validate() const {
  if (std::abs(cov(0, 1) - cov(1, 0)) > 1e-12) throw ValidationError("covariance matrix is not symmetric");
  if (cov.determinant() < 0.25 - 1e-9) {
    throw ValidationError(fmt::format("covariance determinant {} violates uncertainty", cov.determinant()));
  }
}

GaussianMoments moments_of(const DensityMatrix& rho) {
  const int n = rho.dim();
  const CMatrix x = quadrature(0.0, n).matrix();
  const CMatrix p = quadrature(kPi / 2, n).matrix();
  const CMatrix& r = rho.matrix();
  GaussianMoments out;
  out.mean << (x * r).trace().real(), (p * r).trace().real();
  const double xx = (x * x * r).trace().real();
  const double pp = (p * p * r).trace().real();
  const double xp = (0.5 * (x * p + p * x) * r).trace().real();
  out.cov << xx - out.mean(0) * out.mean(0), xp - out.mean(0) * out.mean(1), xp - out.mean(0) * out.mean(1),
      pp - out.mean(1) * out.mean(1);
  return out;
}

GaussianMoments heisenberg_moments(const GaussianMoments& input, const SqueezeGateConfig& cfg) {
  cfg.validate();
  const GateGeometry geo(cfg);
  // q_out = kappa q_in - delta q_anc, c_out = sqrt(T) c_in + sqrt(1-T) c_anc.
  const int q = cfg.orientation() == GateOrientation::squeeze_p ? 0 : 1;
  const int c = 1 - q;
  Eigen::Matrix2d in_map = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d anc_map = Eigen::Matrix2d::Zero();
  in_map(q, q) = geo.kappa;
  in_map(c, c) = std::sqrt(geo.t);
  anc_map(q, q) = -geo.delta;
  anc_map(c, c) = geo.a;
  Eigen::Matrix2d anc_cov = Eigen::Matrix2d::Zero();
  anc_cov(q, q) = geo.v_meas;
  anc_cov(c, c) = geo.v_conj;
  GaussianMoments out;
  out.mean = in_map * input.mean;
  out.cov = in_map * input.cov * in_map.transpose() + anc_map * anc_cov * anc_map.transpose();
  return out;
}

ConditionalOutput mb_squeeze_conditional(const DensityMatrix& rho, const SqueezeGateConfig& cfg, double outcome) {
  cfg.validate();
  const KrausEvaluator kraus(rho, cfg, 0);
  const CMatrix node = kraus.node_state(outcome);
  CMatrix state = kraus.to_fock(node);
  state = 0.5 * (state + state.adjoint());
  const double density = state.trace().real();
  return {std::move(state), density};
}

double outcome_density(const DensityMatrix& rho, const SqueezeGateConfig& cfg, double outcome) {
  cfg.validate();
  const GateGeometry geo(cfg);
  const QuadratureBasis basis(rho.dim(), geo.theta, default_node_count(rho.dim()));
  const CMatrix node = basis.to_nodes(rho.matrix());
  double p = 0.0;
  for (int k = 0; k < basis.size(); ++k) {
    p += node(k, k).real() * gaussian_pdf(outcome, -geo.a * basis.nodes()[k], geo.t * geo.v_meas);
  }
  return p;
}

DensityMatrix mb_squeeze_channel(const DensityMatrix& rho, const SqueezeGateConfig& cfg, const ChannelOptions& options) {
  cfg.validate();
  const KrausEvaluator kraus(rho, cfg, options.basis_nodes);
  const auto [mean, sd] = outcome_moments(rho, kraus.geometry());
  const QuadratureRule rule = gauss_hermite(options.outcome_nodes);
  const double stretch = std::sqrt(2.0) * sd;
  CMatrix acc;
  for (int i = 0; i < options.outcome_nodes; ++i) {
    const CMatrix node = kraus.node_state(mean + stretch * rule.nodes[i]);
    const double w = rule.scaled_weights[i] * stretch;
    if (i == 0) {
      acc = w * node;
    } else {
      acc += w * node;
    }
  }
  CMatrix out = kraus.to_fock(acc);
  const double residual = std::abs(out.trace().real() - 1.0);
  if (residual > options.max_residual) {
    throw ConvergenceError(
        fmt::format("gate output trace misses 1 by {:.3e}; raise the cutoff or the outcome node count", residual),
        residual);
  }
  return DensityMatrix::normalized(out, rho.truncation_deficit() + residual);
}

MonteCarloResult mb_squeeze_mc(const DensityMatrix& rho, const SqueezeGateConfig& cfg, int n_shots,
                               std::uint64_t seed, const MonteCarloOptions& options) {
  cfg.validate();
  if (n_shots < 1) throw ValidationError("n_shots must be >= 1");
  if (options.sampling_grid < 16) throw ValidationError("sampling grid too coarse");
  const KrausEvaluator kraus(rho, cfg, options.basis_nodes);
  const GateGeometry& geo = kraus.geometry();

  // Inverse-CDF table of the outcome density on a uniform grid.
  const auto [mean, sd] = outcome_moments(rho, geo);
  const int grid = options.sampling_grid;
  const double lo = mean - 12.0 * sd;
  const double step = 24.0 * sd / (grid - 1);
  std::vector<double> cdf(grid, 0.0);
  {
    const QuadratureBasis basis(rho.dim(), geo.theta, default_node_count(rho.dim()));
    const CMatrix node = basis.to_nodes(rho.matrix());
    std::vector<double> pdf(grid, 0.0);
    for (int j = 0; j < grid; ++j) {
      const double m = lo + j * step;
      for (int k = 0; k < basis.size(); ++k) {
        pdf[j] += node(k, k).real() * gaussian_pdf(m, -geo.a * basis.nodes()[k], geo.t * geo.v_meas);
      }
      pdf[j] = std::max(pdf[j], 0.0);
      if (j > 0) cdf[j] = cdf[j - 1] + 0.5 * step * (pdf[j] + pdf[j - 1]);
    }
    for (double& c : cdf) c /= cdf.back();
  }
  auto sample = [&](double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto j = std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, grid - 1);
    const double span = cdf[j] - cdf[j - 1];
    const double frac = span > 0.0 ? (u - cdf[j - 1]) / span : 0.5;
    return lo + (j - 1 + frac) * step;
  };

  MonteCarloResult result{{}, ket_to_dm(make_fock(0, rho.dim()))};
  result.trajectories.reserve(n_shots);
  CMatrix sum = CMatrix::Zero(rho.dim(), rho.dim());
  for (int shot = 0; shot < n_shots; ++shot) {
    std::mt19937_64 gen = substream(seed, static_cast<std::uint64_t>(shot));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double m = 0.0;
    CMatrix state;
    double density = 0.0;
    for (int attempt = 0;; ++attempt) {
      m = options.forced_outcome ? *options.forced_outcome : sample(uniform(gen));
      state = kraus.to_fock(kraus.node_state(m));
      density = state.trace().real();
      if (density > 1e-250 && std::isfinite(density)) break;
      if (options.forced_outcome || attempt > 100) {
        throw ConvergenceError(fmt::format("outcome {} has vanishing probability density", m), density);
      }
    }
    state /= density;
    state = 0.5 * (state + state.adjoint());
    sum += state;
    TrajectoryRecord rec{m, density, std::nullopt};
    if (options.keep_states) rec.conditional_state = DensityMatrix::normalized(state);
    result.trajectories.push_back(std::move(rec));
  }
  result.average = DensityMatrix::normalized(sum / static_cast<double>(n_shots), rho.truncation_deficit());
  return result;
}

HomodyneResult homodyne_project(const TwoModeState& joint, int mode, double theta, double x) {
  if (mode != 0 && mode != 1) throw DimensionError(fmt::format("mode index {} is not 0 or 1", mode));
  const int measured = mode == 0 ? joint.dim_first() : joint.dim_second();
  const int kept = mode == 0 ? joint.dim_second() : joint.dim_first();
  if (std::abs(x) > quadrature_support(measured)) {
    throw ValidationError(fmt::format("homodyne outcome {} outside the support {:.3g} of cutoff {}", x,
                                      quadrature_support(measured), measured));
  }
  // <x,theta|n> = e^{-i n theta} psi_n(x).
  const CVector bra = quadrature_eigenvector(theta, x, measured).conjugate();
  const CMatrix& m = joint.matrix();
  CMatrix out = CMatrix::Zero(kept, kept);
  auto idx = [&](int k, int n) { return mode == 0 ? joint.index(n, k) : joint.index(k, n); };
  for (int i = 0; i < kept; ++i) {
    for (int j = 0; j < kept; ++j) {
      Complex s = 0.0;
      for (int n = 0; n < measured; ++n) {
        if (bra(n) == 0.0) continue;
        for (int np = 0; np < measured; ++np) s += bra(n) * m(idx(i, n), idx(j, np)) * std::conj(bra(np));
      }
      out(i, j) = s;
    }
  }
  out = 0.5 * (out + out.adjoint());
  const double density = out.trace().real();
  return {std::move(out), density};
}

ConditionalOutput mb_squeeze_two_mode_reference(const DensityMatrix& rho, const SqueezeGateConfig& cfg,
                                                double outcome) {
  cfg.validate();
  const int n = rho.dim();
  const double t = cfg.transmittance();
  const double theta = cfg.feedforward_phase();
  const DensityMatrix anc = prepare_squeezed_thermal(cfg.ancilla, n);
  const TwoModeState mixed = apply(beam_splitter(t, n), tensor(rho, anc));
  const HomodyneResult proj = homodyne_project(mixed, 1, theta, outcome);
  const CMatrix d = displacement_matrix(std::polar(-cfg.gain() * outcome / std::sqrt(2.0), theta), n);
  CMatrix state = d * proj.conditional * d.adjoint();
  state = 0.5 * (state + state.adjoint());
  return {std::move(state), proj.density};
}

}  // namespace squeezelab
