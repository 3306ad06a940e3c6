#include "squeezelab/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "squeezelab/gates.hpp"
#include "squeezelab/quadrature.hpp"
#include "squeezelab/random.hpp"

namespace squeezelab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSamplingGrid = 8001;

// Mean log-likelihood per record.
double log_likelihood(const Eigen::VectorXd& counts, const Eigen::VectorXd& probs) {
  double l = 0.0;
  for (Eigen::Index k = 0; k < counts.size(); ++k) l += counts(k) * std::log(probs(k));
  return l / counts.sum();
}

}  // namespace

double wrap_phase(double theta) {
  double t = std::fmod(theta, 2 * kPi);
  if (t < 0) t += 2 * kPi;
  if (t >= 2 * kPi) t = 0.0;
  return t;
}

std::vector<double> uniform_phases(int n) {
  if (n < 1) throw ValidationError("need at least one phase");
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = kPi * k / n;
  return out;
}

std::vector<QuadratureRecord> sample_quadratures(const DensityMatrix& rho, const std::vector<double>& phases,
                                                 int n_per_phase, std::uint64_t seed) {
  if (phases.empty()) throw ValidationError("phase list is empty");
  if (n_per_phase < 1) throw ValidationError("n_per_phase must be >= 1");
  const int n = rho.dim();
  const double support = quadrature_support(n);
  std::vector<QuadratureRecord> out;
  out.reserve(phases.size() * static_cast<size_t>(n_per_phase));
  for (size_t k = 0; k < phases.size(); ++k) {
    const double theta = wrap_phase(phases[k]);
    const CMatrix xq = quadrature(theta, n).matrix();
    const double mean = (xq * rho.matrix()).trace().real();
    const double var = (xq * xq * rho.matrix()).trace().real() - mean * mean;
    const double limit = std::min(support, std::abs(mean) + 10.0 * std::sqrt(var) + 1.0);
    const double step = 2 * limit / (kSamplingGrid - 1);
    std::vector<double> cdf(kSamplingGrid, 0.0);
    double prev = 0.0;
    for (int i = 0; i < kSamplingGrid; ++i) {
      const CVector v = quadrature_eigenvector(theta, -limit + i * step, n);
      const double pdf = std::max(0.0, v.dot(rho.matrix() * v).real());
      if (i > 0) cdf[i] = cdf[i - 1] + 0.5 * step * (pdf + prev);
      prev = pdf;
    }
    const double total = cdf.back();
    if (!(total > 0.0)) throw ValidationError("marginal has no weight on the sampling grid");
    for (double& c : cdf) c /= total;

    std::mt19937_64 gen = substream(seed, k);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int s = 0; s < n_per_phase; ++s) {
      const double u = uniform(gen);
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      const auto j = std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, kSamplingGrid - 1);
      const double span = cdf[j] - cdf[j - 1];
      const double frac = span > 0.0 ? (u - cdf[j - 1]) / span : 0.5;
      out.push_back({theta, -limit + (j - 1 + frac) * step});
    }
  }
  return out;
}

ModeOperator povm_element(double theta, double x, double bin_width, double efficiency, int cutoff) {
  if (!(bin_width > 0.0)) throw ValidationError("bin width must be positive");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ValidationError("efficiency must lie in (0,1]");
  using Rule = boost::math::quadrature::gauss<double, 20>;
  // Composite rule: panels narrow enough for the oscillations of psi_n.
  const int panels = std::max(1, static_cast<int>(std::ceil(bin_width / 0.25)));
  const double half = 0.5 * bin_width / panels;
  CMatrix pi = CMatrix::Zero(cutoff, cutoff);
  for (int k = 0; k < panels; ++k) {
    const double center = x - 0.5 * bin_width + (2 * k + 1) * half;
    auto add = [&](double node, double weight) {
      const CVector v = quadrature_eigenvector(theta, center + half * node, cutoff);
      pi.noalias() += (half * weight) * (v * v.adjoint());
    };
    // The rule stores non-negative abscissae only.
    for (size_t i = 0; i < Rule::abscissa().size(); ++i) {
      const double a = Rule::abscissa()[i];
      const double w = Rule::weights()[i];
      add(a, w);
      if (a != 0.0) add(-a, w);
    }
  }
  if (efficiency < 1.0) pi = loss_channel_adjoint(pi, efficiency);
  return ModeOperator(std::move(pi), OperatorKind::general);
}

ReconstructionReport maxlik_reconstruct(const std::vector<QuadratureRecord>& records, int cutoff,
                                        const MaxLikOptions& options) {
  if (records.empty()) throw ValidationError("no quadrature records to reconstruct from");
  if (cutoff < 2) throw DimensionError("cutoff must be >= 2");
  if (options.max_iters < 1) throw ValidationError("max_iters must be >= 1");
  ReconstructionReport report{.rho = ket_to_dm(make_fock(0, cutoff)), .log_likelihood_trace = {}, .warnings = {}};
  report.efficiency_assumed = options.efficiency;
  if (records.size() < static_cast<size_t>(cutoff) * cutoff) {
    report.warnings.push_back(
        fmt::format("{} records for cutoff {}: fewer than cutoff^2 = {}", records.size(), cutoff, cutoff * cutoff));
  }

  // Bin records by (phase, bin index).
  std::map<std::pair<double, long>, double> bins;
  for (const auto& r : records) {
    const long b = std::lround(std::floor(r.x / options.bin_width));
    bins[{wrap_phase(r.theta), b}] += 1.0;
  }
  const int n_el = static_cast<int>(bins.size());
  const int n2 = cutoff * cutoff;
  CMatrix elements(n_el, n2);  // row k = vec(Pi_k)
  Eigen::VectorXd counts(n_el);
  {
    int k = 0;
    for (const auto& [key, c] : bins) {
      const double center = (key.second + 0.5) * options.bin_width;
      const ModeOperator pi = povm_element(key.first, center, options.bin_width, options.efficiency, cutoff);
      elements.row(k) = Eigen::Map<const CVector>(pi.matrix().data(), n2).transpose();
      counts(k) = c;
      ++k;
    }
  }
  report.distinct_elements = n_el;
  const double total = counts.sum();

  auto probabilities = [&](const CMatrix& rho) {
    const CMatrix rt = rho.transpose();
    const CVector p = elements * Eigen::Map<const CVector>(rt.data(), n2);
    return Eigen::VectorXd(p.real().cwiseMax(1e-300));
  };
  auto r_operator = [&](const Eigen::VectorXd& probs) {
    const Eigen::VectorXd w = counts.cwiseQuotient(probs) / total;
    const CVector flat = elements.transpose() * w.cast<Complex>();
    CMatrix r = Eigen::Map<const CMatrix>(flat.data(), cutoff, cutoff);
    return CMatrix(0.5 * (r + r.adjoint()));
  };
  auto normalize = [](const CMatrix& m) {
    CMatrix h = 0.5 * (m + m.adjoint());
    return CMatrix(h / h.trace().real());
  };

  CMatrix rho = CMatrix::Identity(cutoff, cutoff) / static_cast<double>(cutoff);
  Eigen::VectorXd probs = probabilities(rho);
  double ll = log_likelihood(counts, probs);
  report.log_likelihood_trace.push_back(ll);
  const CMatrix id = CMatrix::Identity(cutoff, cutoff);
  for (int it = 0; it < options.max_iters; ++it) {
    const CMatrix r = r_operator(probs);
    CMatrix next = normalize(r * rho * r);
    Eigen::VectorXd next_probs = probabilities(next);
    double next_ll = log_likelihood(counts, next_probs);
    for (double eps = 0.5; next_ll < ll && eps > 1e-8; eps *= 0.5) {
      const CMatrix g = id + eps * r;
      next = normalize(g * rho * g);
      next_probs = probabilities(next);
      next_ll = log_likelihood(counts, next_probs);
    }
    if (next_ll < ll) {
      // No ascent direction left at this precision.
      report.converged = true;
      break;
    }
    const double gain = next_ll - ll;
    rho = std::move(next);
    probs = std::move(next_probs);
    ll = next_ll;
    report.log_likelihood_trace.push_back(ll);
    report.iterations = it + 1;
    if (gain < options.tol) {
      report.converged = true;
      break;
    }
  }
  for (size_t i = 1; i < report.log_likelihood_trace.size(); ++i) {
    const double drop = report.log_likelihood_trace[i - 1] - report.log_likelihood_trace[i];
    if (drop > 1e-10) throw ConvergenceError("log-likelihood decreased during reconstruction", drop);
  }
  report.rho = DensityMatrix::normalized(rho);
  return report;
}

std::vector<double> phase_variances(const DensityMatrix& rho, const std::vector<double>& phases) {
  std::vector<double> out;
  out.reserve(phases.size());
  for (double theta : phases) {
    const CMatrix x = quadrature(theta, rho.dim()).matrix();
    const double mean = (x * rho.matrix()).trace().real();
    out.push_back((x * x * rho.matrix()).trace().real() - mean * mean);
  }
  return out;
}

double relative_spread(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("relative_spread of an empty list");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  return (*hi - *lo) / mean;
}

}  // namespace squeezelab
