#include "squeezelab/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "squeezelab/gates.hpp"

namespace squeezelab {

namespace {

constexpr double kPi = std::numbers::pi;

// Truncated, not renormalized, coherent amplitudes; the constructor enforces
// the tail bound.
CVector probe(Complex beta, int cutoff) {
  const Ket k = make_coherent(beta, cutoff);
  return k.amplitudes() * std::sqrt(1.0 - k.truncation_deficit());
}

Complex matrix_element(const DensityMatrix& rho, const CVector& bra, const CVector& ket) {
  return bra.dot(rho.matrix() * ket);
}

MetricCurve finish_curve(MetricCurve c) {
  const auto dmax = std::max_element(c.d_values.begin(), c.d_values.end());
  const auto vmin = std::min_element(c.v_values.begin(), c.v_values.end());
  c.d_max = {c.axis[dmax - c.d_values.begin()], *dmax};
  c.v_min = {c.axis[vmin - c.v_values.begin()], *vmin};
  return c;
}

double gaussian_v(double beta, const double* p) {
  const Complex delta(p[0], p[1]);
  const Complex zeta(p[2], p[3]);
  return (gaussian_overlap(beta, delta, zeta) * std::conj(gaussian_overlap(-beta, delta, zeta))).real();
}

struct SimplexResult {
  std::array<double, 4> x;
  double value;
  bool converged;
};

double simplex_objective(const gsl_vector* v, void* params) {
  const double beta = *static_cast<const double*>(params);
  return gaussian_v(beta, gsl_vector_const_ptr(v, 0));
}

SimplexResult refine(double beta, const std::array<double, 4>& start) {
  gsl_multimin_function f{&simplex_objective, 4, &beta};
  gsl_vector* x = gsl_vector_alloc(4);
  gsl_vector* step = gsl_vector_alloc(4);
  for (size_t i = 0; i < 4; ++i) {
    gsl_vector_set(x, i, start[i]);
    gsl_vector_set(step, i, 0.1);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4);
  gsl_multimin_fminimizer_set(s, &f, x, step);
  int status = GSL_CONTINUE;
  for (int it = 0; it < 5000 && status == GSL_CONTINUE; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != 0) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-8);
  }
  SimplexResult out{{}, s->fval, status == GSL_SUCCESS};
  for (size_t i = 0; i < 4; ++i) out.x[i] = gsl_vector_get(s->x, i);
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return out;
}

// Best single coherent probe |i y>: minimizes exp(-beta^2 - y^2) cos(2 beta y).
// The stationary point solves tan(2 beta y) = -y / beta with 2 beta y in
// (pi/2, pi).
std::pair<double, double> coherent_optimum(double beta) {
  auto f = [beta](double y) { return std::exp(-beta * beta - y * y) * std::cos(2 * beta * y); };
  return boost::math::tools::brent_find_minima(f, kPi / (4 * beta), kPi / (2 * beta),
                                               std::numeric_limits<double>::digits);
}

}  // namespace

double distinguishability(const DensityMatrix& rho, Complex beta) {
  const CVector plus = probe(beta, rho.dim());
  const CVector minus = probe(-beta, rho.dim());
  return 0.5 * (matrix_element(rho, plus, plus) + matrix_element(rho, minus, minus)).real();
}

double interference(const DensityMatrix& rho, Complex beta) {
  const CVector plus = probe(beta, rho.dim());
  const CVector minus = probe(-beta, rho.dim());
  const Complex a = matrix_element(rho, plus, minus);
  const Complex b = matrix_element(rho, minus, plus);
  if (std::abs(a - std::conj(b)) > 1e-10) {
    throw ValidationError(fmt::format("interference terms are not conjugate (mismatch {:.3e})", std::abs(a - std::conj(b))));
  }
  return 0.5 * (a + b).real();
}

MetricCurve metric_curve_beta(const DensityMatrix& rho, const std::vector<double>& magnitudes, double phase,
                              std::string label) {
  if (magnitudes.empty()) throw ValidationError("metric curve needs a nonempty grid");
  MetricCurve c{magnitudes, {}, {}, std::move(label), {}, {}};
  for (double b : magnitudes) {
    const Complex beta = std::polar(b, phase);
    c.d_values.push_back(distinguishability(rho, beta));
    c.v_values.push_back(interference(rho, beta));
  }
  return finish_curve(std::move(c));
}

MetricCurve metric_curve_phase(const DensityMatrix& rho, double beta0, const std::vector<double>& phases,
                               std::string label) {
  if (phases.empty()) throw ValidationError("metric curve needs a nonempty grid");
  MetricCurve c{phases, {}, {}, std::move(label), {}, {}};
  for (double phi : phases) {
    const Complex beta = std::polar(beta0, phi);
    c.d_values.push_back(distinguishability(rho, beta));
    c.v_values.push_back(interference(rho, beta));
  }
  return finish_curve(std::move(c));
}

double coherent_mixture_bound(double beta) {
  if (!(beta > 0.0)) throw ValidationError("coherent_mixture_bound needs beta > 0");
  return coherent_optimum(beta).second;
}

Complex gaussian_overlap(Complex beta, Complex delta, Complex zeta) {
  // <beta|D(delta) = e^{(beta^* delta - beta delta^*)/2} <0|D(delta - beta), and
  // <0|D(mu)S(zeta)|0> = (cosh r)^{-1/2} exp(-|mu|^2/2 - e^{i phi} tanh(r) mu^{*2}/2).
  const double r = std::abs(zeta);
  const Complex mu = delta - beta;
  const Complex phase = 0.5 * (std::conj(beta) * delta - beta * std::conj(delta));
  const Complex unit = r > 0 ? zeta / r : Complex(1.0);
  const Complex expo = -0.5 * std::norm(mu) - 0.5 * unit * std::tanh(r) * std::conj(mu) * std::conj(mu);
  return std::exp(phase + expo) / std::sqrt(std::cosh(r));
}

GaussianBound gaussian_mixture_bound(double beta, const GaussianBoundOptions& options) {
  if (!(beta > 0.0)) throw ValidationError("gaussian_mixture_bound needs beta > 0");
  if (options.phase_points < 1 || options.magnitude_points < 2 || options.starts < 1) {
    throw ValidationError("gaussian bound grid is empty");
  }
  struct Seed {
    double value;
    std::array<double, 4> x;
  };
  std::vector<Seed> seeds;
  const int np = options.phase_points;
  const int nm = options.magnitude_points;
  for (int id = 0; id < nm; ++id) {
    const double dmag = 3.0 * id / (nm - 1);
    for (int ip = 0; ip < (id == 0 ? 1 : np); ++ip) {
      const Complex delta = std::polar(dmag, 2 * kPi * ip / np);
      for (int iz = 0; iz < nm; ++iz) {
        const double zmag = 1.2 * iz / (nm - 1);
        for (int iq = 0; iq < (iz == 0 ? 1 : np); ++iq) {
          const Complex zeta = std::polar(zmag, 2 * kPi * iq / np);
          const std::array<double, 4> x{delta.real(), delta.imag(), zeta.real(), zeta.imag()};
          seeds.push_back({gaussian_v(beta, x.data()), x});
        }
      }
    }
  }
  const int starts = std::min<int>(options.starts, static_cast<int>(seeds.size()));
  std::partial_sort(seeds.begin(), seeds.begin() + starts, seeds.end(),
                    [](const Seed& a, const Seed& b) { return a.value < b.value; });
  // The best coherent state is always among the starts so the result never
  // exceeds the coherent bound.
  const double y_star = coherent_optimum(beta).first;
  std::vector<std::array<double, 4>> inits{{0.0, y_star, 0.0, 0.0}};
  for (int i = 0; i < starts; ++i) inits.push_back(seeds[i].x);

  GaussianBound best{std::numeric_limits<double>::infinity(), {}, {}, false};
  for (const auto& init : inits) {
    const SimplexResult r = refine(beta, init);
    if (r.value < best.value) {
      best = {r.value, Complex(r.x[0], r.x[1]), Complex(r.x[2], r.x[3]), r.converged};
    }
  }
  return best;
}

AnticorrelationResult anticorrelation(const DensityMatrix& rho, double detector_efficiency) {
  const double eta = detector_efficiency;
  if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("detector efficiency must lie in (0,1]");
  const double miss = 1.0 - eta;
  // Photon number is conserved by the splitter, so only the diagonal of rho
  // enters: |n,0> -> sum_j U_{j n} |j, n-j>.
  double p_c = 0.0;
  double p_s = 0.0;
  for (int n = 0; n < rho.dim(); ++n) {
    const double pn = rho.population(n);
    if (pn == 0.0) continue;
    const Eigen::MatrixXd u = n == 0 ? Eigen::MatrixXd::Ones(1, 1) : beam_splitter_sector(0.5, n);
    for (int j = 0; j <= n; ++j) {
      const double pjk = pn * u(j, n) * u(j, n);
      const double click_a = 1.0 - std::pow(miss, j);
      const double click_b = 1.0 - std::pow(miss, n - j);
      p_c += pjk * click_a * click_b;
      p_s += pjk * click_a;
    }
  }
  if (!(p_s > 0.0)) throw ValidationError("anti-correlation is undefined: no detector ever clicks");
  return {p_c, p_s, p_c == 0.0 ? 0.0 : p_c / (p_s * p_s), eta};
}

CssFit fit_css_amplitude(const DensityMatrix& rho) {
  constexpr double kStep = 0.02;
  const int n = rho.dim();
  auto objective = [&](double alpha) { return fidelity(rho, make_css(alpha, Parity::odd, n)); };
  double best_alpha = 0.0;
  double best = -1.0;
  double worst = 2.0;
  for (double alpha = kStep; alpha <= 4.0; alpha += kStep) {
    double f;
    try {
      f = objective(alpha);
    } catch (const CutoffError&) {
      break;
    }
    worst = std::min(worst, f);
    if (f > best) {
      best = f;
      best_alpha = alpha;
    }
  }
  if (best < 0.0 || best - worst < 1e-9) {
    throw ConvergenceError("cat fidelity is flat in alpha; no amplitude can be fitted", best - worst);
  }
  const double lo = std::max(1e-3, best_alpha - kStep);
  const double hi = best_alpha + kStep;
  auto neg = [&](double a) {
    try {
      return -objective(a);
    } catch (const CutoffError&) {
      return 0.0;
    }
  };
  const auto [alpha, negf] = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
  return -negf >= best ? CssFit{alpha, -negf} : CssFit{best_alpha, best};
}

}  // namespace squeezelab
