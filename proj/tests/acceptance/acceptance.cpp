// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "squeezelab/gates.hpp"
#include "squeezelab/metrics.hpp"
#include "squeezelab/phase_space.hpp"
#include "squeezelab/squeezer.hpp"
#include "squeezelab/tomography.hpp"
#include "squeezelab_cli/commands.hpp"

using namespace squeezelab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCutoff = 40;
// Moment and round-trip checks on S(0.67)-scale states need more headroom.
constexpr int kWideCutoff = 60;
const std::vector<double> kGammas{0.26, 0.37, 0.67};

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = no limit
  std::function<Outcome()> check;
};

DensityMatrix photon(int n = kCutoff) { return ket_to_dm(make_fock(1, n)); }

// Appends "name=value" and folds the result into `ok`.
void note(std::string& detail, bool& ok, bool cond, const std::string& text) {
  ok = ok && cond;
  if (!detail.empty()) detail += "; ";
  detail += text + (cond ? "" : " [x]");
}

Outcome gamma_table() {
  const std::vector<double> expected{0.5945, 0.4771, 0.2618};
  const std::vector<double> reported{0.59, 0.48, 0.26};
  bool ok = true;
  std::string d;
  for (size_t i = 0; i < kGammas.size(); ++i) {
    const double t = gamma_to_T(kGammas[i]);
    const bool exact = std::abs(t - std::exp(-2 * kGammas[i])) < 1e-12;
    const bool r4 = std::abs(std::round(t * 1e4) / 1e4 - expected[i]) < 1e-12;
    const bool r2 = std::abs(std::round(t * 1e2) / 1e2 - reported[i]) < 1e-12;
    note(d, ok, exact && r4 && r2, fmt::format("T({})={:.6f}", kGammas[i], t));
  }
  return {ok, d};
}

Outcome input_photon_minimum() {
  const WignerMinimum m = wigner_min(prepare_experimental_photon(LossBudget::experiment(), kCutoff));
  return {std::abs(m.value + 0.216) <= 0.010, fmt::format("W_min={:.4f} (target -0.216 +- 0.010)", m.value)};
}

Outcome unitary_limit() {
  bool ok = true;
  std::string d;
  for (double g : kGammas) {
    const DensityMatrix out = mb_squeeze_channel(photon(), SqueezeGateConfig::pure_ancilla(g, 5e-5));
    const double f = fidelity(out, squeeze(make_fock(1, kCutoff), g));
    note(d, ok, f > 0.999, fmt::format("F(gamma={})={:.6f}", g, f));
  }
  return {ok, d};
}

double moment_gap(const GaussianMoments& a, const GaussianMoments& b) {
  return std::max((a.mean - b.mean).cwiseAbs().maxCoeff(), (a.cov - b.cov).cwiseAbs().maxCoeff());
}

Outcome antisqueezing_independence() {
  bool ok = true;
  std::string d;
  const std::vector<std::pair<std::string, DensityMatrix>> inputs{
      {"coherent", ket_to_dm(make_coherent(Complex(0.5, -0.3), kCutoff))},
      {"photon", prepare_experimental_photon(LossBudget::experiment(), kCutoff)}};
  for (double g : {0.26, -0.37}) {
    SqueezeGateConfig base = SqueezeGateConfig::experiment(g);
    SqueezeGateConfig noisy = base;
    noisy.ancilla.antisqueezed_variance *= 10.0;
    for (const auto& [label, rho] : inputs) {
      const double gap = moment_gap(moments_of(mb_squeeze_channel(rho, base)), moments_of(mb_squeeze_channel(rho, noisy)));
      note(d, ok, gap < 1e-6, fmt::format("{} gamma={}: {:.1e}", label, g, gap));
    }
  }
  return {ok, d};
}

Outcome moments_oracle() {
  bool ok = true;
  double worst = 0.0;
  int cases = 0;
  for (double t : {0.26, 0.48, 0.59}) {
    for (double sign : {1.0, -1.0}) {
      const SqueezeGateConfig cfg = SqueezeGateConfig::experiment(sign * T_to_gamma(t));
      for (const DensityMatrix& rho : {ket_to_dm(make_coherent(Complex(0.6, 0.4), kWideCutoff)),
                                       squeeze(ket_to_dm(make_fock(0, kWideCutoff)), 0.2)}) {
        const double gap = moment_gap(moments_of(mb_squeeze_channel(rho, cfg)), heisenberg_moments(moments_of(rho), cfg));
        worst = std::max(worst, gap);
        ok = ok && gap < 1e-6;
        ++cases;
      }
    }
  }
  return {ok, fmt::format("{} cases at N={}, worst moment gap {:.2e} (limit 1e-6)", cases, kWideCutoff, worst)};
}

Outcome fig2_trend() {
  const std::vector<double> reported{-0.15, -0.12, -0.06};
  const DensityMatrix input = prepare_experimental_photon(LossBudget::experiment(), kCutoff);
  bool ok = true;
  std::string d;
  double prev = -1.0;
  for (size_t i = 0; i < kGammas.size(); ++i) {
    const double w = wigner_min(mb_squeeze_channel(input, SqueezeGateConfig::experiment(kGammas[i]))).value;
    note(d, ok, w < 0.0 && w > prev && std::abs(w - reported[i]) <= 0.05,
         fmt::format("W_min(gamma={})={:.4f} vs {:.2f}", kGammas[i], w, reported[i]));
    prev = w;
  }
  return {ok, d};
}

Outcome fig3_direction() {
  const DensityMatrix cat = ket_to_dm(make_css(0.97, Parity::odd, kCutoff));
  const DensityMatrix out = mb_squeeze_channel(cat, SqueezeGateConfig::experiment(-0.26));
  const DensityMatrix ideal = mb_squeeze_channel(cat, SqueezeGateConfig::pure_ancilla(-0.26, 5e-5));
  std::vector<double> phases(24);
  for (int k = 0; k < 24; ++k) phases[k] = 2 * kPi * k / 24;
  bool ok = true;
  std::string d;
  const double spread = relative_spread(phase_variances(out, phases));
  note(d, ok, spread < 0.05, fmt::format("variance spread {:.2f}% (limit 5%)", 100 * spread));
  note(d, ok, true, fmt::format("input spread {:.1f}%, ideal-ancilla spread {:.1f}%",
                                100 * relative_spread(phase_variances(cat, phases)),
                                100 * relative_spread(phase_variances(ideal, phases))));
  const double w = wigner_min(out).value;
  note(d, ok, w < 0.0, fmt::format("W_min={:.4f}", w));
  const double f = fidelity(ideal, make_fock(1, kCutoff));
  note(d, ok, f > 0.99, fmt::format("ideal F(|1>)={:.4f}", f));
  return {ok, d};
}

Outcome reversibility() {
  bool ok = true;
  std::string d;
  const std::vector<std::pair<std::string, DensityMatrix>> inputs{
      {"|1>", photon(kWideCutoff)}, {"CSS(0.97)", ket_to_dm(make_css(0.97, Parity::odd, kWideCutoff))}};
  for (const auto& [label, rho] : inputs) {
    for (double g : kGammas) {
      const DensityMatrix there = mb_squeeze_channel(rho, SqueezeGateConfig::pure_ancilla(g, 5e-5));
      const double f = fidelity(mb_squeeze_channel(there, SqueezeGateConfig::pure_ancilla(-g, 5e-5)), rho);
      note(d, ok, f > 0.995, fmt::format("{} g={}: {:.5f}", label, g, f));
    }
  }
  return {ok, d};
}

Outcome metrics_battery() {
  bool ok = true;
  std::string d;
  std::vector<double> betas;
  for (int i = 0; i <= 200; ++i) betas.push_back(0.01 * i);
  const MetricCurve c = metric_curve_beta(photon(30), betas);
  note(d, ok, std::abs(c.d_max.axis - 1.0) <= 0.01 && std::abs(c.d_max.value - std::exp(-1.0)) < 1e-12,
       fmt::format("D1max={:.6f} at beta={:.2f}", c.d_max.value, c.d_max.axis));

  double dv = 0.0;
  for (double a : {0.5, 0.97, 1.64}) {
    const DensityMatrix cat = ket_to_dm(make_css(a, Parity::odd, kCutoff));
    for (double b : betas) dv = std::max(dv, std::abs(distinguishability(cat, b) + interference(cat, b)));
  }
  note(d, ok, dv < 1e-9, fmt::format("max|D+V| cat={:.1e}", dv));

  double mix_a = 0.0;
  for (double p : {1.0, 0.84, 0.5}) {
    CMatrix m = CMatrix::Zero(10, 10);
    m(1, 1) = p;
    m(0, 0) = 1 - p;
    mix_a = std::max(mix_a, anticorrelation(DensityMatrix(m)).a_value);
  }
  note(d, ok, mix_a == 0.0, fmt::format("A(mixture)={}", mix_a));

  double coh = 0.0;
  for (double eta : {1.0, 0.5}) {
    coh = std::max(coh, std::abs(anticorrelation(ket_to_dm(make_coherent(Complex(0.9, 0.4), kCutoff)), eta).a_value - 1));
  }
  note(d, ok, coh < 1e-9, fmt::format("|A(coherent)-1|={:.1e}", coh));

  double cat_gap = 0.0;
  for (double a : {0.5, 1.0, 1.64, 2.0}) {
    const double c2 = 1.0 - 2.0 * std::cosh(a * a / 2);
    cat_gap = std::max(cat_gap, std::abs(anticorrelation(ket_to_dm(make_css(a, Parity::odd, 60))).a_value -
                                         (1.0 - 1.0 / (c2 * c2))));
  }
  note(d, ok, cat_gap < 1e-6, fmt::format("A(cat) closed-form gap {:.1e}", cat_gap));

  // A(gamma) for ideal squeezed photons and ideal detectors.
  double prev_a = 0.0;
  double prev_g = 0.0;
  double crossing = -1.0;
  double a_end = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double g = 0.005 * i;
    const double a = anticorrelation(squeeze(photon(80), g)).a_value;
    if (i > 0 && prev_a < 1.0 && a >= 1.0 && crossing < 0) crossing = prev_g + (1 - prev_a) / (a - prev_a) * 0.005;
    prev_a = a;
    prev_g = g;
    a_end = a;
  }
  note(d, ok, crossing > 0 && std::abs(crossing - 0.66) <= 0.02,
       crossing > 0 ? fmt::format("A=1 crossing at |gamma|={:.4f}", crossing)
                    : fmt::format("A never reaches 1 on [0,1] with eta=1 (A(1)={:.4f})", a_end));
  return {ok, d};
}

Outcome tomography_battery() {
  std::vector<std::pair<std::string, DensityMatrix>> battery{
      {"vacuum", ket_to_dm(make_fock(0, kCutoff))},
      {"|1>", photon()},
      {"lossy photon", prepare_experimental_photon(LossBudget::experiment(), kCutoff)},
      {"CSS(0.97)", ket_to_dm(make_css(0.97, Parity::odd, kCutoff))}};
  for (double g : kGammas) battery.emplace_back(fmt::format("S({})|1>", g), squeeze(photon(), g));
  bool ok = true;
  std::string d;
  const std::vector<double> phases = uniform_phases(12);
  std::uint64_t seed = 1000;
  for (const auto& [label, truth] : battery) {
    const auto recs = sample_quadratures(truth, phases, 100000 / 12, seed++);
    const ReconstructionReport rep = maxlik_reconstruct(recs, 15);
    bool monotone = true;
    for (size_t i = 1; i < rep.log_likelihood_trace.size(); ++i) {
      monotone = monotone && rep.log_likelihood_trace[i] >= rep.log_likelihood_trace[i - 1] - 1e-10;
    }
    const double f = fidelity(rep.rho.resized(kCutoff), truth);
    note(d, ok, f > 0.99 && monotone, fmt::format("{}: F={:.4f}{}", label, f, monotone ? "" : " non-monotone"));
  }
  return {ok, d};
}

Outcome classical_bounds() {
  bool ok = true;
  std::string d;
  double worst = 0.0;
  for (double beta : {0.1, 0.5, 1.0, 1.5, 2.0}) {
    double brute = 1.0;
    const int n = 1000001;
    const double y_max = std::max(5.0, kPi / beta);
    for (int i = 0; i < n; ++i) {
      const double y = y_max * i / (n - 1);
      brute = std::min(brute, std::exp(-beta * beta - y * y) * std::cos(2 * beta * y));
    }
    worst = std::max(worst, std::abs(coherent_mixture_bound(beta) - brute));
  }
  note(d, ok, worst < 1e-6, fmt::format("coherent bound vs grid {:.1e}", worst));

  std::vector<double> betas;
  for (int i = 1; i <= 50; ++i) betas.push_back(0.05 * i);
  bool below = true;
  std::vector<double> gauss;
  for (double b : betas) {
    gauss.push_back(gaussian_mixture_bound(b).value);
    below = below && gauss.back() <= coherent_mixture_bound(b) + 1e-12;
  }
  note(d, ok, below, "gaussian <= coherent on 50 betas");

  const DensityMatrix out = mb_squeeze_channel(prepare_experimental_photon(LossBudget::experiment(), kCutoff),
                                               SqueezeGateConfig::pure_ancilla(0.26, 5e-5));
  double margin = 1.0;
  double at = 0.0;
  for (size_t i = 0; i < betas.size(); ++i) {
    const double m = interference(out, betas[i]) - gauss[i];
    if (m < margin) {
      margin = m;
      at = betas[i];
    }
  }
  note(d, ok, margin < 0.0, fmt::format("gamma=0.26 V - gaussian bound = {:.4f} at beta={:.2f}", margin, at));
  return {ok, d};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "squeezelab_acceptance";
  fs::remove_all(root);
  cli::RunConfig cfg;
  cfg.seed = 12345;
  cfg.out_dir = root / "a";
  cli::cmd_reproduce(cfg, "fig2");
  cfg.out_dir = root / "b";
  cli::cmd_reproduce(cfg, "fig2");
  int files = 0;
  int differing = 0;
  for (const auto& e : fs::directory_iterator(root / "a" / "fig2")) {
    ++files;
    if (read_text(e.path()) != read_text(root / "b" / "fig2" / e.path().filename())) ++differing;
  }
  fs::remove_all(root);
  return {files > 0 && differing == 0, fmt::format("{} files, {} differ", files, differing)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gamma-T table", 1, gamma_table},
      {2, "input photon Wigner minimum", 10, input_photon_minimum},
      {3, "unitary-limit convergence", 60, unitary_limit},
      {4, "antisqueezing independence", 0, antisqueezing_independence},
      {5, "moments oracle", 0, moments_oracle},
      {6, "particle-to-wave trend", 300, fig2_trend},
      {7, "wave-to-particle direction", 0, fig3_direction},
      {8, "reversibility", 0, reversibility},
      {9, "metrics battery", 0, metrics_battery},
      {10, "tomography round trip", 600, tomography_battery},
      {11, "classical bounds", 0, classical_bounds},
      {12, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs > c.time_limit_s) {
      o.pass = false;
      o.detail += fmt::format("; exceeded {}s", c.time_limit_s);
    }
    failed += !o.pass;
    std::cout << fmt::format("AC{:<2} {} {} ({:.1f}s): {}", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed == 0 ? 0 : 1;
}
