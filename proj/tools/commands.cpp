#include "squeezelab_cli/commands.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "squeezelab/metrics.hpp"
#include "squeezelab/phase_space.hpp"
#include "squeezelab/quadrature.hpp"
#include "squeezelab/tomography.hpp"
#include "squeezelab_cli/manifest.hpp"

namespace squeezelab::cli {

namespace {

namespace fs = std::filesystem;
using Paths = std::vector<fs::path>;

constexpr double kPi = std::numbers::pi;
constexpr std::array<double, 3> kFig2Gammas{0.26, 0.37, 0.67};
constexpr double kCatAlpha = 0.97;
constexpr double kIdealAncillaVariance = 5e-5;
constexpr int kPopulationRows = 8;

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

DensityMatrix load_state(const fs::path& file, int cutoff) {
  Json j;
  try {
    j = Json::parse(read_text(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(fmt::format("state file '{}' is not valid JSON: {}", file.string(), e.what()));
  }
  const DensityMatrix rho = state_from_json(j);
  return rho.dim() == cutoff ? rho : rho.resized(cutoff);
}

// Runs `body` and records the outcome in the manifest even when it throws.
Paths with_manifest(Manifest& m, const std::function<Paths()>& body) {
  try {
    Paths out = body();
    m.set_status("ok");
    m.save();
    return out;
  } catch (const std::exception& e) {
    m.set_status(fmt::format("failed: {}", e.what()));
    m.save();
    throw;
  }
}

std::string gamma_label(double gamma) { return fmt::format("g{:+.2f}", gamma); }

std::vector<double> full_period(int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = 2 * kPi * k / n;
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

Json minimum_json(const WignerMinimum& m) { return Json{{"value", m.value}, {"x", m.x}, {"p", m.p}}; }

Json populations_json(const DensityMatrix& rho) {
  Json p = Json::array();
  for (int n = 0; n < std::min(rho.dim(), kPopulationRows); ++n) p.push_back(rho.population(n));
  return p;
}

Json state_summary(const DensityMatrix& rho) {
  return Json{{"dim", rho.dim()},
              {"mean_photon_number", mean_photon_number(rho)},
              {"purity", purity(rho)},
              {"populations", populations_json(rho)},
              {"truncation_deficit", rho.truncation_deficit()}};
}

std::vector<MarginalDistribution> marginals_of(const DensityMatrix& rho, const MarginalFlags& flags) {
  const std::vector<double> xs = uniform_grid(std::min(flags.limit, quadrature_support(rho.dim())), flags.points);
  std::vector<MarginalDistribution> out;
  for (double theta : full_period(flags.phases)) out.push_back(marginal(rho, theta, xs));
  return out;
}

std::string variances_csv(const std::vector<double>& phases, const std::vector<double>& variances) {
  std::string out = "theta,variance\n";
  for (size_t i = 0; i < phases.size(); ++i) out += fmt::format("{},{}\n", phases[i], variances[i]);
  return out;
}

std::string populations_csv(const std::vector<std::pair<std::string, DensityMatrix>>& states) {
  std::string out = "n";
  for (const auto& [label, rho] : states) out += "," + label;
  out += "\n";
  int rows = states.empty() ? 0 : states.front().second.dim();
  for (const auto& s : states) rows = std::min(rows, s.second.dim());
  for (int n = 0; n < rows; ++n) {
    out += fmt::format("{}", n);
    for (const auto& s : states) out += fmt::format(",{}", s.second.population(n));
    out += "\n";
  }
  return out;
}

// State file, Wigner grid, marginals and variance table for one labelled state.
Json emit_state_products(Manifest& m, Paths& files, const std::string& stage, const std::string& label,
                         const DensityMatrix& rho) {
  files.push_back(m.emit(stage, fmt::format("state_{}.json", label), dump(to_json(rho))));
  const WignerGrid grid = wigner(rho, covering_grid(rho, 121));
  files.push_back(m.emit(stage, fmt::format("wigner_{}.csv", label), wigner_csv(grid)));
  const MarginalFlags mf;
  files.push_back(m.emit(stage, fmt::format("marginals_{}.csv", label), marginals_csv(marginals_of(rho, mf))));
  const std::vector<double> phases = full_period(mf.phases);
  const std::vector<double> variances = phase_variances(rho, phases);
  files.push_back(m.emit(stage, fmt::format("variances_{}.csv", label), variances_csv(phases, variances)));
  Json s = state_summary(rho);
  s["wigner_min"] = minimum_json(wigner_min(rho));
  s["variance_spread"] = relative_spread(variances);
  return s;
}

Paths reproduce_fig2(const RunConfig& cfg, Manifest& m) {
  Paths files;
  std::vector<std::pair<std::string, DensityMatrix>> states{
      {"input", prepare_experimental_photon(cfg.loss, cfg.cutoff)}};
  for (double g : kFig2Gammas) {
    states.emplace_back(gamma_label(g), apply_gate(states.front().second, SqueezeGateConfig::experiment(g),
                                                   cfg.dephasing_stddev));
  }
  Json summary = Json::object();
  for (const auto& [label, rho] : states) {
    Json s = emit_state_products(m, files, "fig2", label, rho);
    if (label != "input") {
      const CssFit fit = fit_css_amplitude(rho);
      s["css_fit"] = {{"alpha", fit.alpha}, {"fidelity", fit.fidelity}};
    }
    summary[label] = std::move(s);
  }
  files.push_back(m.emit("fig2", "photon_numbers.csv", populations_csv(states)));
  files.push_back(m.emit("fig2", "summary.json", dump(summary)));
  return files;
}

Paths reproduce_fig3(const RunConfig& cfg, Manifest& m) {
  Paths files;
  const double gamma = -kFig2Gammas[0];
  const DensityMatrix input = ket_to_dm(make_css(kCatAlpha, Parity::odd, cfg.cutoff));
  const DensityMatrix finite = apply_gate(input, SqueezeGateConfig::experiment(gamma), cfg.dephasing_stddev);
  const DensityMatrix ideal =
      apply_gate(input, SqueezeGateConfig::pure_ancilla(gamma, kIdealAncillaVariance), cfg.dephasing_stddev);
  const Ket photon = make_fock(1, cfg.cutoff);
  Json summary = Json::object();
  for (const auto& [label, rho] :
       std::vector<std::pair<std::string, DensityMatrix>>{{"input", input}, {"output", finite}, {"ideal", ideal}}) {
    Json s = emit_state_products(m, files, "fig3", label, rho);
    s["fidelity_with_photon"] = fidelity(rho, photon);
    s["anticorrelation"] = to_json(anticorrelation(rho));
    summary[label] = std::move(s);
  }
  files.push_back(m.emit("fig3", "photon_numbers.csv",
                         populations_csv({{"input", input}, {"output", finite}, {"ideal", ideal}})));
  files.push_back(m.emit("fig3", "summary.json", dump(summary)));
  return files;
}

// States compared on the D/V curves.
std::vector<std::pair<std::string, DensityMatrix>> supplementary_states(const RunConfig& cfg) {
  const DensityMatrix input = prepare_experimental_photon(cfg.loss, cfg.cutoff);
  std::vector<std::pair<std::string, DensityMatrix>> states{{"photon", ket_to_dm(make_fock(1, cfg.cutoff))},
                                                            {"input", input}};
  for (double g : kFig2Gammas) {
    states.emplace_back("gate_" + gamma_label(g),
                        apply_gate(input, SqueezeGateConfig::experiment(g), cfg.dephasing_stddev));
  }
  for (double g : kFig2Gammas) {
    states.emplace_back("ideal_" + gamma_label(g), apply_gate(input, SqueezeGateConfig::pure_ancilla(g, kIdealAncillaVariance),
                                                              cfg.dephasing_stddev));
  }
  return states;
}

Paths reproduce_supplfig1(const RunConfig& cfg, Manifest& m) {
  Paths files;
  const std::vector<double> betas = linspace(0.05, 2.5, 50);
  std::vector<double> coherent;
  std::vector<double> gaussian;
  std::string bounds = "beta,coherent,gaussian\n";
  for (double b : betas) {
    coherent.push_back(coherent_mixture_bound(b));
    gaussian.push_back(gaussian_mixture_bound(b).value);
    bounds += fmt::format("{},{},{}\n", b, coherent.back(), gaussian.back());
  }
  files.push_back(m.emit("supplfig1", "bounds.csv", bounds));
  Json summary = Json::object();
  for (const auto& [label, rho] : supplementary_states(cfg)) {
    const MetricCurve c = metric_curve_beta(rho, betas, 0.0, label);
    files.push_back(m.emit("supplfig1", fmt::format("curve_{}.csv", label), metric_curve_csv(c)));
    // Most negative margin below each bound.
    double gauss_margin = std::numeric_limits<double>::infinity();
    double coh_margin = std::numeric_limits<double>::infinity();
    double gauss_beta = 0.0;
    for (size_t i = 0; i < betas.size(); ++i) {
      if (c.v_values[i] - gaussian[i] < gauss_margin) {
        gauss_margin = c.v_values[i] - gaussian[i];
        gauss_beta = betas[i];
      }
      coh_margin = std::min(coh_margin, c.v_values[i] - coherent[i]);
    }
    summary[label] = {{"d_max", {{"beta", c.d_max.axis}, {"value", c.d_max.value}}},
                      {"v_min", {{"beta", c.v_min.axis}, {"value", c.v_min.value}}},
                      {"min_margin_to_coherent_bound", coh_margin},
                      {"min_margin_to_gaussian_bound", gauss_margin},
                      {"beta_of_min_gaussian_margin", gauss_beta},
                      {"violates_gaussian_bound", gauss_margin < 0.0}};
  }
  files.push_back(m.emit("supplfig1", "summary.json", dump(summary)));
  return files;
}

Paths reproduce_supplfig2(const RunConfig& cfg, Manifest& m) {
  Paths files;
  const std::vector<double> betas = linspace(0.05, 2.5, 50);
  const std::vector<double> phases = linspace(0.0, 2 * kPi, 73);
  Json summary = Json::object();
  for (const auto& [label, rho] : supplementary_states(cfg)) {
    const double beta0 = metric_curve_beta(rho, betas).v_min.axis;
    const MetricCurve c = metric_curve_phase(rho, beta0, phases, label);
    files.push_back(m.emit("supplfig2", fmt::format("phase_curve_{}.csv", label), metric_curve_csv(c)));
    const auto [vlo, vhi] = std::minmax_element(c.v_values.begin(), c.v_values.end());
    const auto [dlo, dhi] = std::minmax_element(c.d_values.begin(), c.d_values.end());
    summary[label] = {{"beta0", beta0}, {"v_modulation", *vhi - *vlo}, {"d_modulation", *dhi - *dlo}};
  }
  files.push_back(m.emit("supplfig2", "summary.json", dump(summary)));
  return files;
}

}  // namespace

GridSpec covering_grid(const DensityMatrix& rho, int points, double min_limit) {
  const double radius = 2.0 * std::sqrt(2.0 * mean_photon_number(rho) + 1.0);
  const double limit = std::max(min_limit, std::ceil(2.0 * radius) / 2.0);
  return GridSpec{-limit, limit, points, -limit, limit, points};
}

Paths cmd_prepare(const RunConfig& cfg) {
  Manifest m(cfg.out_dir, "prepare", cfg.to_json());
  return with_manifest(m, [&] {
    const DensityMatrix rho = prepare_input(cfg.input, cfg.loss, cfg.cutoff);
    return Paths{m.emit("prepare", "state.json", dump(to_json(rho))),
                 m.emit("prepare", "state_summary.json", dump(state_summary(rho)))};
  });
}

Paths cmd_apply(const RunConfig& cfg, const fs::path& state_file) {
  Manifest m(cfg.out_dir, "apply", cfg.to_json());
  return with_manifest(m, [&] {
    const DensityMatrix rho = load_state(state_file, cfg.cutoff);
    const DensityMatrix out = apply_gate(rho, cfg.gate, cfg.dephasing_stddev);
    Json s = state_summary(out);
    s["gate"] = to_json(cfg.gate);
    s["dephasing_stddev"] = cfg.dephasing_stddev;
    s["wigner_min"] = minimum_json(wigner_min(out));
    return Paths{m.emit("apply", "applied_state.json", dump(to_json(out))),
                 m.emit("apply", "applied_summary.json", dump(s))};
  });
}

Paths cmd_wigner(const RunConfig& cfg, const fs::path& state_file, const WignerFlags& flags) {
  Manifest m(cfg.out_dir, "wigner", cfg.to_json());
  return with_manifest(m, [&] {
    const DensityMatrix rho = load_state(state_file, cfg.cutoff);
    const GridSpec spec = flags.limit > 0.0
                              ? GridSpec{-flags.limit, flags.limit, flags.points, -flags.limit, flags.limit, flags.points}
                              : covering_grid(rho, flags.points);
    const WignerGrid grid = wigner(rho, spec);
    const double abs_integral = grid.values.cwiseAbs().sum() * spec.dx() * spec.dp();
    const Json s{{"grid", to_json(spec)},
                 {"integral", grid.integral()},
                 {"negativity_volume", abs_integral - 1.0},
                 {"wigner_min", minimum_json(wigner_min(rho))}};
    return Paths{m.emit("wigner", "wigner.csv", wigner_csv(grid)), m.emit("wigner", "wigner_summary.json", dump(s))};
  });
}

Paths cmd_marginals(const RunConfig& cfg, const fs::path& state_file, const MarginalFlags& flags) {
  Manifest m(cfg.out_dir, "marginals", cfg.to_json());
  return with_manifest(m, [&] {
    if (flags.phases < 1) throw ValidationError("--phases must be >= 1");
    const DensityMatrix rho = load_state(state_file, cfg.cutoff);
    const std::vector<double> phases = full_period(flags.phases);
    const std::vector<double> variances = phase_variances(rho, phases);
    const Json s{{"phases", flags.phases}, {"variance_spread", relative_spread(variances)}};
    return Paths{m.emit("marginals", "marginals.csv", marginals_csv(marginals_of(rho, flags))),
                 m.emit("marginals", "marginal_variances.csv", variances_csv(phases, variances)),
                 m.emit("marginals", "marginals_summary.json", dump(s))};
  });
}

Paths cmd_metrics(const RunConfig& cfg, const fs::path& state_file, const MetricFlags& flags) {
  Manifest m(cfg.out_dir, "metrics", cfg.to_json());
  return with_manifest(m, [&] {
    if (flags.points < 2 || !(flags.beta_max > 0.0)) throw ValidationError("--points >= 2 and --beta-max > 0 required");
    const DensityMatrix rho = load_state(state_file, cfg.cutoff);
    const std::vector<double> betas = linspace(0.0, flags.beta_max, flags.points);
    const MetricCurve c = metric_curve_beta(rho, betas, flags.phase, state_file.filename().string());
    Paths files{m.emit("metrics", "metrics.csv", metric_curve_csv(c))};
    Json report{{"phase", flags.phase},
                {"d_max", {{"beta", c.d_max.axis}, {"value", c.d_max.value}}},
                {"v_min", {{"beta", c.v_min.axis}, {"value", c.v_min.value}}}};
    if (flags.anticorrelation) report["anticorrelation"] = to_json(anticorrelation(rho, flags.eta));
    if (flags.fit) {
      const CssFit fit = fit_css_amplitude(rho);
      report["css_fit"] = {{"alpha", fit.alpha}, {"fidelity", fit.fidelity}};
    }
    if (flags.bounds) {
      std::string csv = "beta,coherent,gaussian\n";
      for (double b : betas) {
        if (b <= 0.0) continue;
        csv += fmt::format("{},{},{}\n", b, coherent_mixture_bound(b), gaussian_mixture_bound(b).value);
      }
      files.push_back(m.emit("metrics", "bounds.csv", csv));
    }
    files.push_back(m.emit("metrics", "metrics_report.json", dump(report)));
    return files;
  });
}

Paths cmd_tomo(const RunConfig& cfg, const fs::path& state_file) {
  Manifest m(cfg.out_dir, "tomo", cfg.to_json());
  const TomographySettings& t = cfg.tomography;
  m.set_seed("tomography", t.seed);
  return with_manifest(m, [&] {
    const DensityMatrix truth = load_state(state_file, cfg.cutoff);
    const auto records = sample_quadratures(truth, uniform_phases(t.phases), t.samples / t.phases, t.seed);
    Paths files{m.emit("tomo", "records.csv", records_csv(records))};
    const MaxLikOptions opts{t.max_iters, t.tol, t.bin_width, t.efficiency};
    const ReconstructionReport rep = maxlik_reconstruct(records, t.cutoff, opts);
    const DensityMatrix embedded = rep.rho.resized(std::max(truth.dim(), rep.rho.dim()));
    const DensityMatrix truth_cmp = truth.resized(embedded.dim());
    Json report = to_json(rep);
    report["run"] = {{"seed", t.seed},           {"phases", t.phases},       {"samples", records.size()},
                     {"bin_width", t.bin_width}, {"max_iters", t.max_iters}, {"tol", t.tol},
                     {"cutoff", t.cutoff}};
    report["round_trip"] = {{"fidelity", fidelity(embedded, truth_cmp)},
                            {"truth_populations", populations_json(truth)},
                            {"reconstructed_populations", populations_json(rep.rho)},
                            {"truth_wigner_min", wigner_min(truth).value},
                            {"reconstructed_wigner_min", wigner_min(rep.rho).value}};
    if (!rep.converged) std::cerr << "warning: reconstruction stopped at max_iters without converging\n";
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    files.push_back(m.emit("tomo", "reconstruction.json", dump(report)));
    return files;
  });
}

Paths cmd_reproduce(const RunConfig& cfg, const std::string& figure) {
  Manifest m(cfg.out_dir / figure, "reproduce " + figure, cfg.to_json());
  return with_manifest(m, [&] {
    if (figure == "fig2") return reproduce_fig2(cfg, m);
    if (figure == "fig3") return reproduce_fig3(cfg, m);
    if (figure == "supplfig1") return reproduce_supplfig1(cfg, m);
    if (figure == "supplfig2") return reproduce_supplfig2(cfg, m);
    throw ValidationError(fmt::format("unknown figure '{}'", figure));
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Measurement-based squeezing of non-Gaussian optical states"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  std::optional<std::string> out;
  app.add_option("--config", config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for all random draws");
  app.add_option("--cutoff", cutoff, "Fock cutoff N");
  app.add_option("--out", out, "Output directory");

  std::string state_file;
  std::string input_text;
  std::optional<double> gamma;
  WignerFlags wf;
  MarginalFlags mf;
  MetricFlags mtf;
  std::string figure;
  std::optional<int> tomo_phases;
  std::optional<int> tomo_samples;
  std::optional<int> tomo_cutoff;
  std::optional<double> tomo_eff;

  auto* prepare = app.add_subcommand("prepare", "Prepare the input state");
  prepare->add_option("--input", input_text, "e.g. fock:1, coherent:0.5,0.2, css:0.97, experimental-photon");
  auto* apply = app.add_subcommand("apply", "Apply the squeezing gate to a state file");
  apply->add_option("--state", state_file, "State JSON")->required()->check(CLI::ExistingFile);
  apply->add_option("--gamma", gamma, "Gate squeezing parameter (overrides the config)");
  auto* wig = app.add_subcommand("wigner", "Wigner function on a grid");
  wig->add_option("--state", state_file, "State JSON")->required()->check(CLI::ExistingFile);
  wig->add_option("--limit", wf.limit, "Half width of the grid (0 = automatic)");
  wig->add_option("--points", wf.points, "Points per axis");
  auto* marg = app.add_subcommand("marginals", "Quadrature distributions over a period");
  marg->add_option("--state", state_file, "State JSON")->required()->check(CLI::ExistingFile);
  marg->add_option("--phases", mf.phases, "Number of phases");
  marg->add_option("--points", mf.points, "Abscissae per phase");
  marg->add_option("--limit", mf.limit, "Half width of the abscissa range");
  auto* met = app.add_subcommand("metrics", "D and V curves, anti-correlation, cat fit");
  met->add_option("--state", state_file, "State JSON")->required()->check(CLI::ExistingFile);
  met->add_option("--beta-max", mtf.beta_max, "Largest probe amplitude");
  met->add_option("--points", mtf.points, "Grid points in beta");
  met->add_option("--phase", mtf.phase, "Probe phase");
  met->add_flag("--anticorrelation", mtf.anticorrelation, "Report the anti-correlation parameter");
  met->add_option("--eta", mtf.eta, "Detector efficiency for the anti-correlation");
  met->add_flag("--fit", mtf.fit, "Fit an odd cat amplitude");
  met->add_flag("--bounds", mtf.bounds, "Emit the coherent and Gaussian bounds");
  auto* tomo = app.add_subcommand("tomo", "Simulated homodyne tomography round trip");
  tomo->add_option("--state", state_file, "State JSON")->required()->check(CLI::ExistingFile);
  tomo->add_option("--phases", tomo_phases, "Number of phases");
  tomo->add_option("--samples", tomo_samples, "Total number of samples");
  tomo->add_option("--recon-cutoff", tomo_cutoff, "Reconstruction cutoff");
  tomo->add_option("--efficiency", tomo_eff, "Detector efficiency assumed by the POVM");
  auto* repro = app.add_subcommand("reproduce", "Regenerate the data behind a figure");
  repro->add_option("figure", figure, "fig2 | fig3 | supplfig1 | supplfig2")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "supplfig1", "supplfig2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) {
      cfg.seed = *seed;
      cfg.tomography.seed = *seed;
    }
    if (cutoff) cfg.cutoff = *cutoff;
    if (out) cfg.out_dir = *out;
    if (!input_text.empty()) cfg.input = InputStateSpec::parse(input_text);
    if (gamma) {
      // Same ancilla noise, re-oriented to match the sign of the new gamma.
      cfg.gate.gamma = *gamma;
      cfg.gate.ancilla.orientation = *gamma < 0 ? SqueezedQuadrature::x : SqueezedQuadrature::p;
    }
    if (tomo_phases) cfg.tomography.phases = *tomo_phases;
    if (tomo_samples) cfg.tomography.samples = *tomo_samples;
    if (tomo_cutoff) cfg.tomography.cutoff = *tomo_cutoff;
    if (tomo_eff) cfg.tomography.efficiency = *tomo_eff;
    cfg.validate();

    Paths files;
    if (*prepare) files = cmd_prepare(cfg);
    if (*apply) files = cmd_apply(cfg, state_file);
    if (*wig) files = cmd_wigner(cfg, state_file, wf);
    if (*marg) files = cmd_marginals(cfg, state_file, mf);
    if (*met) files = cmd_metrics(cfg, state_file, mtf);
    if (*tomo) files = cmd_tomo(cfg, state_file);
    if (*repro) files = cmd_reproduce(cfg, figure);
    for (const auto& f : files) std::cout << f.string() << "\n";
    return 0;
  } catch (const ConvergenceError& e) {
    std::cerr << "error (no convergence): " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace squeezelab::cli
