#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "squeezelab/phase_space.hpp"
#include "squeezelab_cli/commands.hpp"
#include "squeezelab_cli/manifest.hpp"

using namespace squeezelab;
using namespace squeezelab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("squeezelab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunConfig config_in(const fs::path& dir) {
  RunConfig c;
  c.out_dir = dir;
  return c;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "squeezelab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

DensityMatrix reload(const fs::path& file) { return state_from_json(Json::parse(read_text(file))); }

}  // namespace

TEST(Config, InputShorthand) {
  EXPECT_EQ(InputStateSpec::parse("fock:3").n, 3);
  EXPECT_EQ(InputStateSpec::parse("coherent:0.5,-0.2").alpha, Complex(0.5, -0.2));
  EXPECT_EQ(InputStateSpec::parse("css:0.97,even").parity, Parity::even);
  EXPECT_EQ(InputStateSpec::parse("subtracted-squeezed:0.3").r, 0.3);
  EXPECT_THROW(InputStateSpec::parse("fock:1.5"), ValidationError);
  EXPECT_THROW(InputStateSpec::parse("squeezed:1"), ValidationError);
  EXPECT_THROW(InputStateSpec::parse("experimental-photon:1"), ValidationError);
}

TEST(Config, JsonRoundTripAndStrictKeys) {
  const Json j = Json::parse(R"({
    "cutoff": 30, "seed": 7,
    "input_state": {"kind": "css", "alpha": 0.97, "parity": "odd"},
    "gate": {"gamma": -0.26, "ancilla": {"squeezed_variance": 0.01}},
    "tomography": {"phases": 6, "samples": 600},
    "dephasing_stddev": 0.05
  })");
  const RunConfig c = RunConfig::from_json(j);
  EXPECT_EQ(c.cutoff, 30);
  EXPECT_EQ(c.gate.ancilla.orientation, SqueezedQuadrature::x);
  EXPECT_TRUE(c.gate.ancilla.is_pure());
  EXPECT_EQ(c.tomography.phases, 6);
  EXPECT_THROW(RunConfig::from_json(Json::parse(R"({"cutof": 30})")), ValidationError);
  EXPECT_THROW(RunConfig::from_json(Json::parse(R"({"gate": {"gamma": 0.2, "gain": 1}})")), ValidationError);
  EXPECT_THROW(RunConfig::from_json(Json::parse(R"({"dephasing_stddev": -1})")), ValidationError);
  EXPECT_THROW(RunConfig::from_json(Json::parse(R"({"cutoff": "big"})")), ValidationError);
  // The echo is itself a readable config apart from derived gate fields.
  Json echo = c.to_json();
  echo["gate"].erase("transmittance");
  echo["gate"]["ancilla"].erase("orientation");
  EXPECT_EQ(RunConfig::from_json(echo).to_json(), c.to_json());
}

TEST(Cli, PrepareExamples) {
  const fs::path dir = scratch("prepare");
  RunConfig cfg = config_in(dir);
  cfg.input = InputStateSpec::parse("fock:1");
  EXPECT_NEAR(reload(cmd_prepare(cfg).front()).population(1), 1.0, 1e-15);
  cfg.input = InputStateSpec::parse("experimental-photon");
  EXPECT_NEAR(reload(cmd_prepare(cfg).front()).population(1), 0.84, 1e-3);
}

TEST(Cli, ApplyKeepsNegativity) {
  const fs::path dir = scratch("apply");
  RunConfig cfg = config_in(dir);
  const fs::path state = cmd_prepare(cfg).front();
  const DensityMatrix out = reload(cmd_apply(cfg, state).front());
  EXPECT_LT(wigner_min(out).value, 0.0);
}

TEST(Cli, WignerMarginalsMetrics) {
  const fs::path dir = scratch("products");
  RunConfig cfg = config_in(dir);
  cfg.input = InputStateSpec::parse("fock:1");
  const fs::path state = cmd_prepare(cfg).front();
  cmd_wigner(cfg, state, {});
  const Json ws = Json::parse(read_text(dir / "wigner_summary.json"));
  EXPECT_NEAR(ws["wigner_min"]["value"].get<double>(), -1 / std::numbers::pi, 1e-10);

  cfg.input = InputStateSpec::parse("css:1.0");
  const fs::path cat = cmd_prepare(cfg).front();
  cmd_metrics(cfg, cat, {.anticorrelation = true});
  const Json mr = Json::parse(read_text(dir / "metrics_report.json"));
  EXPECT_NEAR(mr["anticorrelation"]["A"].get<double>(), 0.365344, 1e-6);

  cfg.input = InputStateSpec::parse("fock:1");
  const fs::path one = cmd_prepare(cfg).front();
  cmd_apply(cfg, one);
  cmd_marginals(cfg, dir / "applied_state.json", {.phases = 24});
  const std::string table = read_text(dir / "marginal_variances.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 25);
  EXPECT_GT(Json::parse(read_text(dir / "marginals_summary.json"))["variance_spread"].get<double>(), 0.5);
}

TEST(Cli, TomoRoundTrip) {
  const fs::path dir = scratch("tomo");
  RunConfig cfg = config_in(dir);
  cfg.tomography.samples = 60000;
  const fs::path state = cmd_prepare(cfg).front();
  cmd_tomo(cfg, state);
  const Json r = Json::parse(read_text(dir / "reconstruction.json"));
  EXPECT_NEAR(r["round_trip"]["reconstructed_populations"][1].get<double>(), 0.84, 0.01);
  EXPECT_GT(r["round_trip"]["fidelity"].get<double>(), 0.99);
  EXPECT_EQ(r["run"]["seed"].get<std::uint64_t>(), cfg.tomography.seed);
  EXPECT_EQ(records_from_csv(read_text(dir / "records.csv")).size(), 60000u);
}

TEST(Cli, TomoSqueezedPhotonWignerMinimum) {
  const fs::path dir = scratch("tomo_sq");
  RunConfig cfg = config_in(dir);
  const DensityMatrix truth = squeeze(ket_to_dm(make_fock(1, cfg.cutoff)), 0.67);
  write_text(dir / "truth.json", to_json(truth).dump());
  cmd_tomo(cfg, dir / "truth.json");
  const Json r = Json::parse(read_text(dir / "reconstruction.json"));
  EXPECT_NEAR(r["round_trip"]["reconstructed_wigner_min"].get<double>(),
              r["round_trip"]["truth_wigner_min"].get<double>(), 0.01);
}

TEST(Cli, ManifestChecksumsAndReload) {
  const fs::path dir = scratch("manifest");
  const auto files = cmd_reproduce(config_in(dir), "fig3");
  const Json m = Json::parse(read_text(dir / "fig3" / "manifest.json"));
  const Json& entry = m["runs"]["reproduce fig3"];
  EXPECT_EQ(entry["status"], "ok");
  EXPECT_EQ(entry["files"].size(), files.size());
  for (const auto& f : files) {
    const std::string rel = fs::relative(f, dir / "fig3").generic_string();
    EXPECT_EQ(entry["files"][rel]["sha256"], sha256_hex(read_text(f))) << rel;
    if (f.extension() == ".json" && rel.rfind("state_", 0) == 0) EXPECT_NO_THROW(reload(f)) << rel;
  }
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, ReproduceIsDeterministic) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  cmd_reproduce(config_in(a), "fig2");
  cmd_reproduce(config_in(b), "fig2");
  for (const auto& e : fs::directory_iterator(a / "fig2")) {
    EXPECT_EQ(read_text(e.path()), read_text(b / "fig2" / e.path().filename())) << e.path();
  }
}

TEST(Cli, Fig2ThenInverseGateRecoversInput) {
  const int n = 40;
  const DensityMatrix input = prepare_experimental_photon(LossBudget::experiment(), n);
  for (double g : {0.26, 0.37, 0.67}) {
    const DensityMatrix there = apply_gate(input, SqueezeGateConfig::pure_ancilla(g, 5e-5), 0.0);
    const DensityMatrix back = apply_gate(there, SqueezeGateConfig::pure_ancilla(-g, 5e-5), 0.0);
    EXPECT_GT(fidelity(back, input), 0.995) << g;
  }
}

TEST(Cli, PartialManifestOnFailure) {
  const fs::path dir = scratch("fail");
  RunConfig cfg = config_in(dir);
  write_text(dir / "bad.json", R"({"dim": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]})");
  EXPECT_THROW(cmd_apply(cfg, dir / "bad.json"), ValidationError);
  const Json m = Json::parse(read_text(dir / "manifest.json"));
  EXPECT_EQ(m["runs"]["apply"]["status"].get<std::string>().rfind("failed", 0), 0u);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  EXPECT_EQ(run({"--out", dir.string(), "prepare", "--input", "fock:1"}), 0);
  EXPECT_EQ(run({"--out", dir.string(), "--cutoff", "3", "prepare", "--input", "fock:7"}), 2);
  EXPECT_EQ(run({"--out", dir.string(), "reproduce", "fig9"}), 2);
  EXPECT_EQ(run({"--out", dir.string(), "nonsense"}), 2);
  write_text(dir / "cfg.json", R"({"tomography": {"max_iters": 1}})");
  EXPECT_EQ(run({"--config", (dir / "cfg.json").string(), "--out", dir.string(), "tomo", "--state",
                 (dir / "state.json").string(), "--samples", "1200"}),
            0);
}
