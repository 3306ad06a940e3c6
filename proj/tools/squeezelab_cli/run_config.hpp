#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "squeezelab/gates.hpp"
#include "squeezelab/io.hpp"
#include "squeezelab/squeezer.hpp"

namespace squeezelab::cli {

struct InputStateSpec {
  std::string kind = "experimental-photon";  // fock | coherent | css | experimental-photon | subtracted-squeezed
  int n = 1;                                 // fock
  Complex alpha = 0.97;                      // coherent, css
  Parity parity = Parity::odd;               // css
  double r = 0.5;                            // subtracted-squeezed: squeezing before subtraction

  /// Parses "fock:1", "coherent:0.5,0.2", "css:0.97", "css:0.97,even",
  /// "experimental-photon", "subtracted-squeezed:0.5".
  static InputStateSpec parse(const std::string& text);
};

struct TomographySettings {
  int phases = 12;
  int samples = 100000;  // total, split evenly over phases
  std::uint64_t seed = 1;
  double bin_width = 0.1;
  int max_iters = 2000;
  double tol = 1e-9;
  double efficiency = 1.0;
  int cutoff = 15;  // reconstruction cutoff
};

struct RunConfig {
  int cutoff = kDefaultCutoff;
  std::uint64_t seed = 1;
  InputStateSpec input;
  SqueezeGateConfig gate = SqueezeGateConfig::experiment(0.26);
  LossBudget loss = LossBudget::experiment();
  TomographySettings tomography;
  double dephasing_stddev = 0.0;  // radians
  std::filesystem::path out_dir = "out";

  void validate() const;
  static RunConfig from_json(const Json& j);
  Json to_json() const;
};

/// Reads and validates a config document. Unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);

DensityMatrix prepare_input(const InputStateSpec& spec, const LossBudget& loss, int cutoff);
/// Gate channel followed by the configured phase jitter.
DensityMatrix apply_gate(const DensityMatrix& rho, const SqueezeGateConfig& gate, double dephasing_stddev);

/// Ancilla from JSON: {"squeezed_db", "antisqueezed_db"} or
/// {"squeezed_variance"[, "antisqueezed_variance"]}; orientation follows gamma.
AncillaModel ancilla_from_json(const Json& j, double gamma);
SqueezeGateConfig gate_from_json(const Json& j);
Json to_json(const SqueezeGateConfig& gate);

}  // namespace squeezelab::cli
