#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "squeezelab_cli/run_config.hpp"

namespace squeezelab::cli {

struct WignerFlags {
  double limit = 0.0;  // 0 picks a range that covers the state
  int points = 121;
};

struct MarginalFlags {
  int phases = 24;
  int points = 401;
  double limit = 6.0;
};

struct MetricFlags {
  double beta_max = 2.5;
  int points = 51;
  double phase = 0.0;
  bool anticorrelation = false;
  double eta = 1.0;
  bool fit = false;
  bool bounds = false;
};

// Every command writes into cfg.out_dir and merges an entry into
// out_dir/manifest.json. Returned paths are the emitted files.
std::vector<std::filesystem::path> cmd_prepare(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_apply(const RunConfig& cfg, const std::filesystem::path& state_file);
std::vector<std::filesystem::path> cmd_wigner(const RunConfig& cfg, const std::filesystem::path& state_file,
                                              const WignerFlags& flags);
std::vector<std::filesystem::path> cmd_marginals(const RunConfig& cfg, const std::filesystem::path& state_file,
                                                 const MarginalFlags& flags);
std::vector<std::filesystem::path> cmd_metrics(const RunConfig& cfg, const std::filesystem::path& state_file,
                                               const MetricFlags& flags);
std::vector<std::filesystem::path> cmd_tomo(const RunConfig& cfg, const std::filesystem::path& state_file);
/// figure: fig2 | fig3 | supplfig1 | supplfig2. Outputs go to out_dir/figure.
std::vector<std::filesystem::path> cmd_reproduce(const RunConfig& cfg, const std::string& figure);

/// Wigner grid symmetric about the origin that satisfies the coverage rule.
GridSpec covering_grid(const DensityMatrix& rho, int points, double min_limit = 5.0);

/// Entry point shared by the executable and tests; returns the exit code.
int run_cli(int argc, char** argv);

}  // namespace squeezelab::cli
