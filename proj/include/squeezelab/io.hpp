#pragma once

// File formats.
//
// States (JSON): density matrices as {"dim": N, "re": [[...]], "im": [[...]]},
// kets as {"dim": N, "re": [...], "im": [...]}. Doubles are written in
// shortest round-trip form, so reloading is exact.
//
// Tables (CSV, header line required):
//   Wigner grid      "# grid x_min=.. x_max=.. nx=.. p_min=.. p_max=.. np=.." then x,p,W
//   marginals        theta,x,pdf
//   quadrature data  theta,x
//   metric curves    axis,D,V

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "squeezelab/metrics.hpp"
#include "squeezelab/phase_space.hpp"
#include "squeezelab/squeezer.hpp"
#include "squeezelab/tomography.hpp"

namespace squeezelab {

using Json = nlohmann::ordered_json;

Json to_json(const DensityMatrix& rho);
Json to_json(const Ket& psi);
/// Accepts either state form; a ket is returned as its projector. The result
/// passes the DensityMatrix invariants or a ValidationError is thrown.
DensityMatrix state_from_json(const Json& j);

Json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const Json& j);
Json to_json(const WignerGrid& grid);
Json to_json(const MarginalDistribution& m);
Json to_json(const AnticorrelationResult& a);
Json to_json(const ReconstructionReport& report);

std::string wigner_csv(const WignerGrid& grid);
std::string marginals_csv(const std::vector<MarginalDistribution>& marginals);
std::string records_csv(const std::vector<QuadratureRecord>& records);
std::vector<QuadratureRecord> records_from_csv(const std::string& text);
std::string metric_curve_csv(const MetricCurve& curve);

/// Gate outcomes as quadrature records; theta is the measured ancilla-arm phase.
std::vector<QuadratureRecord> trajectory_records(const MonteCarloResult& result, const SqueezeGateConfig& cfg);

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace squeezelab
