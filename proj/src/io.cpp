#include "squeezelab/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace squeezelab {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(fmt::format("missing JSON field '{}'", key));
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ValidationError(fmt::format("'{}' must be a number", what));
  return j.get<double>();
}

}  // namespace

Json to_json(const DensityMatrix& rho) {
  const int n = rho.dim();
  Json re = Json::array();
  Json im = Json::array();
  for (int i = 0; i < n; ++i) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (int k = 0; k < n; ++k) {
      rr.push_back(rho.matrix()(i, k).real());
      ri.push_back(rho.matrix()(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"dim", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Json to_json(const Ket& psi) {
  Json re = Json::array();
  Json im = Json::array();
  for (int i = 0; i < psi.dim(); ++i) {
    re.push_back(psi[i].real());
    im.push_back(psi[i].imag());
  }
  return Json{{"dim", psi.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

DensityMatrix state_from_json(const Json& j) {
  const Json& dim_j = require(j, "dim");
  if (!dim_j.is_number_integer() || dim_j.get<int>() < 2) throw ValidationError("'dim' must be an integer >= 2");
  const int n = dim_j.get<int>();
  const Json& re = require(j, "re");
  const Json& im = require(j, "im");
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n) {
    throw ValidationError("'re' and 'im' must be arrays of length dim");
  }
  if (n > 0 && re[0].is_array()) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
      if (!re[i].is_array() || !im[i].is_array() || static_cast<int>(re[i].size()) != n ||
          static_cast<int>(im[i].size()) != n) {
        throw ValidationError(fmt::format("row {} of the density matrix has the wrong length", i));
      }
      for (int k = 0; k < n; ++k) m(i, k) = Complex(number(re[i][k], "re"), number(im[i][k], "im"));
    }
    return DensityMatrix(std::move(m));
  }
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(number(re[i], "re"), number(im[i], "im"));
  return ket_to_dm(Ket(std::move(v)));
}

Json to_json(const GridSpec& s) {
  return Json{{"x_min", s.x_min}, {"x_max", s.x_max}, {"nx", s.nx},
              {"p_min", s.p_min}, {"p_max", s.p_max}, {"np", s.np}};
}

GridSpec grid_spec_from_json(const Json& j) {
  GridSpec s;
  s.x_min = number(require(j, "x_min"), "x_min");
  s.x_max = number(require(j, "x_max"), "x_max");
  s.nx = require(j, "nx").get<int>();
  s.p_min = number(require(j, "p_min"), "p_min");
  s.p_max = number(require(j, "p_max"), "p_max");
  s.np = require(j, "np").get<int>();
  s.validate();
  return s;
}

Json to_json(const WignerGrid& grid) {
  Json values = Json::array();
  for (int i = 0; i < grid.spec.nx; ++i) {
    Json row = Json::array();
    for (int k = 0; k < grid.spec.np; ++k) row.push_back(grid.values(i, k));
    values.push_back(std::move(row));
  }
  return Json{{"grid", to_json(grid.spec)}, {"values", std::move(values)}};
}

Json to_json(const MarginalDistribution& m) { return Json{{"theta", m.theta}, {"x", m.xs}, {"pdf", m.pdf}}; }

Json to_json(const AnticorrelationResult& a) {
  return Json{{"p_c", a.p_c}, {"p_s", a.p_s}, {"A", a.a_value}, {"detector_efficiency", a.detector_efficiency}};
}

Json to_json(const ReconstructionReport& r) {
  return Json{{"state", to_json(r.rho)},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"efficiency_assumed", r.efficiency_assumed},
              {"distinct_elements", r.distinct_elements},
              {"log_likelihood_trace", r.log_likelihood_trace},
              {"warnings", r.warnings}};
}

std::string wigner_csv(const WignerGrid& grid) {
  const GridSpec& s = grid.spec;
  std::string out = fmt::format("# grid x_min={} x_max={} nx={} p_min={} p_max={} np={}\nx,p,W\n", s.x_min, s.x_max,
                                s.nx, s.p_min, s.p_max, s.np);
  for (int i = 0; i < s.nx; ++i) {
    for (int k = 0; k < s.np; ++k) out += fmt::format("{},{},{}\n", s.x(i), s.p(k), grid.values(i, k));
  }
  return out;
}

std::string marginals_csv(const std::vector<MarginalDistribution>& marginals) {
  std::string out = "theta,x,pdf\n";
  for (const auto& m : marginals) {
    for (size_t i = 0; i < m.xs.size(); ++i) out += fmt::format("{},{},{}\n", m.theta, m.xs[i], m.pdf[i]);
  }
  return out;
}

std::string records_csv(const std::vector<QuadratureRecord>& records) {
  std::string out = "theta,x\n";
  for (const auto& r : records) out += fmt::format("{},{}\n", r.theta, r.x);
  return out;
}

std::vector<QuadratureRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("theta,x", 0) != 0) {
    throw ValidationError("quadrature CSV must start with the header 'theta,x'");
  }
  std::vector<QuadratureRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError(fmt::format("line {}: expected 'theta,x'", lineno));
    try {
      size_t used = 0;
      const double theta = std::stod(line.substr(0, comma));
      const std::string rest = line.substr(comma + 1);
      const double x = std::stod(rest, &used);
      if (used != rest.size() && rest.find_first_not_of(" \r", used) != std::string::npos) {
        throw std::invalid_argument("trailing text");
      }
      out.push_back({wrap_phase(theta), x});
    } catch (const std::logic_error&) {
      throw ValidationError(fmt::format("line {}: cannot parse '{}'", lineno, line));
    }
  }
  return out;
}

std::string metric_curve_csv(const MetricCurve& curve) {
  std::string out = "axis,D,V\n";
  for (size_t i = 0; i < curve.axis.size(); ++i) {
    out += fmt::format("{},{},{}\n", curve.axis[i], curve.d_values[i], curve.v_values[i]);
  }
  return out;
}

std::vector<QuadratureRecord> trajectory_records(const MonteCarloResult& result, const SqueezeGateConfig& cfg) {
  std::vector<QuadratureRecord> out;
  out.reserve(result.trajectories.size());
  for (const auto& t : result.trajectories) out.push_back({cfg.feedforward_phase(), t.measurement_outcome});
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out.flush()) throw ValidationError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace squeezelab
