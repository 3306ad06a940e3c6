#include "squeezelab_cli/run_config.hpp"

#include <initializer_list>

#include <fmt/format.h>

namespace squeezelab::cli {

namespace {

void check_keys(const Json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(fmt::format("'{}' must be a JSON object", where));
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(fmt::format("unknown key '{}' in '{}'", key, where));
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(fmt::format("field '{}' has the wrong type", key));
  }
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError(fmt::format("cannot parse '{}' in '{}'", s, context));
  }
}

Json input_to_json(const InputStateSpec& s) {
  Json j{{"kind", s.kind}};
  if (s.kind == "fock") j["n"] = s.n;
  if (s.kind == "coherent" || s.kind == "css") j["alpha"] = Json::array({s.alpha.real(), s.alpha.imag()});
  if (s.kind == "css") j["parity"] = s.parity == Parity::odd ? "odd" : "even";
  if (s.kind == "subtracted-squeezed") j["r"] = s.r;
  return j;
}

InputStateSpec input_from_json(const Json& j) {
  if (j.is_string()) return InputStateSpec::parse(j.get<std::string>());
  check_keys(j, "input_state", {"kind", "n", "alpha", "parity", "r"});
  InputStateSpec s;
  s.kind = get_or<std::string>(j, "kind", s.kind);
  s.n = get_or<int>(j, "n", s.n);
  if (j.contains("alpha")) {
    const Json& a = j.at("alpha");
    if (a.is_number()) {
      s.alpha = a.get<double>();
    } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
      s.alpha = Complex(a[0].get<double>(), a[1].get<double>());
    } else {
      throw ValidationError("'alpha' must be a number or [re, im]");
    }
  }
  const std::string parity = get_or<std::string>(j, "parity", "odd");
  if (parity != "odd" && parity != "even") throw ValidationError("'parity' must be 'odd' or 'even'");
  s.parity = parity == "odd" ? Parity::odd : Parity::even;
  s.r = get_or<double>(j, "r", s.r);
  return s;
}

LossBudget loss_from_json(const Json& j) {
  check_keys(j, "loss_budget",
             {"eta_detection", "eta_propagation", "dark_fraction", "multiphoton_fraction", "eta_residual"});
  LossBudget b = LossBudget::experiment();
  b.eta_detection = get_or(j, "eta_detection", b.eta_detection);
  b.eta_propagation = get_or(j, "eta_propagation", b.eta_propagation);
  b.dark_fraction = get_or(j, "dark_fraction", b.dark_fraction);
  b.multiphoton_fraction = get_or(j, "multiphoton_fraction", b.multiphoton_fraction);
  b.eta_residual = get_or(j, "eta_residual", b.eta_residual);
  return b;
}

Json loss_to_json(const LossBudget& b) {
  return Json{{"eta_detection", b.eta_detection},
              {"eta_propagation", b.eta_propagation},
              {"dark_fraction", b.dark_fraction},
              {"multiphoton_fraction", b.multiphoton_fraction},
              {"eta_residual", b.eta_residual}};
}

TomographySettings tomo_from_json(const Json& j) {
  check_keys(j, "tomography",
             {"phases", "samples", "seed", "bin_width", "max_iters", "tol", "efficiency", "cutoff"});
  TomographySettings t;
  t.phases = get_or(j, "phases", t.phases);
  t.samples = get_or(j, "samples", t.samples);
  t.seed = get_or(j, "seed", t.seed);
  t.bin_width = get_or(j, "bin_width", t.bin_width);
  t.max_iters = get_or(j, "max_iters", t.max_iters);
  t.tol = get_or(j, "tol", t.tol);
  t.efficiency = get_or(j, "efficiency", t.efficiency);
  t.cutoff = get_or(j, "cutoff", t.cutoff);
  return t;
}

Json tomo_to_json(const TomographySettings& t) {
  return Json{{"phases", t.phases},       {"samples", t.samples},     {"seed", t.seed},
              {"bin_width", t.bin_width}, {"max_iters", t.max_iters}, {"tol", t.tol},
              {"efficiency", t.efficiency}, {"cutoff", t.cutoff}};
}

}  // namespace

InputStateSpec InputStateSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  InputStateSpec s;
  s.kind = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::vector<std::string> parts;
  for (size_t start = 0; !args.empty() && start <= args.size();) {
    const auto comma = args.find(',', start);
    parts.push_back(args.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  auto need = [&](size_t lo, size_t hi) {
    if (parts.size() < lo || parts.size() > hi) {
      throw ValidationError(fmt::format("input '{}' takes {} to {} parameters", text, lo, hi));
    }
  };
  if (s.kind == "fock") {
    need(1, 1);
    const double n = parse_double(parts[0], text);
    if (n != std::floor(n)) throw ValidationError(fmt::format("photon number in '{}' must be an integer", text));
    s.n = static_cast<int>(n);
  } else if (s.kind == "coherent") {
    need(1, 2);
    s.alpha = Complex(parse_double(parts[0], text), parts.size() > 1 ? parse_double(parts[1], text) : 0.0);
  } else if (s.kind == "css") {
    need(1, 2);
    s.alpha = parse_double(parts[0], text);
    if (parts.size() > 1) {
      if (parts[1] != "odd" && parts[1] != "even") throw ValidationError("cat parity must be 'odd' or 'even'");
      s.parity = parts[1] == "odd" ? Parity::odd : Parity::even;
    }
  } else if (s.kind == "experimental-photon") {
    need(0, 0);
  } else if (s.kind == "subtracted-squeezed") {
    need(1, 1);
    s.r = parse_double(parts[0], text);
  } else {
    throw ValidationError(fmt::format("unknown input state kind '{}'", s.kind));
  }
  return s;
}

AncillaModel ancilla_from_json(const Json& j, double gamma) {
  const SqueezedQuadrature o = gamma < 0.0 ? SqueezedQuadrature::x : SqueezedQuadrature::p;
  if (j.is_string()) {
    if (j.get<std::string>() != "experiment") throw ValidationError("ancilla shorthand must be 'experiment'");
    return AncillaModel::experiment(o);
  }
  check_keys(j, "ancilla", {"squeezed_db", "antisqueezed_db", "squeezed_variance", "antisqueezed_variance"});
  if (j.contains("squeezed_db")) {
    if (j.contains("squeezed_variance")) throw ValidationError("give the ancilla in dB or as variances, not both");
    if (!j.contains("antisqueezed_db")) throw ValidationError("'squeezed_db' needs 'antisqueezed_db'");
    return AncillaModel::from_db(get_or(j, "squeezed_db", 0.0), get_or(j, "antisqueezed_db", 0.0), o);
  }
  if (!j.contains("squeezed_variance")) throw ValidationError("ancilla needs 'squeezed_db' or 'squeezed_variance'");
  const double vs = get_or(j, "squeezed_variance", 0.5);
  if (!j.contains("antisqueezed_variance")) return AncillaModel::pure(vs, o);
  AncillaModel m{vs, get_or(j, "antisqueezed_variance", 0.5), o};
  m.validate();
  return m;
}

SqueezeGateConfig gate_from_json(const Json& j) {
  check_keys(j, "gate", {"gamma", "feedforward_gain", "ancilla"});
  if (!j.contains("gamma")) throw ValidationError("gate needs 'gamma'");
  SqueezeGateConfig g;
  g.gamma = get_or(j, "gamma", 0.0);
  if (j.contains("feedforward_gain") && !j.at("feedforward_gain").is_null()) {
    g.feedforward_gain = get_or(j, "feedforward_gain", 0.0);
  }
  g.ancilla = j.contains("ancilla") ? ancilla_from_json(j.at("ancilla"), g.gamma)
                                    : AncillaModel::experiment(g.gamma < 0 ? SqueezedQuadrature::x
                                                                           : SqueezedQuadrature::p);
  g.validate();
  return g;
}

Json to_json(const SqueezeGateConfig& g) {
  Json j{{"gamma", g.gamma},
         {"transmittance", g.transmittance()},
         {"feedforward_gain", g.gain()},
         {"ancilla",
          {{"squeezed_variance", g.ancilla.squeezed_variance},
           {"antisqueezed_variance", g.ancilla.antisqueezed_variance},
           {"orientation", g.ancilla.orientation == SqueezedQuadrature::p ? "p" : "x"}}}};
  return j;
}

void RunConfig::validate() const {
  if (cutoff < 2) throw ValidationError("cutoff must be >= 2");
  gate.validate();
  loss.validate();
  if (!(dephasing_stddev >= 0.0)) throw ValidationError("dephasing_stddev must be >= 0");
  const auto& t = tomography;
  if (t.phases < 1 || t.samples < t.phases) throw ValidationError("tomography needs phases >= 1 and samples >= phases");
  if (!(t.bin_width > 0.0) || t.max_iters < 1 || !(t.tol > 0.0)) throw ValidationError("bad tomography settings");
  if (!(t.efficiency > 0.0 && t.efficiency <= 1.0)) throw ValidationError("tomography efficiency must lie in (0,1]");
  if (t.cutoff < 2) throw ValidationError("tomography cutoff must be >= 2");
  if (input.kind == "fock" && (input.n < 0 || input.n >= cutoff)) {
    throw ValidationError(fmt::format("Fock input n={} does not fit cutoff {}", input.n, cutoff));
  }
}

RunConfig RunConfig::from_json(const Json& j) {
  check_keys(j, "config",
             {"cutoff", "seed", "input_state", "gate", "loss_budget", "tomography", "dephasing_stddev", "out"});
  RunConfig c;
  c.cutoff = get_or(j, "cutoff", c.cutoff);
  c.seed = get_or(j, "seed", c.seed);
  if (j.contains("input_state")) c.input = input_from_json(j.at("input_state"));
  if (j.contains("gate")) c.gate = gate_from_json(j.at("gate"));
  if (j.contains("loss_budget")) c.loss = loss_from_json(j.at("loss_budget"));
  if (j.contains("tomography")) c.tomography = tomo_from_json(j.at("tomography"));
  c.dephasing_stddev = get_or(j, "dephasing_stddev", c.dephasing_stddev);
  c.out_dir = get_or<std::string>(j, "out", c.out_dir.string());
  c.validate();
  return c;
}

Json RunConfig::to_json() const {
  return Json{{"cutoff", cutoff},
              {"seed", seed},
              {"input_state", input_to_json(input)},
              {"gate", cli::to_json(gate)},
              {"loss_budget", loss_to_json(loss)},
              {"tomography", tomo_to_json(tomography)},
              {"dephasing_stddev", dephasing_stddev}};
}

RunConfig load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return RunConfig::from_json(j);
}

DensityMatrix prepare_input(const InputStateSpec& spec, const LossBudget& loss, int cutoff) {
  if (spec.kind == "fock") return ket_to_dm(make_fock(spec.n, cutoff));
  if (spec.kind == "coherent") return ket_to_dm(make_coherent(spec.alpha, cutoff));
  if (spec.kind == "css") return ket_to_dm(make_css(spec.alpha, spec.parity, cutoff));
  if (spec.kind == "experimental-photon") return prepare_experimental_photon(loss, cutoff);
  if (spec.kind == "subtracted-squeezed") {
    return photon_subtract(squeeze(ket_to_dm(make_fock(0, cutoff)), spec.r)).state;
  }
  throw ValidationError(fmt::format("unknown input state kind '{}'", spec.kind));
}

DensityMatrix apply_gate(const DensityMatrix& rho, const SqueezeGateConfig& gate, double dephasing_stddev) {
  const DensityMatrix out = mb_squeeze_channel(rho, gate);
  return dephasing_stddev > 0.0 ? dephase(out, dephasing_stddev) : out;
}

}  // namespace squeezelab::cli
