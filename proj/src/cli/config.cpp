#include "paultrap/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "paultrap/fields/geometry_io.hpp"

namespace paultrap::cli {

namespace {

struct UnitDef {
  const char* dimension;
  double factor;
};

const std::map<std::string, UnitDef>& unit_table() {
  static const std::map<std::string, UnitDef> t{
      {"um", {"length", 1e-6}},    {"µm", {"length", 1e-6}},  {"mm", {"length", 1e-3}},
      {"m", {"length", 1.0}},      {"V", {"voltage", 1.0}},   {"Hz", {"frequency", 2 * constants::pi}},
      {"kHz", {"frequency", 2e3 * constants::pi}},            {"MHz", {"frequency", 2e6 * constants::pi}},
      {"ns", {"time", 1e-9}},      {"us", {"time", 1e-6}},    {"µs", {"time", 1e-6}},
      {"ms", {"time", 1e-3}},      {"s", {"time", 1.0}},      {"deg", {"angle", constants::pi / 180}},
      {"rad", {"angle", 1.0}},     {"amu", {"mass", constants::atomic_mass_unit}},
  };
  return t;
}

double unit_factor(const std::string& unit, const std::string& dimension) {
  const auto it = unit_table().find(unit);
  if (it == unit_table().end()) throw SchemaError("unknown unit '" + unit + "'");
  if (dimension != it->second.dimension)
    throw SchemaError("unit '" + unit + "' is a " + it->second.dimension + ", expected a " + dimension);
  return it->second.factor;
}

class Reader {
 public:
  Reader(std::string source, std::string base) : source_(std::move(source)), base_(std::move(base)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (n.IsDefined() && n.Mark().line >= 0) msg << ":" << n.Mark().line + 1;
    msg << ": " << what;
    throw SchemaError(msg.str());
  }

  void keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) const {
    if (!map.IsMap()) fail(map, where + ": expected a mapping");
    for (const auto& kv : map) {
      const auto k = kv.first.as<std::string>();
      if (!allowed.count(k)) fail(kv.first, "unknown key '" + k + "' in " + where);
    }
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsDefined() || !n.IsScalar()) fail(n, what + ": expected a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, what + ": '" + n.Scalar() + "' is not a number");
    }
  }

  int integer(const YAML::Node& n, const std::string& what, int lo) const {
    if (!n.IsDefined() || !n.IsScalar()) fail(n, what + ": expected an integer");
    int v = 0;
    try {
      v = n.as<int>();
    } catch (const YAML::Exception&) {
      fail(n, what + ": '" + n.Scalar() + "' is not an integer");
    }
    if (v < lo) fail(n, what + " must be at least " + std::to_string(lo));
    return v;
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsDefined() || !n.IsScalar()) fail(n, what + ": expected a string");
    return n.Scalar();
  }

  // "150 V" or {value: 150, unit: V}
  double quantity(const YAML::Node& n, const std::string& what, const std::string& dim) const {
    try {
      if (n.IsMap()) {
        keys(n, {"value", "unit"}, what);
        return number(n["value"], what) * unit_factor(text(n["unit"], what + ".unit"), dim);
      }
      if (!n.IsDefined()) fail(n, what + ": missing");
      return parse_quantity(text(n, what), dim);
    } catch (const SchemaError& e) {
      if (std::string(e.what()).rfind(source_, 0) == 0) throw;
      fail(n, what + ": " + e.what());
    }
  }

  double positive(const YAML::Node& n, const std::string& what, const std::string& dim) const {
    const double v = quantity(n, what, dim);
    if (!(v > 0.0)) fail(n, what + " must be positive");
    return v;
  }

  Vec3 vector(const YAML::Node& n, const std::string& what, const std::string& dim) const {
    keys(n, {"value", "unit"}, what);
    const auto& v = n["value"];
    if (!v.IsSequence() || v.size() != 3) fail(v, what + ".value: expected [x, y, z]");
    double f = 0;
    try {
      f = unit_factor(text(n["unit"], what + ".unit"), dim);
    } catch (const SchemaError& e) {
      if (std::string(e.what()).rfind(source_, 0) == 0) throw;
      fail(n["unit"], what + ": " + e.what());
    }
    return Vec3(number(v[0], what), number(v[1], what), number(v[2], what)) * f;
  }

  // {from: 10 MHz, to: 150 MHz, count: 141}
  std::vector<double> range(const YAML::Node& n, const std::string& what, const std::string& dim) const {
    keys(n, {"from", "to", "count"}, what);
    const double a = quantity(n["from"], what + ".from", dim);
    const double b = quantity(n["to"], what + ".to", dim);
    const int c = integer(n["count"], what + ".count", 1);
    if (c == 1 && a != b) fail(n, what + ": count 1 needs from == to");
    std::vector<double> out;
    for (int i = 0; i < c; ++i) out.push_back(c == 1 ? a : a + (b - a) * i / (c - 1));
    return out;
  }

  IonSpecies species(const YAML::Node& n) const {
    if (!n.IsDefined()) fail(n, "species: missing");
    try {
      if (n.IsScalar()) return species_lookup(n.Scalar());
      keys(n, {"name", "mass", "charge"}, "species");
      const double m = quantity(n["mass"], "species.mass", "mass") / constants::atomic_mass_unit;
      const int z = n["charge"] ? integer(n["charge"], "species.charge", -100) : 1;
      return make_species(n["name"] ? text(n["name"], "species.name") : "custom", m, z);
    } catch (const LookupError& e) {
      fail(n, e.what());
    } catch (const DomainError& e) {
      fail(n, std::string("species: ") + e.what());
    }
  }

  GeometryRef geometry(const YAML::Node& n) const {
    keys(n, {"builtin", "file", "distance", "efficiency", "panels", "null_guess"}, "geometry");
    GeometryRef g;
    if (n["builtin"].IsDefined() == n["file"].IsDefined()) fail(n, "geometry: give exactly one of builtin or file");
    if (n["builtin"]) {
      g.builtin = text(n["builtin"], "geometry.builtin");
      const auto names = builtin_geometries();
      if (std::find(names.begin(), names.end(), g.builtin) == names.end())
        fail(n["builtin"], "unknown builtin geometry '" + g.builtin + "' (ideal3d, surface5wire, fourpillar)");
    } else {
      const std::filesystem::path p(text(n["file"], "geometry.file"));
      g.file = (p.is_absolute() ? p : std::filesystem::path(base_) / p).string();
      try {
        load_geometry(g.file).validate();
      } catch (const SchemaError& e) {
        throw;
      } catch (const std::exception& e) {
        fail(n["file"], e.what());
      }
    }
    if (n["distance"]) g.distance = positive(n["distance"], "geometry.distance", "length");
    if (n["efficiency"]) {
      g.efficiency = number(n["efficiency"], "geometry.efficiency");
      if (!(g.efficiency > 0.0 && g.efficiency <= 1.0)) fail(n["efficiency"], "geometry.efficiency must lie in (0, 1]");
    }
    if (n["panels"]) {
      g.panels = static_cast<std::size_t>(integer(n["panels"], "geometry.panels", 100));
      if (g.panels > 100000) fail(n["panels"], "geometry.panels must not exceed 100000");
    }
    if (n["null_guess"]) g.null_guess = vector(n["null_guess"], "geometry.null_guess", "length");
    return g;
  }

  std::map<std::string, double> weights(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(n, what + ": expected a mapping electrode -> weight");
    std::map<std::string, double> w;
    for (const auto& kv : n) w[kv.first.as<std::string>()] = number(kv.second, what + "." + kv.first.as<std::string>());
    return w;
  }

  DriveConfig drive(const YAML::Node& n) const {
    keys(n, {"rf_frequency", "rf_amplitude", "dc_voltage", "polarity", "dc_weights"}, "drive");
    DriveConfig d;
    d.omega_rf = positive(n["rf_frequency"], "drive.rf_frequency", "frequency");
    d.u_tilde = quantity(n["rf_amplitude"], "drive.rf_amplitude", "voltage");
    if (d.u_tilde < 0.0) fail(n["rf_amplitude"], "drive.rf_amplitude must be non-negative");
    if (n["dc_voltage"]) d.u_dc = quantity(n["dc_voltage"], "drive.dc_voltage", "voltage");
    if (n["polarity"]) d.polarity = weights(n["polarity"], "drive.polarity");
    if (n["dc_weights"]) d.dc_weights = weights(n["dc_weights"], "drive.dc_weights");
    return d;
  }

  StabilityRequest stability(const YAML::Node& n) const {
    StabilityRequest s;
    if (n.IsNull()) return s;
    keys(n, {"points"}, "analyses.stability");
    if (!n["points"].IsSequence()) fail(n["points"], "analyses.stability.points: expected a list of {a, q}");
    for (const auto& p : n["points"]) {
      keys(p, {"a", "q"}, "stability point");
      MathieuParams m{number(p["a"], "a"), number(p["q"], "q")};
      try {
        m.validate();
      } catch (const DomainError& e) {
        fail(p, e.what());
      }
      s.points.push_back(m);
    }
    return s;
  }

  PseudoRequest pseudo(const YAML::Node& n) const {
    keys(n, {"lo", "hi", "counts", "fit_radius", "static_overlay"}, "analyses.pseudo");
    PseudoRequest p;
    p.lo = vector(n["lo"], "analyses.pseudo.lo", "length");
    p.hi = vector(n["hi"], "analyses.pseudo.hi", "length");
    const auto& c = n["counts"];
    if (!c.IsSequence() || c.size() != 3) fail(c, "analyses.pseudo.counts: expected [nx, ny, nz]");
    for (int a = 0; a < 3; ++a) {
      p.counts[a] = integer(c[a], "analyses.pseudo.counts", 1);
      if (p.counts[a] > 1 && !(p.hi[a] > p.lo[a])) fail(n["hi"], "analyses.pseudo: hi must exceed lo on resolved axes");
    }
    if (static_cast<double>(p.counts[0]) * p.counts[1] * p.counts[2] > 4e6) fail(c, "analyses.pseudo: more than 4e6 grid points");
    if (n["fit_radius"]) p.fit_radius = positive(n["fit_radius"], "analyses.pseudo.fit_radius", "length");
    if (n["static_overlay"]) p.static_overlay = n["static_overlay"].as<bool>();
    return p;
  }

  DynamicsRequest dynamics(const YAML::Node& n) const {
    keys(n, {"start", "velocity", "duration", "steps_per_period", "sample_every", "spectrum"}, "analyses.dynamics");
    DynamicsRequest d;
    d.start = vector(n["start"], "analyses.dynamics.start", "length");
    if (n["velocity"]) {
      keys(n["velocity"], {"value", "unit"}, "analyses.dynamics.velocity");
      if (text(n["velocity"]["unit"], "velocity.unit") != "m/s") fail(n["velocity"]["unit"], "velocity unit must be m/s");
      const auto& v = n["velocity"]["value"];
      if (!v.IsSequence() || v.size() != 3) fail(v, "analyses.dynamics.velocity.value: expected [x, y, z]");
      d.velocity = Vec3(number(v[0], "velocity"), number(v[1], "velocity"), number(v[2], "velocity"));
    }
    d.duration = positive(n["duration"], "analyses.dynamics.duration", "time");
    if (n["steps_per_period"]) d.steps_per_period = integer(n["steps_per_period"], "steps_per_period", 50);
    if (n["sample_every"]) d.sample_every = integer(n["sample_every"], "sample_every", 1);
    if (n["spectrum"]) d.spectrum = n["spectrum"].as<bool>();
    return d;
  }

  ThermoRequest thermo(const YAML::Node& n) const {
    ThermoRequest t;
    if (n.IsNull()) return t;
    keys(n, {"linewidth", "detuning", "cooling_angle", "emission_fraction", "qubit_wavelength", "beam_angle",
             "rabi_frequency", "mode_frequencies", "oscillations", "extra_mode"},
         "analyses.thermo");
    if (n["linewidth"]) {
      t.cooling.linewidth = positive(n["linewidth"], "thermo.linewidth", "frequency");
      t.cooling.detuning = -0.5 * t.cooling.linewidth;
    }
    if (n["detuning"]) t.cooling.detuning = quantity(n["detuning"], "thermo.detuning", "frequency");
    if (n["cooling_angle"]) t.cooling.angle = quantity(n["cooling_angle"], "thermo.cooling_angle", "angle");
    if (n["emission_fraction"]) t.cooling.emission_fraction = number(n["emission_fraction"], "thermo.emission_fraction");
    try {
      t.cooling.validate();
    } catch (const DomainError& e) {
      fail(n, e.what());
    }
    if (!(t.cooling.detuning < 0.0)) fail(n["detuning"], "thermo.detuning must be red (negative)");
    if (n["qubit_wavelength"]) t.qubit_wavelength = positive(n["qubit_wavelength"], "thermo.qubit_wavelength", "length");
    if (n["beam_angle"]) t.beam_angle = quantity(n["beam_angle"], "thermo.beam_angle", "angle");
    if (n["rabi_frequency"]) t.rabi0 = positive(n["rabi_frequency"], "thermo.rabi_frequency", "frequency");
    if (n["mode_frequencies"]) {
      if (!n["mode_frequencies"].IsSequence()) fail(n["mode_frequencies"], "thermo.mode_frequencies: expected a list");
      for (const auto& f : n["mode_frequencies"]) t.mode_frequencies.push_back(positive(f, "thermo.mode_frequencies", "frequency"));
    }
    if (n["oscillations"]) t.oscillations = integer(n["oscillations"], "thermo.oscillations", 1);
    if (n["extra_mode"]) {
      const auto& m = n["extra_mode"];
      keys(m, {"name", "nbar", "eta"}, "thermo.extra_mode");
      ModeCoupling c;
      c.name = m["name"] ? text(m["name"], "extra_mode.name") : "extra";
      c.state.nbar = number(m["nbar"], "extra_mode.nbar");
      c.eta = number(m["eta"], "extra_mode.eta");
      if (c.state.nbar < 0.0 || c.eta < 0.0) fail(m, "extra_mode: nbar and eta must be non-negative");
      t.extra_mode = c;
    }
    return t;
  }

  TradeoffRequest tradeoff(const YAML::Node& n) const {
    keys(n, {"surface_height", "omega_rf", "reference"}, "analyses.tradeoff");
    TradeoffRequest t;
    if (n["surface_height"]) t.surface_height = positive(n["surface_height"], "tradeoff.surface_height", "length");
    t.omega_rf = range(n["omega_rf"], "analyses.tradeoff.omega_rf", "frequency");
    for (double w : t.omega_rf)
      if (!(w > 0.0)) fail(n["omega_rf"], "tradeoff.omega_rf must be positive");
    t.reference = positive(n["reference"], "analyses.tradeoff.reference", "frequency");
    return t;
  }

  SweepRequest sweep(const YAML::Node& n) const {
    keys(n, {"rf_amplitude"}, "analyses.sweep");
    SweepRequest s;
    s.u_tilde = range(n["rf_amplitude"], "analyses.sweep.rf_amplitude", "voltage");
    for (double u : s.u_tilde)
      if (!(u > 0.0)) fail(n["rf_amplitude"], "sweep amplitudes must be positive");
    return s;
  }

  RunConfig config(const YAML::Node& root) const {
    keys(root, {"species", "geometry", "drive", "analyses", "workers", "output"}, "config");
    RunConfig c;
    c.species = species(root["species"]);
    c.geometry = geometry(root["geometry"]);
    c.drive = drive(root["drive"]);
    const auto& a = root["analyses"];
    keys(a, {"stability", "modes", "pseudo", "dynamics", "thermo", "tradeoff", "sweep"}, "analyses");
    if (a.size() == 0) fail(a, "analyses: request at least one analysis");
    if (a["stability"]) c.stability = stability(a["stability"]);
    if (a["modes"]) c.modes = true;
    if (a["pseudo"]) c.pseudo = pseudo(a["pseudo"]);
    if (a["dynamics"]) c.dynamics = dynamics(a["dynamics"]);
    if (a["thermo"]) c.thermo = thermo(a["thermo"]);
    if (a["tradeoff"]) c.tradeoff = tradeoff(a["tradeoff"]);
    if (a["sweep"]) c.sweep = sweep(a["sweep"]);
    if (c.dynamics && c.dynamics->steps_per_period < 50) fail(a["dynamics"], "steps_per_period must be >= 50");
    if (root["workers"]) c.workers = static_cast<unsigned>(integer(root["workers"], "workers", 1));
    if (root["output"]) c.output = text(root["output"], "output");
    // names in polarity / dc_weights must exist; checked against the geometry
    check_electrode_names(c, root["drive"]);
    return c;
  }

  void check_electrode_names(const RunConfig& c, const YAML::Node& drive) const {
    std::set<std::string> names;
    if (!c.geometry.file.empty()) {
      for (const auto& e : load_geometry(c.geometry.file).electrodes) names.insert(e.name);
    } else if (c.geometry.builtin == "fourpillar") {
      for (const auto& e : fourpillar_geometry().electrodes) names.insert(e.name);
    } else if (c.geometry.builtin == "ideal3d") {
      names = {"RF+", "RF-", "DCQ", "EC"};
    } else {
      names = {"RF_L", "RF_R", "DC_C", "DC_L", "DC_R"};
    }
    for (const char* key : {"polarity", "dc_weights"})
      if (drive[key])
        for (const auto& kv : drive[key])
          if (!names.count(kv.first.as<std::string>()))
            fail(kv.first, "drive." + std::string(key) + ": no electrode named '" + kv.first.as<std::string>() + "'");
  }

 private:
  std::string source_;
  std::string base_;
};

}  // namespace

double parse_quantity(const std::string& s, const std::string& dimension) {
  std::istringstream in(s);
  double v = 0;
  std::string unit, rest;
  if (!(in >> v)) throw SchemaError("'" + s + "' is not a quantity (expected e.g. '51.6 MHz')");
  if (!(in >> unit)) throw SchemaError("'" + s + "' has no unit");
  if (in >> rest) throw SchemaError("malformed quantity '" + s + "'");
  return v * unit_factor(unit, dimension);
}

RunConfig parse_run_config(const std::string& text, const std::string& source, const std::string& base) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SchemaError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw SchemaError(source + ": configuration must be a mapping");
  RunConfig c = Reader(source, base).config(root);
  c.source = source;
  c.text = text;
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path + ": cannot open configuration");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_run_config(ss.str(), path, base.empty() ? "." : base);
}

}  // namespace paultrap::cli
