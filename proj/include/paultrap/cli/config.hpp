#pragma once

// Run configuration (YAML). Every physical quantity is written with its unit,
// either as "51.6 MHz" or as {value: [0, 0, 130], unit: um}. See README for
// the full schema.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paultrap/dynamics.hpp"
#include "paultrap/fields/builtin.hpp"
#include "paultrap/mathieu.hpp"
#include "paultrap/model.hpp"
#include "paultrap/thermo.hpp"

namespace paultrap::cli {

struct GeometryRef {
  std::string builtin;  // ideal3d, surface5wire, fourpillar; empty when `file` is used
  std::string file;
  double distance = 100e-6;  // m, ideal3d / surface5wire
  double efficiency = 1.0;   // ideal3d
  std::size_t panels = 3000; // BEM target for file geometries and fourpillar
  std::optional<Vec3> null_guess;
};

struct StabilityRequest {
  std::vector<MathieuParams> points;  // empty: per principal axis of the trap
};

struct PseudoRequest {
  Vec3 lo = Vec3::Zero(), hi = Vec3::Zero();
  std::array<int, 3> counts{1, 1, 1};
  double fit_radius = 0.0;  // m, 0: 0.2 d
  bool static_overlay = false;
};

struct DynamicsRequest {
  Vec3 start = Vec3::Zero();  // m, relative to the RF null
  Vec3 velocity = Vec3::Zero();
  double duration = 0.0;      // s
  int steps_per_period = 100;
  int sample_every = 1;
  bool spectrum = true;
};

struct ThermoRequest {
  CoolingConfig cooling;
  double qubit_wavelength = constants::ca_729_wavelength;
  double beam_angle = 0.0;    // qubit beam to mode axis, rad
  double rabi0 = 2.0 * constants::pi * 185e3;
  std::vector<double> mode_frequencies;  // rad/s, empty: the confined secular modes
  int oscillations = 11;
  std::optional<ModeCoupling> extra_mode;  // e.g. an uncooled axial mode
};

struct TradeoffRequest {
  double surface_height = 100e-6;
  std::vector<double> omega_rf;  // rad/s
  double reference = 0.0;        // rad/s
};

struct SweepRequest {
  std::vector<double> u_tilde;  // V
};

struct RunConfig {
  std::string source;       // file name for messages
  std::string text;         // raw config text (hashed into the provenance)
  IonSpecies species;
  GeometryRef geometry;
  DriveConfig drive;
  std::optional<StabilityRequest> stability;
  bool modes = false;
  std::optional<PseudoRequest> pseudo;
  std::optional<DynamicsRequest> dynamics;
  std::optional<ThermoRequest> thermo;
  std::optional<TradeoffRequest> tradeoff;
  std::optional<SweepRequest> sweep;
  unsigned workers = 1;
  std::string output = "results";
};

/// Parses and validates a configuration; relative geometry paths resolve
/// against `base_dir`. Throws SchemaError "source:line: message".
RunConfig parse_run_config(const std::string& yaml_text, const std::string& source = "<config>",
                           const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

/// Quantity "value unit" in SI. Units: um mm m V Hz kHz MHz ns us ms s deg rad amu.
/// Frequencies come back as angular frequency.
double parse_quantity(const std::string& text, const std::string& dimension);

}  // namespace paultrap::cli
