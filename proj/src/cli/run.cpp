#include "paultrap/cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "paultrap/csv.hpp"
#include "paultrap/effective_potential.hpp"
#include "paultrap/fields/analytic.hpp"
#include "paultrap/fields/geometry_io.hpp"

namespace paultrap::cli {

namespace {

const double nan = std::numeric_limits<double>::quiet_NaN();

std::string um(const Vec3& r) {
  return "(" + format_number(r.x() * 1e6) + ", " + format_number(r.y() * 1e6) + ", " + format_number(r.z() * 1e6) + ") um";
}

struct AxisParams {
  std::array<MathieuParams, 3> params{};
  QuadrupoleCoefficients coefficients;
};

AxisParams axis_params(const FieldBasis& basis, const DriveConfig& drive, const IonSpecies& species,
                       const Vec3& null) {
  const auto rf = rf_weights(basis, drive);
  const auto dc = dc_weights(basis, drive);
  AxisParams p;
  p.coefficients = quadrupole_coefficients(basis, rf, dc, null);
  // finite-difference noise on an unconfined axis is not a curvature
  auto& c = p.coefficients;
  double rf_max = 0.0, dc_max = 0.0;
  for (int i = 0; i < 3; ++i) {
    rf_max = std::max(rf_max, std::abs(c.rf[i]));
    dc_max = std::max(dc_max, std::abs(c.dc[i]));
  }
  for (int i = 0; i < 3; ++i) {
    if (std::abs(c.rf[i]) < 1e-6 * rf_max) c.rf[i] = 0.0;
    if (std::abs(c.dc[i]) < 1e-6 * dc_max) c.dc[i] = 0.0;
    p.params[i] = params_from_coefficients(species, drive, c.dc[i], c.rf[i]);
  }
  return p;
}

bool confined(const MathieuParams& m) { return m.a != 0.0 || m.q != 0.0; }

double omega_or_nan(const MathieuParams& m, double omega_rf) {
  const auto f = characteristic_exponent(m);
  return f.stable ? f.beta * omega_rf / 2.0 : nan;
}

}  // namespace

FieldBasisPtr make_basis(const GeometryRef& g, unsigned workers) {
  BemOptions bem;
  bem.workers = workers;
  if (!g.file.empty()) return solve_bem(load_geometry(g.file), g.panels, bem);
  if (g.builtin == "ideal3d") return ideal_quadrupole_basis(g.distance, g.efficiency);
  BuiltinOptions o;
  o.distance = g.distance;
  o.bem_panels = g.panels;
  o.bem = bem;
  return builtin_basis(g.builtin, o);
}

Vec3 null_guess(const GeometryRef& g) {
  if (g.null_guess) return *g.null_guess;
  if (!g.builtin.empty()) {
    BuiltinOptions o;
    o.distance = g.distance;
    return builtin_null_guess(g.builtin, o);
  }
  return Vec3::Zero();
}

ReportBundle run(const RunConfig& c) {
  ReportBundle b;
  b.provenance_text = c.text;
  b.inputs.push_back("config: " + c.source);
  b.inputs.push_back("species: " + c.species.name + " (" + format_number(c.species.mass_amu()) + " amu, Z = " +
                     std::to_string(c.species.charge_number) + ")");
  b.inputs.push_back("geometry: " + (c.geometry.file.empty() ? "builtin " + c.geometry.builtin : c.geometry.file));
  if (c.geometry.builtin == "ideal3d" || c.geometry.builtin == "surface5wire")
    b.inputs.push_back("distance: " + format_number(c.geometry.distance * 1e6) + " um");
  if (c.geometry.builtin == "ideal3d") b.inputs.push_back("efficiency: " + format_number(c.geometry.efficiency));
  if (c.geometry.builtin == "fourpillar" || !c.geometry.file.empty())
    b.inputs.push_back("bem panels: " + std::to_string(c.geometry.panels));
  b.inputs.push_back("rf frequency: " + format_number(angular_to_mhz(c.drive.omega_rf)) + " MHz");
  b.inputs.push_back("rf amplitude: " + format_number(c.drive.u_tilde) + " V");
  b.inputs.push_back("dc voltage: " + format_number(c.drive.u_dc) + " V");
  for (const auto& [k, v] : c.drive.polarity) b.inputs.push_back("polarity " + k + ": " + format_number(v));
  for (const auto& [k, v] : c.drive.dc_weights) b.inputs.push_back("dc weight " + k + ": " + format_number(v));
  b.inputs.push_back("workers: " + std::to_string(c.workers));

  // Explicit Mathieu points need no geometry.
  const bool need_geometry = c.modes || (c.stability && c.stability->points.empty()) || c.pseudo ||
                             c.dynamics || (c.thermo && c.thermo->mode_frequencies.empty()) || c.tradeoff ||
                             c.sweep;
  FieldBasisPtr basis;
  Vec3 null = Vec3::Zero();
  if (need_geometry) {
    basis = make_basis(c.geometry, c.workers);
    const auto nr = rf_null(*basis, rf_weights(*basis, c.drive), null_guess(c.geometry));
    null = nr.position;
    const auto prov = basis->provenance();
    b.results.push_back("field basis: " + prov.kind + ", " + prov.description);
    b.results.push_back("rf null: " + um(null) + ", residual field " + format_number(nr.residual_field) + " 1/m");
  }

  if (c.stability) {
    std::ostringstream out;
    CsvWriter w(out, {"a", "q", "beta", "omega_MHz"});
    std::vector<MathieuParams> pts = c.stability->points;
    if (pts.empty()) {
      for (const auto& m : axis_params(*basis, c.drive, c.species, null).params)
        if (confined(m)) pts.push_back(m);
    }
    for (const auto& m : pts) {
      const auto f = characteristic_exponent(m);
      w.row({m.a, m.q, f.stable ? f.beta : nan, f.stable ? angular_to_mhz(f.beta * c.drive.omega_rf / 2) : nan});
      b.results.push_back("stability a = " + format_number(m.a) + ", q = " + format_number(m.q) + ": " +
                          (f.stable ? "stable, beta = " + format_number(f.beta) : "unstable"));
    }
    b.files["stability.csv"] = out.str();
  }

  std::optional<SecularModes> modes;
  if (c.modes || (c.thermo && c.thermo->mode_frequencies.empty())) {
    modes = secular_modes(*basis, c.drive, c.species, null);
    std::ostringstream out;
    CsvWriter w(out, {"mode", "axis_x", "axis_y", "axis_z", "a", "q", "omega_MHz", "frame_flag"});
    for (int i = 0; i < 3; ++i) {
      const Vec3& ax = modes->axes[i];
      w.row({static_cast<long long>(i + 1), ax.x(), ax.y(), ax.z(), modes->params[i].a, modes->params[i].q,
             angular_to_mhz(modes->frequencies[i]), static_cast<long long>(modes->frame_flag[i])});
      b.results.push_back("mode " + std::to_string(i + 1) + ": " + format_number(angular_to_mhz(modes->frequencies[i])) +
                          " MHz (a = " + format_number(modes->params[i].a) + ", q = " + format_number(modes->params[i].q) + ")");
    }
    b.results.push_back("rf trace residual: " + format_number(modes->coefficients.rf_trace_residual));
    if (modes->frame_misalignment_deg > 2.0)
      b.results.push_back("warning: static and rf principal frames differ by " +
                          format_number(modes->frame_misalignment_deg) + " deg");
    if (c.modes) b.files["modes.csv"] = out.str();
  }

  if (c.pseudo) {
    const auto& p = *c.pseudo;
    MapOptions mo;
    mo.static_overlay = p.static_overlay;
    mo.workers = c.workers;
    mo.seed = null;
    const auto map = pseudopotential_map(*basis, c.drive, c.species, Grid::spanning(p.lo, p.hi, p.counts), mo);
    const double d = basis->length_scale();
    const double depth = trap_depth(map);
    const auto fit = harmonic_fit(map, p.fit_radius > 0.0 ? p.fit_radius : 0.2 * d);
    const auto ap = axis_params(*basis, c.drive, c.species, null);
    const double eff = std::abs(ap.coefficients.rf[0]) * d * d;
    std::ostringstream m, s;
    write_map_csv(m, map);
    CsvWriter w(s, {"depth_eV", "harmonic_residual", "efficiency", "min_x_um", "min_y_um", "min_z_um"});
    w.row({depth, fit.residual, eff, map.minimum.x() * 1e6, map.minimum.y() * 1e6, map.minimum.z() * 1e6});
    b.files["pseudo_map.csv"] = m.str();
    b.files["pseudo_metrics.csv"] = s.str();
    b.results.push_back("trap depth: " + format_number(depth) + " eV (barrier to the map boundary)");
    b.results.push_back("harmonic residual: " + format_number(fit.residual));
    b.results.push_back("efficiency |A'| d^2: " + format_number(eff));
  }

  if (c.dynamics) {
    const auto& dy = *c.dynamics;
    const double period = 2.0 * constants::pi / c.drive.omega_rf;
    IntegrateOptions io;
    io.null = null;
    io.sample_every = dy.sample_every;
    const auto tr = integrate(*basis, c.drive, c.species, null + dy.start, dy.velocity, dy.duration,
                              period / dy.steps_per_period, io);
    std::ostringstream t;
    write_trajectory_csv(t, tr);
    b.files["trajectory.csv"] = t.str();
    if (tr.escaped) {
      b.results.push_back("dynamics: ion escaped after " + format_number(*tr.escape_time * 1e6) + " us");
    } else if (dy.spectrum) {
      const auto s = spectral_peaks(tr);
      std::ostringstream sp;
      write_spectrum_csv(sp, s);
      b.files["spectrum.csv"] = sp.str();
      const auto mm = micromotion_amplitude(tr, c.drive.omega_rf);
      b.results.push_back("dominant secular peak: " + format_number(mm.secular_frequency * 1e-6) + " MHz on axis " +
                          std::to_string(mm.axis));
      b.results.push_back("micromotion sideband ratio: " + format_number(mm.ratio));
    }
  }

  if (c.thermo) {
    const auto& th = *c.thermo;
    std::vector<double> freqs = th.mode_frequencies;
    if (freqs.empty())
      for (double f : modes->frequencies)
        if (f > 0.0) freqs.push_back(f);
    QubitCoupling q;
    q.rabi0 = th.rabi0;
    std::ostringstream mo;
    CsvWriter w(mo, {"mode", "omega_MHz", "nbar", "eta"});
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      const auto st = doppler_limit_nbar(th.cooling, freqs[i]);
      const double eta = lamb_dicke(th.qubit_wavelength, c.species, freqs[i], th.beam_angle);
      q.modes.push_back({"mode" + std::to_string(i + 1), eta, st});
      w.row({"mode" + std::to_string(i + 1), angular_to_mhz(freqs[i]), st.nbar, eta});
    }
    if (th.extra_mode) {
      q.modes.push_back(*th.extra_mode);
      w.row({th.extra_mode->name, nan, th.extra_mode->state.nbar, th.extra_mode->eta});
    }
    b.files["thermo_modes.csv"] = mo.str();
    const double wbar = mean_rabi_frequency(q);
    const double err = pi_pulse_error(q);
    const auto contrast = rabi_contrast(q, th.oscillations);
    std::vector<double> times;
    const int per = 100;
    for (int k = 0; k <= th.oscillations * per; ++k) times.push_back(2.0 * constants::pi / wbar * k / per);
    std::ostringstream r, g;
    write_rabi_csv(r, times, thermal_rabi_signal(q, times));
    b.files["rabi.csv"] = r.str();
    CsvWriter gw(g, {"rabi_MHz", "mean_rabi_MHz", "pi_error", "contrast_first", "contrast_last"});
    gw.row({angular_to_mhz(q.rabi0), angular_to_mhz(wbar), err, contrast.front(), contrast.back()});
    b.files["thermo_gate.csv"] = g.str();
    b.results.push_back("pi-pulse error: " + format_number(err));
    b.results.push_back("rabi contrast: " + format_number(contrast.front()) + " -> " + format_number(contrast.back()));
  }

  if (c.tradeoff) {
    const auto& t = *c.tradeoff;
    const auto ap = axis_params(*basis, c.drive, c.species, null);
    const auto design = design_five_wire(t.surface_height);
    const TradeoffTrap t3{"3d", std::abs(ap.coefficients.rf[0])};
    const TradeoffTrap ts{"surface", design.efficiency / (design.height * design.height)};
    const auto res = tradeoff_sweep(t3, ts, c.species, c.drive.u_tilde, t.omega_rf, t.reference);
    std::ostringstream cu, pt;
    write_tradeoff_csv(cu, res);
    write_tradeoff_points_csv(pt, res);
    b.files["tradeoff.csv"] = cu.str();
    b.files["tradeoff_points.csv"] = pt.str();
    b.results.push_back("surface rails: inner " + format_number(design.rail_inner * 1e6) + " um, outer " +
                        format_number(design.rail_outer * 1e6) + " um, efficiency " + format_number(design.efficiency));
    b.results.push_back("same-drive ratio P3/P1: " + format_number(res.same_drive_ratio));
    b.results.push_back("same-q ratio P2/P1: " + format_number(res.same_q_ratio));
    b.results.push_back("power ratio surface/3d: " + format_number(res.power_ratio));
  }

  if (c.sweep) {
    const auto ap = axis_params(*basis, c.drive, c.species, null);
    std::ostringstream out;
    CsvWriter w(out, {"u_rf_V", "q_1", "omega_1_MHz", "q_2", "omega_2_MHz", "q_3", "omega_3_MHz"});
    for (double u : c.sweep->u_tilde) {
      DriveConfig d = c.drive;
      d.u_tilde = u;
      std::array<double, 6> v{};
      for (int i = 0; i < 3; ++i) {
        const auto m = params_from_coefficients(c.species, d, ap.coefficients.dc[i], ap.coefficients.rf[i]);
        v[2 * i] = m.q;
        v[2 * i + 1] = confined(m) ? angular_to_mhz(omega_or_nan(m, d.omega_rf)) : 0.0;
      }
      w.row({u, v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    b.files["sweep.csv"] = out.str();
    b.results.push_back("sweep: " + std::to_string(c.sweep->u_tilde.size()) + " rf amplitudes");
  }
  return b;
}

}  // namespace paultrap::cli
