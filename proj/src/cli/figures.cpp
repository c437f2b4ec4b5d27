#include "paultrap/cli/figures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "paultrap/csv.hpp"
#include "paultrap/effective_potential.hpp"
#include "paultrap/fields/builtin.hpp"
#include "paultrap/thermo.hpp"

namespace paultrap::cli {

namespace {

const double nan = std::numeric_limits<double>::quiet_NaN();
const double inf = std::numeric_limits<double>::infinity();

struct Fig2Setup {
  IonSpecies species = species_lookup("Ca40");
  double d = 100e-6;
  DriveConfig drive;
  FieldBasisPtr pillar, surface;
  SurfaceTrapDesign design;
  Vec3 pillar_null, surface_null;
  double pillar_curvature = 0.0;  // |A'| with the differential drive
};

const char* kFig2Config =
    "species: Ca40\n"
    "distance: 100 um\n"
    "rf_amplitude: 150 V\n"
    "rf_frequency: 80 MHz\n"
    "trap_3d: fourpillar, differential drive (RF+ +1, RF- -1), 3000 panels\n"
    "trap_surface: surface5wire, rails optimised for a 100 um null height\n";

Fig2Setup fig2_setup(unsigned workers) {
  Fig2Setup s;
  s.drive.omega_rf = mhz_to_angular(80.0);
  s.drive.u_tilde = 150.0;
  BuiltinOptions o;
  o.distance = s.d;
  o.bem.workers = workers;
  s.pillar = builtin_basis("fourpillar", o);
  s.design = design_five_wire(s.d);
  s.surface = five_wire_basis(s.design);
  const auto wp = rf_weights(*s.pillar, s.drive);
  s.pillar_null = rf_null(*s.pillar, wp, builtin_null_guess("fourpillar", o)).position;
  s.surface_null = rf_null(*s.surface, rf_weights(*s.surface, s.drive), builtin_null_guess("surface5wire", o)).position;
  const std::vector<double> none(s.pillar->size(), 0.0);
  s.pillar_curvature = std::abs(quadrupole_coefficients(*s.pillar, wp, none, s.pillar_null).rf[0]);
  return s;
}

void echo_config(ReportBundle& b, const std::string& target, const std::string& text) {
  b.provenance_text = "target: " + target + "\n" + text;
  b.inputs.push_back("target: " + target);
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) b.inputs.push_back(l);
}

FigureReport fig2a(unsigned workers) {
  FigureReport r;
  auto& b = r.bundle;
  echo_config(b, "fig2a", std::string(kFig2Config) +
                              "map_3d: xy plane through the null, |x|, |y| <= 70 um, 2.5 um spacing\n"
                              "map_surface: xz plane, |x| <= 150 um, 20 <= z <= 380 um, 2.5 um spacing\n"
                              "fit_radius: 20 um\n");
  const auto s = fig2_setup(workers);
  const double z0 = s.pillar_null.z();
  const Grid g3 = Grid::spanning(Vec3(-70e-6, -70e-6, z0), Vec3(70e-6, 70e-6, z0), {57, 57, 1});
  const Grid gs = Grid::spanning(Vec3(-150e-6, 0, 20e-6), Vec3(150e-6, 0, 380e-6), {121, 1, 145});

  struct Result {
    std::string name;
    double depth, residual, efficiency;
    Vec3 minimum;
  };
  std::vector<Result> res;
  for (const auto& [name, basis, grid, null, curvature] :
       {std::tuple{std::string("3d"), s.pillar, g3, s.pillar_null, s.pillar_curvature},
        std::tuple{std::string("surface"), s.surface, gs, s.surface_null,
                   s.design.efficiency / (s.design.height * s.design.height)}}) {
    MapOptions mo;
    mo.workers = workers;
    mo.seed = null;
    const auto map = pseudopotential_map(*basis, s.drive, s.species, grid, mo);
    std::ostringstream out;
    write_map_csv(out, map);
    b.files["fig2a_" + name + "_map.csv"] = out.str();
    res.push_back({name, trap_depth(map), harmonic_fit(map, 0.2 * s.d).residual, curvature * s.d * s.d, map.minimum});
  }
  std::ostringstream m;
  CsvWriter w(m, {"trap", "depth_eV", "harmonic_residual", "efficiency", "min_x_um", "min_y_um", "min_z_um"});
  for (const auto& x : res) {
    w.row({x.name, x.depth, x.residual, x.efficiency, x.minimum.x() * 1e6, x.minimum.y() * 1e6, x.minimum.z() * 1e6});
    b.results.push_back(x.name + ": depth " + format_number(x.depth) + " eV, harmonic residual " +
                        format_number(x.residual) + ", efficiency " + format_number(x.efficiency));
  }
  b.files["fig2a_metrics.csv"] = m.str();
  b.results.push_back("3d depth is the lowest value on the map boundary (the pillar aperture); "
                      "the rf null of the pillar trap is a line along z");
  r.bands.push_back({"depth ratio 3d/surface", res[0].depth / res[1].depth, 20.0, inf});
  r.bands.push_back({"harmonic residual ratio surface/3d", res[1].residual / res[0].residual, 5.0, inf});
  return r;
}

FigureReport fig2b(unsigned workers) {
  FigureReport r;
  auto& b = r.bundle;
  echo_config(b, "fig2b", std::string(kFig2Config) + "omega_rf: 10 MHz to 150 MHz, 1 MHz steps\nreference: 80 MHz\n");
  const auto s = fig2_setup(workers);
  std::vector<double> w_rf;
  for (int f = 10; f <= 150; ++f) w_rf.push_back(mhz_to_angular(f));
  const TradeoffTrap t3{"3d", s.pillar_curvature};
  const TradeoffTrap ts{"surface", s.design.efficiency / (s.design.height * s.design.height)};
  const auto res = tradeoff_sweep(t3, ts, s.species, s.drive.u_tilde, w_rf, s.drive.omega_rf);
  std::ostringstream cu, pt, cq;
  write_tradeoff_csv(cu, res);
  write_tradeoff_points_csv(pt, res);
  CsvWriter w(cq, {"q", "omega_rf_MHz", "omega_MHz"});
  for (const auto& p : res.points) {
    if (p.label == "P2") continue;  // same q as P1
    for (double wr : w_rf) w.row({p.q, angular_to_mhz(wr), angular_to_mhz(constant_q_frequency(p.q, wr))});
  }
  b.files["fig2b_curves.csv"] = cu.str();
  b.files["fig2b_points.csv"] = pt.str();
  b.files["fig2b_constant_q.csv"] = cq.str();
  b.results.push_back("3d efficiency: " + format_number(t3.rf_curvature * s.d * s.d));
  b.results.push_back("surface efficiency: " + format_number(s.design.efficiency) + " (rails " +
                      format_number(s.design.rail_inner * 1e6) + " to " + format_number(s.design.rail_outer * 1e6) + " um)");
  for (const auto& p : res.points)
    b.results.push_back(p.label + " (" + p.trap + "): omega_rf " + format_number(angular_to_mhz(p.omega_rf)) +
                        " MHz, omega " + format_number(angular_to_mhz(p.omega)) + " MHz, q " + format_number(p.q));
  r.bands.push_back({"same-drive ratio P3/P1", res.same_drive_ratio, 4.0, 6.0});
  r.bands.push_back({"same-q ratio P2/P1", res.same_q_ratio, 1.5, 2.5});
  r.bands.push_back({"power ratio surface/3d", res.power_ratio, 10.0, inf});
  return r;
}

FigureReport fig4() {
  FigureReport r;
  auto& b = r.bundle;
  echo_config(b, "fig4", "rf_frequency: 51.6 MHz\nq: 0.1 to 0.91, step 0.005\na_split: 0.0018\n");
  const double w_rf = mhz_to_angular(51.6);
  const double a = 0.0018;
  auto omega = [&](double aa, double q) {
    const auto f = characteristic_exponent({aa, q});
    return f.stable ? f.beta * w_rf / 2.0 : nan;
  };
  std::ostringstream out;
  CsvWriter w(out, {"q", "omega_MHz", "omega_lowest_order_MHz", "omega_a_plus_MHz", "omega_a_minus_MHz"});
  double dev_low = 0.0, dev_high = 0.0;
  int non_monotone = 0, branch_non_monotone = 0;
  double last_split = -inf, last_plus = -inf, last_minus = -inf, min_split = inf, q_min_split = 0.0;
  for (int i = 0; i <= 162; ++i) {
    const double q = 0.1 + 0.005 * i;
    const double ex = omega(0, q), lo = lowest_order_beta({0, q}) * w_rf / 2.0;
    const double wp = omega(a, q), wm = omega(-a, q);
    w.row({q, angular_to_mhz(ex), angular_to_mhz(lo), angular_to_mhz(wp), angular_to_mhz(wm)});
    if (!std::isnan(ex)) {
      const double dev = std::abs(lo - ex) / ex * 100.0;
      if (q >= 0.13 - 1e-12 && q <= 0.3 + 1e-12) dev_low = std::max(dev_low, dev);
      if (q >= 0.85 - 1e-12) dev_high = std::max(dev_high, dev);
    }
    if (!std::isnan(wp) && !std::isnan(wm) && q >= 0.13 - 1e-12) {
      const double split = wp - wm;
      if (split < last_split) ++non_monotone;
      if (wp < last_plus || wm < last_minus) ++branch_non_monotone;
      last_split = split;
      last_plus = wp;
      last_minus = wm;
      min_split = std::min(min_split, split);
      if (split == min_split) q_min_split = q;
    }
  }
  b.files["fig4_curve.csv"] = out.str();
  const double op = angular_to_mhz(omega(a, 0.903));
  const double q0 = stability_boundary_q(0.0), qp = stability_boundary_q(a), qm = stability_boundary_q(-a);
  b.results.push_back("omega(a = 0.0018, q = 0.903): " + format_number(op) + " MHz");
  b.results.push_back("q_max(0) = " + format_number(q0) + ", q_max(+0.0018) = " + format_number(qp) +
                      ", q_max(-0.0018) = " + format_number(qm));
  b.results.push_back("splitting minimum " + format_number(angular_to_mhz(min_split)) + " MHz at q = " +
                      format_number(q_min_split) + "; non-monotone steps of the branches: " +
                      std::to_string(branch_non_monotone));
  r.bands.push_back({"operating point omega/2pi [MHz]", op, 24.15 * 0.98, 24.15 * 1.02});
  r.bands.push_back({"q_max(a = 0)", q0, 0.906, 0.910});
  r.bands.push_back({"q_max(a = +0.0018)", qp, 0.906, 0.916});
  r.bands.push_back({"q_max(a = -0.0018)", qm, 0.906, 0.916});
  r.bands.push_back({"lowest-order deviation q in [0.13, 0.3] [%]", dev_low, 0.0, 1.0});
  r.bands.push_back({"lowest-order deviation q in [0.85, 0.91] [%]", dev_high, 10.0, inf});
  r.bands.push_back({"non-monotone steps of the a = +-0.0018 splitting", static_cast<double>(non_monotone), 0.0, 0.0});
  return r;
}

FigureReport fig5a() {
  FigureReport r;
  auto& b = r.bundle;
  echo_config(b, "fig5a",
              "linewidth: 21.6 MHz\ndetuning: -10.8 MHz\ncooling_angle: 45 deg\nemission_fraction: 0.4\n"
              "mode_frequency: 2 MHz to 24 MHz, 0.25 MHz steps\n");
  const CoolingConfig cool;
  std::vector<double> w, n;
  for (int i = 0; i <= 88; ++i) {
    w.push_back(mhz_to_angular(2.0 + 0.25 * i));
    n.push_back(doppler_limit_nbar(cool, w.back()).nbar);
  }
  std::ostringstream out;
  write_nbar_csv(out, w, n);
  b.files["fig5a_nbar.csv"] = out.str();
  const double anchor = doppler_limit_nbar(cool, mhz_to_angular(21.29)).nbar;
  // n * omega / G must be the same constant everywhere
  const double g = doppler_geometry_factor(cool);
  double lo = inf, hi = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    lo = std::min(lo, n[i] * w[i] / g);
    hi = std::max(hi, n[i] * w[i] / g);
  }
  b.results.push_back("nbar(21.29 MHz) = " + format_number(anchor));
  b.results.push_back("geometry factor G = " + format_number(g));
  r.bands.push_back({"nbar at 21.29 MHz", anchor, 0.35, 0.65});
  r.bands.push_back({"spread of nbar omega / G [%]", (hi - lo) / lo * 100.0, 0.0, 1.0});
  return r;
}

}  // namespace

bool FigureReport::pass() const {
  return std::all_of(bands.begin(), bands.end(), [](const Band& b) { return b.pass(); });
}

std::vector<std::string> reproduce_targets() { return {"fig2a", "fig2b", "fig4", "fig5a"}; }

FigureReport reproduce(std::string_view target, unsigned workers) {
  FigureReport r;
  if (target == "fig2a") r = fig2a(workers);
  else if (target == "fig2b") r = fig2b(workers);
  else if (target == "fig4") r = fig4();
  else if (target == "fig5a") r = fig5a();
  else throw SchemaError("unknown reproduce target '" + std::string(target) + "' (fig2a, fig2b, fig4, fig5a)");
  for (const auto& band : r.bands)
    r.bundle.results.push_back(std::string(band.pass() ? "PASS " : "FAIL ") + band.describe());
  return r;
}

}  // namespace paultrap::cli
