#include "paultrap/effective_potential.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "paultrap/csv.hpp"
#include "paultrap/parallel.hpp"

namespace paultrap {

std::array<int, 3> Grid::coords(std::size_t idx) const {
  const int i = static_cast<int>(idx % n[0]);
  idx /= n[0];
  const int j = static_cast<int>(idx % n[1]);
  return {i, j, static_cast<int>(idx / n[1])};
}

Vec3 Grid::point(std::size_t idx) const {
  const auto c = coords(idx);
  return origin + Vec3(c[0] * spacing.x(), c[1] * spacing.y(), c[2] * spacing.z());
}

Grid Grid::spanning(const Vec3& lo, const Vec3& hi, std::array<int, 3> counts) {
  Grid g;
  g.origin = lo;
  g.n = counts;
  for (int a = 0; a < 3; ++a) {
    if (counts[a] < 1) throw DomainError("grid counts must be positive");
    g.spacing[a] = counts[a] > 1 ? (hi[a] - lo[a]) / (counts[a] - 1) : 1.0;
  }
  return g;
}

namespace {

std::size_t nearest_index(const Grid& g, const Vec3& r) {
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const double t = g.n[a] > 1 ? (r[a] - g.origin[a]) / g.spacing[a] : 0.0;
    c[a] = std::clamp(static_cast<int>(std::lround(t)), 0, g.n[a] - 1);
  }
  return g.index(c[0], c[1], c[2]);
}

}  // namespace

PseudopotentialMap pseudopotential_map(const FieldBasis& basis, const DriveConfig& drive,
                                       const IonSpecies& species, const Grid& grid,
                                       const MapOptions& options) {
  drive.validate();
  if (grid.size() == 0) throw DomainError("empty grid");
  const auto rf = basis.combine(rf_weights(basis, drive));
  const std::vector<double> dcw = dc_weights(basis, drive);
  const bool overlay = options.static_overlay && drive.u_dc != 0.0 &&
                       std::any_of(dcw.begin(), dcw.end(), [](double w) { return w != 0.0; });
  const auto dc = overlay ? basis.combine(dcw) : nullptr;

  const double ze = species.charge();
  const double pre = ze * ze * drive.u_tilde * drive.u_tilde /
                     (4.0 * species.mass * drive.omega_rf * drive.omega_rf);

  for (std::size_t i = 0; i < grid.size(); ++i)
    if (basis.near_surface(grid.point(i))) {
      const Vec3 p = grid.point(i);
      std::ostringstream msg;
      msg << "grid point (" << p.x() * 1e6 << ", " << p.y() * 1e6 << ", " << p.z() * 1e6
          << ") um touches an electrode surface";
      throw AccuracyError(msg.str());
    }

  PseudopotentialMap map;
  map.grid = grid;
  map.static_overlay = overlay;
  map.values.resize(grid.size());
  parallel_for(grid.size(), options.workers, [&](std::size_t i) {
    const Vec3 r = grid.point(i);
    double u = pre * (drive.u_tilde == 0.0 ? 0.0 : rf->field(r).squaredNorm());
    if (dc) u += ze * drive.u_dc * dc->potential(r);
    map.values[i] = u;
  });
  if (options.seed) {
    // steepest descent over the 6-neighbourhood
    std::size_t idx = nearest_index(grid, *options.seed);
    for (;;) {
      const auto c = grid.coords(idx);
      std::size_t best = idx;
      for (int a = 0; a < 3; ++a)
        for (int s : {-1, 1}) {
          auto nb = c;
          nb[a] += s;
          if (nb[a] < 0 || nb[a] >= grid.n[a]) continue;
          const std::size_t ni = grid.index(nb[0], nb[1], nb[2]);
          if (map.values[ni] < map.values[best]) best = ni;
        }
      if (best == idx) break;
      idx = best;
    }
    map.min_index = idx;
  } else {
    map.min_index = static_cast<std::size_t>(
        std::min_element(map.values.begin(), map.values.end()) - map.values.begin());
  }
  map.minimum = grid.point(map.min_index);
  return map;
}

double trap_depth(const PseudopotentialMap& map) {
  const Grid& g = map.grid;
  auto on_boundary = [&](const std::array<int, 3>& c) {
    for (int a = 0; a < 3; ++a)
      if (g.n[a] > 1 && (c[a] == 0 || c[a] == g.n[a] - 1)) return true;
    return false;
  };
  if (on_boundary(g.coords(map.min_index)))
    throw NoTrapError("pseudopotential minimum lies on the grid boundary: no trap inside the map");

  // Priority flood: the key of a cell is the highest value on the best path to it.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<char> seen(g.size(), 0);
  open.emplace(map.values[map.min_index], map.min_index);
  seen[map.min_index] = 1;
  while (!open.empty()) {
    const auto [level, idx] = open.top();
    open.pop();
    const auto c = g.coords(idx);
    if (on_boundary(c)) return (level - map.values[map.min_index]) / constants::electron_volt;
    for (int a = 0; a < 3; ++a) {
      if (g.n[a] == 1) continue;
      for (int s : {-1, 1}) {
        auto nb = c;
        nb[a] += s;
        if (nb[a] < 0 || nb[a] >= g.n[a]) continue;
        const std::size_t ni = g.index(nb[0], nb[1], nb[2]);
        if (seen[ni]) continue;
        seen[ni] = 1;
        open.emplace(std::max(level, map.values[ni]), ni);
      }
    }
  }
  throw NoTrapError("flood fill never reached the grid boundary");
}

HarmonicFit harmonic_fit(const PseudopotentialMap& map, double radius) {
  const Grid& g = map.grid;
  std::vector<int> axes;
  for (int a = 0; a < 3; ++a)
    if (g.n[a] > 1) axes.push_back(a);
  const int D = static_cast<int>(axes.size());
  if (D == 0) throw DomainError("harmonic fit needs at least one resolved grid axis");

  std::vector<std::size_t> pts;
  for (std::size_t i = 0; i < g.size(); ++i)
    if ((g.point(i) - map.minimum).norm() <= radius) pts.push_back(i);
  const int terms = 1 + D + D * (D + 1) / 2;
  if (static_cast<int>(pts.size()) < 2 * terms)
    throw DomainError("harmonic fit window holds too few grid points; refine the grid");

  // U = c + g.x + 1/2 x^T H x in coordinates relative to the minimum, scaled by radius.
  Eigen::MatrixXd M(pts.size(), terms);
  Eigen::VectorXd u(pts.size());
  for (std::size_t r = 0; r < pts.size(); ++r) {
    const Vec3 x = (g.point(pts[r]) - map.minimum) / radius;
    int col = 0;
    M(r, col++) = 1.0;
    for (int a : axes) M(r, col++) = x[a];
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j)
        M(r, col++) = (i == j ? 0.5 : 1.0) * x[axes[i]] * x[axes[j]];
    u(r) = map.values[pts[r]];
  }
  const Eigen::VectorXd c = M.colPivHouseholderQr().solve(u);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(D, D);
  Eigen::VectorXd lin(D);
  for (int i = 0; i < D; ++i) lin(i) = c(1 + i);
  int col = 1 + D;
  for (int i = 0; i < D; ++i)
    for (int j = i; j < D; ++j) H(i, j) = H(j, i) = c(col++);

  HarmonicFit fit;
  fit.points = pts.size();
  const Eigen::VectorXd shift = H.fullPivLu().solve(-lin);
  fit.center = map.minimum;
  for (int i = 0; i < D; ++i) {
    fit.center[axes[i]] += shift(i) * radius;
    for (int j = 0; j < D; ++j) fit.hessian(axes[i], axes[j]) = H(i, j) / (radius * radius);
  }
  const Eigen::VectorXd resid = M * c - u;
  const double umin = map.values[map.min_index];
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < pts.size(); ++r) {
    num += resid(r) * resid(r);
    den += (u(r) - umin) * (u(r) - umin);
  }
  fit.residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return fit;
}

std::vector<double> harmonic_frequencies(const HarmonicFit& fit, const IonSpecies& species) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(fit.hessian);
  std::vector<double> out;
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i) {
    const double l = es.eigenvalues()(i);
    if (std::abs(l) <= 1e-12 * scale) continue;  // axis not resolved by the grid
    out.push_back(std::sqrt(std::max(l, 0.0) / species.mass));
  }
  std::sort(out.begin(), out.end());
  return out;
}

SecularModes secular_modes(const FieldBasis& basis, const DriveConfig& drive,
                           const IonSpecies& species, const Vec3& guess) {
  drive.validate();
  const auto rfw = rf_weights(basis, drive);
  const auto dcw = dc_weights(basis, drive);
  const auto null = rf_null(basis, rfw, guess);

  SecularModes m;
  m.center = null.position;
  m.coefficients = quadrupole_coefficients(basis, rfw, dcw, null.position);
  m.frame_misalignment_deg = m.coefficients.frame_misalignment_deg;

  struct Axis {
    double omega;
    Vec3 axis;
    MathieuParams p;
  };
  std::array<Axis, 3> ax;
  std::ostringstream unstable;
  const double rf_scale = std::abs(m.coefficients.rf[0]);
  for (int i = 0; i < 3; ++i) {
    // Curvatures at the level of finite-difference noise are treated as zero.
    const double Ap = std::abs(m.coefficients.rf[i]) < 1e-6 * rf_scale ? 0.0 : m.coefficients.rf[i];
    MathieuParams p = params_from_coefficients(species, drive, m.coefficients.dc[i], Ap);
    double omega = 0.0;
    if (p.a != 0.0 || p.q != 0.0) {
      p.validate();
      const auto f = characteristic_exponent(p);
      if (!f.stable) unstable << " axis " << i << ": (a=" << p.a << ", q=" << p.q << ")";
      omega = f.beta * drive.omega_rf / 2.0;
    }
    ax[i] = {omega, m.coefficients.axes[i], p};
  }
  if (!unstable.str().empty()) throw StabilityError("unstable secular motion:" + unstable.str());
  std::stable_sort(ax.begin(), ax.end(), [](const Axis& a, const Axis& b) { return a.omega < b.omega; });
  for (int i = 0; i < 3; ++i) {
    m.frequencies[i] = ax[i].omega;
    m.axes[i] = ax[i].axis;
    m.params[i] = ax[i].p;
    m.frame_flag[i] = m.frame_misalignment_deg > 2.0;
  }
  return m;
}

double power_estimate(double u_tilde, double omega_rf, double capacitance, double series_resistance) {
  if (u_tilde < 0 || omega_rf < 0 || capacitance < 0 || series_resistance < 0)
    throw DomainError("power_estimate inputs must be non-negative");
  const double i = u_tilde * omega_rf * capacitance;
  return 0.5 * i * i * series_resistance;
}

double constant_q_frequency(double q, double omega_rf) {
  return characteristic_exponent({0.0, q}).beta * omega_rf / 2.0;
}

namespace {

double q_of(const TradeoffTrap& t, const IonSpecies& s, double u, double w) {
  return 2.0 * s.abs_charge() * u * t.rf_curvature / (s.mass * w * w);
}

std::optional<double> omega_of(double q, double w) {
  if (!(q < 10.0)) return std::nullopt;
  const auto f = characteristic_exponent({0.0, q});
  if (!f.stable) return std::nullopt;
  return f.beta * w / 2.0;
}

}  // namespace

TradeoffResult tradeoff_sweep(const TradeoffTrap& t3, const TradeoffTrap& ts, const IonSpecies& species,
                              double u_tilde, const std::vector<double>& omega_rf, double w_ref) {
  if (!(t3.rf_curvature > 0.0) || !(ts.rf_curvature > 0.0))
    throw DomainError("trade-off traps need positive RF curvature");
  if (!(u_tilde > 0.0) || !(w_ref > 0.0)) throw DomainError("trade-off needs U~ > 0 and a reference drive");
  TradeoffResult r;
  for (double w : omega_rf) {
    TradeoffRow row;
    row.omega_rf = w;
    row.q_3d = q_of(t3, species, u_tilde, w);
    row.q_surf = q_of(ts, species, u_tilde, w);
    row.omega_3d = omega_of(row.q_3d, w);
    row.omega_surf = omega_of(row.q_surf, w);
    r.curves.push_back(row);
  }
  const double q1 = q_of(ts, species, u_tilde, w_ref);
  const auto w1 = omega_of(q1, w_ref);
  if (!w1) throw StabilityError("surface trap unstable at the reference drive frequency");
  const double q3 = q_of(t3, species, u_tilde, w_ref);
  const auto w3 = omega_of(q3, w_ref);
  if (!w3) throw StabilityError("3D trap unstable at the reference drive frequency (q = " + std::to_string(q3) + ")");
  const double ratio = t3.rf_curvature / ts.rf_curvature;
  const double w_rf2 = w_ref * std::sqrt(ratio);
  const double w2 = *omega_of(q1, w_rf2);
  r.points = {{"P1", ts.name, w_ref, *w1, q1}, {"P2", t3.name, w_rf2, w2, q1}, {"P3", t3.name, w_ref, *w3, q3}};
  r.same_drive_ratio = *w3 / *w1;
  r.same_q_ratio = w2 / *w1;
  // Equal (omega, q) needs the same drive frequency and U~ scaled by the
  // inverse curvature ratio; equal C and R_s leave P proportional to U~^2.
  r.power_ratio = power_estimate(u_tilde * ratio, w_rf2, 1.0, 1.0) / power_estimate(u_tilde, w_rf2, 1.0, 1.0);
  return r;
}

void write_map_csv(std::ostream& out, const PseudopotentialMap& map) {
  CsvWriter w(out, {"x_um", "y_um", "z_um", "U_ps_eV"});
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const Vec3 p = map.grid.point(i) * 1e6;
    w.row({p.x(), p.y(), p.z(), map.values[i] / constants::electron_volt});
  }
}

void write_tradeoff_csv(std::ostream& out, const TradeoffResult& r) {
  CsvWriter w(out, {"omega_rf_MHz", "omega_3d_MHz", "omega_surf_MHz", "q_3d", "q_surf"});
  const double to_mhz = 1.0 / (2e6 * constants::pi);
  for (const auto& row : r.curves)
    w.row({row.omega_rf * to_mhz, row.omega_3d ? *row.omega_3d * to_mhz : std::nan(""),
           row.omega_surf ? *row.omega_surf * to_mhz : std::nan(""), row.q_3d, row.q_surf});
}

void write_tradeoff_points_csv(std::ostream& out, const TradeoffResult& r) {
  CsvWriter w(out, {"point", "trap", "omega_rf_MHz", "omega_MHz", "q"});
  const double to_mhz = 1.0 / (2e6 * constants::pi);
  for (const auto& p : r.points) w.row({p.label, p.trap, p.omega_rf * to_mhz, p.omega * to_mhz, p.q});
}

}  // namespace paultrap
