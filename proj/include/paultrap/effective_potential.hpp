#pragma once

// Pseudopotential maps, trap depth, harmonicity, Floquet secular modes and the
// 3D-versus-surface trade-off analysis.

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "paultrap/fields/basis.hpp"
#include "paultrap/fields/coefficients.hpp"
#include "paultrap/mathieu.hpp"

namespace paultrap {

/// No interior minimum: the map has no trap to measure.
class NoTrapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned grid of n[0] x n[1] x n[2] points starting at `origin`.
/// A count of 1 along an axis gives a 2D slice (or 1D line).
struct Grid {
  Vec3 origin = Vec3::Zero();
  Vec3 spacing = Vec3::Constant(1e-6);
  std::array<int, 3> n{1, 1, 1};

  std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec3 point(std::size_t idx) const;

  /// Grid of the given counts spanning [lo, hi] (inclusive) along each axis.
  static Grid spanning(const Vec3& lo, const Vec3& hi, std::array<int, 3> counts);
};

struct PseudopotentialMap {
  Grid grid;
  std::vector<double> values;  // J
  std::size_t min_index = 0;
  Vec3 minimum = Vec3::Zero();
  bool static_overlay = false;
};

struct MapOptions {
  bool static_overlay = false;  // add Z e Phi_static (u_dc times the DC weights)
  unsigned workers = 1;
  // Start of a descent to the local minimum reported as the trap; without it
  // the global minimum of the map is used. Needed when the field also vanishes
  // far from the electrodes inside the map.
  std::optional<Vec3> seed;
};

/// U_ps = (Z e)^2 U~^2 |sum_k w_k E_k|^2 / (4 m omega_rf^2), optionally plus
/// Z e U sum_k c_k phi_k. Throws AccuracyError if a grid point is near a surface.
PseudopotentialMap pseudopotential_map(const FieldBasis& basis, const DriveConfig& drive,
                                       const IonSpecies& species, const Grid& grid,
                                       const MapOptions& options = {});

/// Lowest barrier (eV) separating the map minimum from the grid boundary,
/// found by a priority flood from the minimum. Throws NoTrapError when the
/// minimum is on the boundary.
double trap_depth(const PseudopotentialMap& map);

struct HarmonicFit {
  Vec3 center = Vec3::Zero();     // fitted stationary point
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();  // J/m^2, zero along flat grid axes
  double residual = 0.0;          // RMS(U - U_fit) / RMS(U - U_min) over the window
  std::size_t points = 0;
};

/// Least-squares quadratic fit to the map values within `radius` of the map
/// minimum. Needs at least 3 points per non-degenerate grid axis in the window.
HarmonicFit harmonic_fit(const PseudopotentialMap& map, double radius);

/// Frequencies sqrt(lambda / m) of the fitted Hessian's eigenvalues, ascending,
/// for the axes the grid resolves (rad/s).
std::vector<double> harmonic_frequencies(const HarmonicFit& fit, const IonSpecies& species);

struct SecularModes {
  Vec3 center = Vec3::Zero();
  std::array<double, 3> frequencies{};   // rad/s, ascending
  std::array<Vec3, 3> axes{};
  std::array<MathieuParams, 3> params{};
  std::array<bool, 3> frame_flag{};      // static and RF frames differ by > 2 degrees
  double frame_misalignment_deg = 0.0;
  QuadrupoleCoefficients coefficients;
};

/// Floquet secular frequencies along the principal RF axes at the RF null
/// nearest to `guess`. Axes with a = q = 0 are unconfined and report 0.
/// Throws StabilityError listing (a_i, q_i) if any axis is unstable.
SecularModes secular_modes(const FieldBasis& basis, const DriveConfig& drive,
                           const IonSpecies& species, const Vec3& guess);

struct TrapMetrics {
  double depth_ev = 0.0;
  double harmonicity = 0.0;
  double efficiency = 0.0;  // |A'| d^2 for the applied polarity pattern
  double power = 0.0;       // W, see power_estimate
};

/// P = (U~ omega_rf C)^2 R_s / 2. Throws DomainError for negative inputs.
double power_estimate(double u_tilde, double omega_rf, double capacitance, double series_resistance);

/// One trap in the trade-off comparison, reduced to its radial RF curvature
/// per volt along the strongest axis.
struct TradeoffTrap {
  std::string name;
  double rf_curvature = 0.0;  // |A'| (1/m^2 per volt)
};

struct TradeoffRow {
  double omega_rf = 0.0;                        // rad/s
  std::optional<double> omega_3d, omega_surf;   // empty where unstable
  double q_3d = 0.0, q_surf = 0.0;
};

struct TradeoffPoint {
  std::string label;  // "P1", "P2", "P3"
  std::string trap;
  double omega_rf = 0.0, omega = 0.0, q = 0.0;
};

struct TradeoffResult {
  std::vector<TradeoffRow> curves;
  std::vector<TradeoffPoint> points;
  double same_drive_ratio = 0.0;  // P3 / P1
  double same_q_ratio = 0.0;      // P2 / P1
  double power_ratio = 0.0;       // surface / 3D at equal (omega, q)
};

/// Secular frequency versus drive frequency at fixed U~ for a 3D and a surface
/// trap (a = 0). P1 is the surface trap at `reference_omega_rf`, P3 the 3D trap
/// at the same drive and P2 the 3D trap at the drive that reproduces P1's q.
TradeoffResult tradeoff_sweep(const TradeoffTrap& trap_3d, const TradeoffTrap& surface,
                              const IonSpecies& species, double u_tilde,
                              const std::vector<double>& omega_rf, double reference_omega_rf);

/// Constant-q line: omega = beta(0, q) omega_rf / 2.
double constant_q_frequency(double q, double omega_rf);

void write_map_csv(std::ostream& out, const PseudopotentialMap& map);
void write_tradeoff_csv(std::ostream& out, const TradeoffResult& result);
void write_tradeoff_points_csv(std::ostream& out, const TradeoffResult& result);

}  // namespace paultrap
