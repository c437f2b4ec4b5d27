#pragma once

// Constant-strength collocation boundary-element solver for the exterior
// Laplace problem of a set of conductors in free space.
//
// Each panel j carries a uniform surface charge sigma_j. With collocation at
// the panel centroids c_i the unit-voltage solves read
//
//     sum_j P_ij sigma_j = V_i,     P_ij = 1/(4 pi eps0) \int_panel_j dA' / |c_i - r'|
//
// Near and self terms use the closed-form integral of 1/R over a planar
// polygon; far terms use 4x4 Gauss quadrature evaluated with the SIMD
// point-source kernels.

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "paultrap/fields/basis.hpp"
#include "paultrap/fields/geometry.hpp"

namespace paultrap {

/// Precomputed geometry of one flat panel.
struct PanelGeometry {
  std::array<Vec3, 4> vertices{};
  int vertex_count = 0;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  double area = 0.0;
  double diameter = 0.0;

  explicit PanelGeometry(const Panel& panel);
};

/// \int_panel dA' / |r - r'| (metres), exact for any r.
double panel_integral(const PanelGeometry& panel, const Vec3& r);

/// grad_r of panel_integral (dimensionless).
Vec3 panel_integral_gradient(const PanelGeometry& panel, const Vec3& r);

inline constexpr int kQuadraturePoints = 16;

/// Gauss points (x, y, z, weight) whose weights sum to the panel area.
std::array<std::array<double, 4>, kQuadraturePoints> panel_quadrature(const PanelGeometry& panel);

struct BemOptions {
  std::size_t dense_limit = 10000;  // above this, matrix-free BiCGSTAB
  double iterative_tolerance = 1e-10;
  int max_iterations = 1000;
  unsigned workers = 1;             // assembly threads
  double near_factor = 4.0;         // exact integration within near_factor * panel diameter
};

class BemBasis final : public FieldBasis {
 public:
  using FieldBasis::field;
  using FieldBasis::potential;

  BemBasis(std::vector<MeshedPanel> panels, std::vector<ElectrodeInfo> electrodes,
           double length_scale, std::string name, const BemOptions& options);

  std::size_t size() const override { return electrodes_.size(); }
  const ElectrodeInfo& electrode(std::size_t k) const override { return electrodes_.at(k); }
  double potential(std::size_t k, const Vec3& r) const override;
  Vec3 field(std::size_t k, const Vec3& r) const override;
  std::unique_ptr<CombinedField> combine(std::span<const double> weights) const override;
  /// Within one panel diameter of some panel centroid.
  bool near_surface(const Vec3& r) const override;
  double length_scale() const override { return scale_; }
  Provenance provenance() const override;

  std::size_t panel_count() const { return geometry_.size(); }
  const std::vector<PanelGeometry>& panels() const { return geometry_; }
  const std::vector<std::size_t>& panel_electrodes() const { return owner_; }

  /// Surface charge density for electrode k at 1 V, others grounded (C/m^2).
  Eigen::VectorXd charge_density(std::size_t k) const;

  /// C(i, j): charge on electrode i with electrode j at 1 V and all others grounded (F).
  Eigen::MatrixXd capacitance_matrix() const;

  /// Total induced charge with electrode k at 1 V (C).
  double total_charge(std::size_t k) const;

  // Evaluation of sum_j s_j \int_j dA/|r - r'| for scaled densities s (V/m).
  double evaluate_potential(const Eigen::VectorXd& scaled_density, const std::vector<double>& cloud_w,
                            const Vec3& r) const;
  Vec3 evaluate_field(const Eigen::VectorXd& scaled_density, const std::vector<double>& cloud_w,
                      const Vec3& r) const;
  std::vector<double> cloud_weights(const Eigen::VectorXd& scaled_density) const;

 private:
  void assemble_and_solve();
  std::vector<std::size_t> near_panels(const Vec3& r) const;

  std::vector<PanelGeometry> geometry_;
  std::vector<std::size_t> owner_;
  std::vector<ElectrodeInfo> electrodes_;
  double scale_;
  std::string name_;
  BemOptions options_;

  // Quadrature cloud, kQuadraturePoints per panel, contiguous per panel.
  std::vector<double> qx_, qy_, qz_, qw_;

  // scaled_(j, k) = sigma_j / (4 pi eps0) for electrode k at 1 V.
  Eigen::MatrixXd scaled_;
  std::vector<std::vector<double>> unit_cloud_;  // cloud weights per electrode
  double rcond_ = 0.0;
  std::string method_;
};

/// Meshes `system` near `target_panels` panels and solves for every electrode.
/// Throws DomainError for targets outside [100, 1e5] and NumericalError when
/// the collocation system is singular.
std::shared_ptr<const BemBasis> solve_bem(const ElectrodeSystem& system, std::size_t target_panels,
                                          const BemOptions& options = {});

}  // namespace paultrap
