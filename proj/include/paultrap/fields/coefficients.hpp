#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "paultrap/fields/basis.hpp"

namespace paultrap {

/// Local quadrupole expansion of the static and RF potentials about a point:
///   Phi_static ~ (U/2) (A x^2 + B y^2 + C z^2),
///   Phi_rf     ~ (U~/2) (A' x^2 + B' y^2 + C' z^2) cos(omega_rf t),
/// with coefficients equal to the per-volt curvatures d^2 phi / dx_i^2 along
/// the principal axes of the RF curvature tensor.
struct QuadrupoleCoefficients {
  Vec3 center = Vec3::Zero();
  std::array<Vec3, 3> axes{};       // principal RF axes, largest |A'| first
  std::array<double, 3> rf{};       // A', B', C'  (1/m^2 per volt)
  std::array<double, 3> dc{};       // static curvature along `axes`: A, B, C
  std::array<double, 3> dc_principal{};  // eigenvalues of the static tensor
  std::array<Vec3, 3> dc_axes{};
  Eigen::Matrix3d rf_hessian = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d dc_hessian = Eigen::Matrix3d::Zero();
  double rf_trace_residual = 0.0;   // |trace| / max |eigenvalue|
  double dc_trace_residual = 0.0;
  double frame_misalignment_deg = 0.0;  // static vs RF principal frames
  double step = 0.0;                    // finite-difference step used (m)
};

/// Symmetric Hessian of a scalar function by 5-point central differences.
/// The step is picked among a geometric ladder by comparing successive
/// halvings (Richardson-style) and keeping the pair that agrees best.
Eigen::Matrix3d finite_difference_hessian(const CombinedField& field, const Vec3& center,
                                          double length_scale, double* chosen_step = nullptr);

/// Quadrupole coefficients of `basis` at `center` for the given RF and static
/// weight vectors. Throws AccuracyError when the RF trace residual exceeds 1e-2.
QuadrupoleCoefficients quadrupole_coefficients(const FieldBasis& basis,
                                               std::span<const double> rf_weights,
                                               std::span<const double> dc_weights,
                                               const Vec3& center);

struct NullSearchResult {
  Vec3 position = Vec3::Zero();
  double residual_field = 0.0;  // |E_rf| per volt at the result (1/m)
  int iterations = 0;
  std::vector<Vec3> trace;
};

/// Locates the RF null (minimum of |E_rf|^2) by a damped Gauss-Newton search
/// from `guess`. Directions along which the field does not vary (the axis of
/// a linear trap) are left untouched. Throws NumericalError with the search
/// trace when it fails to converge within `max_iterations`.
NullSearchResult rf_null(const FieldBasis& basis, std::span<const double> rf_weights,
                         const Vec3& guess, int max_iterations = 100);

}  // namespace paultrap
