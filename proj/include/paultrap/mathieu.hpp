#pragma once

// Floquet analysis of the Mathieu equation
//
//     x'' + (a - 2 q cos 2xi) x = 0,       xi = omega_rf t / 2,
//
// by integrating two independent solutions over one period xi in [0, pi] and
// reading stability and the characteristic exponent off the trace of the
// resulting 2x2 monodromy matrix.

#include <array>
#include <string_view>

#include "paultrap/model.hpp"

namespace paultrap {

struct MathieuParams {
  double a = 0.0;
  double q = 0.0;  // signed; the spectrum only depends on |q|

  /// Throws DomainError for non-finite values or |a|, |q| >= 10.
  void validate() const;
};

struct FloquetResult {
  static constexpr std::string_view time_convention = "xi = omega_rf * t / 2, period pi";

  double beta = 0.0;             // in (0, 1) when stable, 0 otherwise
  bool stable = false;           // |trace| < 2
  double monodromy_trace = 0.0;
  std::array<double, 4> monodromy{};  // row-major [[x1, x2], [x1', x2']] at xi = pi
  int steps = 0;                 // accepted integrator steps (both solutions)
};

/// Exact characteristic exponent via the monodromy matrix. `tolerance` is the
/// relative accuracy requested for the trace, in [1e-12, 1e-3].
FloquetResult characteristic_exponent(const MathieuParams& p, double tolerance = 1e-10);

/// beta ~ sqrt(a + q^2 / 2); throws DomainError when the radicand is negative.
double lowest_order_beta(const MathieuParams& p);

/// Upper q edge (beta -> 1) of the first stability region at fixed a, |a| < 1.
/// The returned value is accurate to well below 1e-4.
double stability_boundary_q(double a);

/// Secular angular frequency beta * omega_rf / 2; throws StabilityError when unstable.
double secular_frequency(const MathieuParams& p, double omega_rf, double tolerance = 1e-10);

/// a = 4 Z|e| U A / (m omega_rf^2), q = -2 Z|e| U~ A' / (m omega_rf^2), with
/// A and A' the per-volt curvatures d^2 phi / dx^2 along one principal axis.
MathieuParams params_from_coefficients(const IonSpecies& species, const DriveConfig& drive,
                                       double A, double A_prime);

}  // namespace paultrap
