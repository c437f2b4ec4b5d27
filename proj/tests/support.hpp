#pragma once

// Shared fixtures: an ideal quadrupole driven so that the x axis sees a
// chosen Mathieu (a, q); the y axis then sees (-a, -q).

#include <cmath>

#include "paultrap/fields/analytic.hpp"
#include "paultrap/mathieu.hpp"

namespace paultrap::testing {

struct IdealSetup {
  std::shared_ptr<const IdealQuadrupoleBasis> basis;
  DriveConfig drive;
  IonSpecies species;
  double d = 100e-6;
};

inline IdealSetup ideal_setup(double a, double q, double f_rf_hz = 51.6e6, double d = 100e-6) {
  IdealSetup s;
  s.d = d;
  s.basis = ideal_quadrupole_basis(d, 1.0);
  s.species = species_lookup("Ca40");
  s.drive.omega_rf = 2 * constants::pi * f_rf_hz;
  const double m_w2 = s.species.mass * s.drive.omega_rf * s.drive.omega_rf;
  // q = -2 e U~ A' / (m w^2) with A' = 1/d^2 along x, so q > 0 needs RF+ at -1.
  s.drive.u_tilde = std::abs(q) * m_w2 * d * d / (2 * constants::elementary_charge);
  s.drive.polarity = {{"RF+", q >= 0 ? -1.0 : 1.0}, {"RF-", 0.0}};
  s.drive.u_dc = a * m_w2 * d * d / (4 * constants::elementary_charge);
  s.drive.dc_weights = {{"DCQ", 1.0}};
  return s;
}

}  // namespace paultrap::testing
