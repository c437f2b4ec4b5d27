#pragma once

// Physical constants, ion species, drive configuration and the units policy
// shared by every other part of the library. Everything inside the library is
// SI; config files speak micrometres, volts, MHz (ordinary frequency) and amu.

#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace paultrap {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integrator or solver breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested quantity needs a stable Mathieu solution and there is none.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result would fall outside the accuracy envelope of the field model.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or geometry input.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown species name.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// ---------------------------------------------------------------------------
// Constants (CODATA 2018)
// ---------------------------------------------------------------------------

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double epsilon0 = 8.8541878128e-12;          // F/m
inline constexpr double electron_volt = elementary_charge;    // J
}  // namespace constants

// ---------------------------------------------------------------------------
// Species
// ---------------------------------------------------------------------------

struct IonSpecies {
  std::string name;
  double mass = 0.0;       // kg
  int charge_number = 1;   // Z

  double charge() const { return charge_number * constants::elementary_charge; }
  double abs_charge() const {
    return (charge_number < 0 ? -charge_number : charge_number) *
           constants::elementary_charge;
  }
  double mass_amu() const { return mass / constants::atomic_mass_unit; }
};

/// Builds a species from an explicit mass; throws DomainError on mass <= 0 or Z == 0.
IonSpecies make_species(std::string name, double mass_amu, int charge_number);

/// Looks up a built-in species ("Ca40", "Be9", ...). The charge number
/// defaults to 1 and does not influence the mass.
IonSpecies species_lookup(std::string_view name, int charge_number = 1);

/// Names in the built-in table, sorted.
std::vector<std::string> known_species();

// ---------------------------------------------------------------------------
// Drive
// ---------------------------------------------------------------------------

/// RF and static drive applied to an electrode system.
///
/// `u_tilde` is the zero-to-peak RF amplitude applied to each RF electrode.
/// The RF potential is Phi_rf(r, t) = u_tilde cos(omega_rf t) sum_k polarity_k phi_k(r),
/// so a differential four-electrode drive is polarity +1 / -1, never a
/// doubled amplitude. The static potential is
/// Phi_static(r) = u_dc sum_k dc_weights_k phi_k(r).
struct DriveConfig {
  double omega_rf = 0.0;                   // rad/s
  double u_tilde = 0.0;                    // V
  double u_dc = 0.0;                       // V
  std::map<std::string, double> polarity;  // electrode -> +1 / -1 / 0 (any real weight accepted)
  std::map<std::string, double> dc_weights;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

enum class ConfigUnit { Micrometre, Millimetre, Volt, Megahertz, Amu };

/// Parses "um", "µm", "mm", "V", "MHz", "amu". Throws SchemaError otherwise.
ConfigUnit parse_unit(std::string_view unit);

/// Exact multiplicative conversion to SI. MHz values are ordinary
/// frequencies and come back as angular frequency 2*pi*f.
double convert_config_units(double value, ConfigUnit unit);
double convert_config_units(double value, std::string_view unit);

/// Inverse of convert_config_units.
double to_config_units(double si_value, ConfigUnit unit);

inline double mhz_to_angular(double f_mhz) { return 2.0 * constants::pi * f_mhz * 1e6; }
inline double angular_to_mhz(double omega) { return omega / (2.0 * constants::pi) / 1e6; }

}  // namespace paultrap
