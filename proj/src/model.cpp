#include "paultrap/model.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace paultrap {

namespace {

struct SpeciesEntry {
  std::string_view name;
  double mass_amu;  // neutral atomic mass, AME2020
};

constexpr std::array<SpeciesEntry, 8> kSpeciesTable{{
    {"Ba138", 137.905247},
    {"Be9", 9.0121831},
    {"Ca40", 39.96259085},
    {"Ca43", 42.9587662},
    {"Mg24", 23.98504170},
    {"Sr88", 87.9056125},
    {"Yb171", 170.9363316},
    {"Yb174", 173.9388664},
}};

}  // namespace

IonSpecies make_species(std::string name, double mass_amu, int charge_number) {
  if (!std::isfinite(mass_amu) || mass_amu <= 0.0)
    throw DomainError("species mass must be positive, got " + std::to_string(mass_amu) + " amu");
  if (charge_number == 0) throw DomainError("species charge number must be non-zero");
  return IonSpecies{std::move(name), mass_amu * constants::atomic_mass_unit, charge_number};
}

IonSpecies species_lookup(std::string_view name, int charge_number) {
  for (const auto& e : kSpeciesTable)
    if (e.name == name) return make_species(std::string(name), e.mass_amu, charge_number);
  std::ostringstream msg;
  msg << "unknown species '" << name << "'; known species:";
  for (const auto& e : kSpeciesTable) msg << ' ' << e.name;
  throw LookupError(msg.str());
}

std::vector<std::string> known_species() {
  std::vector<std::string> out;
  for (const auto& e : kSpeciesTable) out.emplace_back(e.name);
  return out;
}

void DriveConfig::validate() const {
  if (!(omega_rf > 0.0) || !std::isfinite(omega_rf))
    throw DomainError("drive: omega_rf must be positive");
  if (!(u_tilde >= 0.0) || !std::isfinite(u_tilde))
    throw DomainError("drive: RF amplitude must be non-negative");
  if (!std::isfinite(u_dc)) throw DomainError("drive: static scale must be finite");
}

ConfigUnit parse_unit(std::string_view unit) {
  if (unit == "um" || unit == "µm" || unit == "micron") return ConfigUnit::Micrometre;
  if (unit == "mm") return ConfigUnit::Millimetre;
  if (unit == "V") return ConfigUnit::Volt;
  if (unit == "MHz") return ConfigUnit::Megahertz;
  if (unit == "amu" || unit == "u") return ConfigUnit::Amu;
  throw SchemaError("unsupported unit '" + std::string(unit) +
                    "' (expected one of um, mm, V, MHz, amu)");
}

double convert_config_units(double value, ConfigUnit unit) {
  switch (unit) {
    case ConfigUnit::Micrometre: return value * 1e-6;
    case ConfigUnit::Millimetre: return value * 1e-3;
    case ConfigUnit::Volt: return value;
    case ConfigUnit::Megahertz: return mhz_to_angular(value);
    case ConfigUnit::Amu: return value * constants::atomic_mass_unit;
  }
  throw SchemaError("unsupported unit");
}

double convert_config_units(double value, std::string_view unit) {
  return convert_config_units(value, parse_unit(unit));
}

double to_config_units(double si_value, ConfigUnit unit) {
  switch (unit) {
    case ConfigUnit::Micrometre: return si_value / 1e-6;
    case ConfigUnit::Millimetre: return si_value / 1e-3;
    case ConfigUnit::Volt: return si_value;
    case ConfigUnit::Megahertz: return angular_to_mhz(si_value);
    case ConfigUnit::Amu: return si_value / constants::atomic_mass_unit;
  }
  throw SchemaError("unsupported unit");
}

}  // namespace paultrap
