#pragma once

// Doppler cooling limit, sideband thermometry, Lamb-Dicke factors, thermal
// carrier Rabi dynamics with Omega(n) = Omega0 (1 - sum_i n_i eta_i^2), pi-pulse
// error and heating-rate scaling.

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "paultrap/model.hpp"

namespace paultrap {

/// Input outside the validity of the Lamb-Dicke treatment.
class ValidityError : public DomainError {
 public:
  using DomainError::DomainError;
};

namespace constants {
inline constexpr double ca_397_linewidth = 2.0 * pi * 21.6e6;  // rad/s, S1/2 - P1/2
inline constexpr double ca_397_wavelength = 397e-9;             // m
inline constexpr double ca_729_wavelength = 729e-9;             // m
}  // namespace constants

struct CoolingConfig {
  double linewidth = constants::ca_397_linewidth;    // Gamma, rad/s
  double wavelength = constants::ca_397_wavelength;  // m
  double detuning = -0.5 * constants::ca_397_linewidth;  // Delta, rad/s (red < 0)
  double angle = constants::pi / 4;  // between cooling k-vector and mode axis, rad
  double emission_fraction = 0.4;    // mean squared projection of spontaneous recoil (dipole pattern)

  void validate() const;
};

struct ThermalState {
  double nbar = 0.0;

  /// p_n = nbar^n / (1 + nbar)^(n + 1).
  double probability(std::size_t n) const;
  /// Smallest N with sum_{n >= N} p_n < tail.
  std::size_t cutoff(double tail = 1e-8) const;
};

/// Geometric factor (cos^2 theta + emission_fraction) / (2 cos^2 theta):
/// absorption recoil projected on the mode, spontaneous recoil averaged over
/// the emission pattern, cooling rate proportional to cos^2 theta.
double doppler_geometry_factor(const CoolingConfig& cooling);

/// n = [Gamma / (2 omega)] [(1 + (2 Delta / Gamma)^2) / (4 |Delta| / Gamma)] G(theta).
/// Throws DomainError for theta = pi/2 (mode not cooled) or Delta >= 0.
ThermalState doppler_limit_nbar(const CoolingConfig& cooling, double omega_mode);

/// nbar = R / (1 - R); throws DomainError unless 0 <= R < 1.
double nbar_from_sideband_ratio(double ratio);

/// eta = (2 pi / lambda) cos(angle) sqrt(hbar / (2 m omega)).
double lamb_dicke(double wavelength, const IonSpecies& species, double omega_mode, double angle);

struct ModeCoupling {
  std::string name;
  double eta = 0.0;
  ThermalState state;
};

struct QubitCoupling {
  double rabi0 = 0.0;  // Omega0, rad/s
  std::vector<ModeCoupling> modes;
};

/// Occupation tail cutoff used for all thermal sums.
inline constexpr double kThermalTail = 1e-8;

/// Throws ValidityError naming the first mode with eta^2 (2 nbar + 1) >= 0.1.
void check_lamb_dicke(const QubitCoupling& coupling);

/// Carrier excitation P(t) = sum_n prod_i p(n_i) sin^2(Omega(n) t / 2), by
/// direct summation over each mode's occupation up to the 1e-8 tail.
std::vector<double> thermal_rabi_signal(const QubitCoupling& coupling, const std::vector<double>& times);

/// Omega0 (1 - sum_i nbar_i eta_i^2).
double mean_rabi_frequency(const QubitCoupling& coupling);

/// 1 - P(pi / Omega_bar), pulse calibrated to the thermal-mean Rabi frequency.
double pi_pulse_error(const QubitCoupling& coupling);

/// Peak-to-trough contrast of each Rabi oscillation: max - min of P over
/// consecutive periods 2 pi / Omega_bar, sampled `per_period` times.
std::vector<double> rabi_contrast(const QubitCoupling& coupling, int oscillations, int per_period = 400);

struct HeatingModel {
  double reference_rate = 0.0;   // quanta/s at reference_omega
  double reference_omega = 0.0;  // rad/s
  double lambda = 1.0;           // field-noise exponent, [0, 3]
};

/// rate(omega_to) = rate(omega_from) (omega_from / omega_to)^(1 + lambda).
double heating_rate_scaled(const HeatingModel& model, double omega_from, double omega_to);

struct SidebandProbe {
  double omega_mode = 0.0;  // rad/s
  double eta = 0.0;
  double rabi0 = 0.0;       // carrier Rabi frequency, rad/s
  double probe_time = 0.0;  // s
};

/// Weak-probe sideband spectrum: red line at -omega with strength eta^2 nbar,
/// blue line at +omega with strength eta^2 (nbar + 1), each with the Fourier
/// line shape of the square probe pulse. The carrier is excluded. Throws
/// DomainError if the detuning grid contains neither sideband.
std::vector<double> sideband_spectrum(const SidebandProbe& probe, const ThermalState& state,
                                      const std::vector<double>& detunings);

/// Red / blue peak ratio of the weak-probe model: nbar / (nbar + 1).
double sideband_ratio(const ThermalState& state);

void write_nbar_csv(std::ostream& out, const std::vector<double>& omega, const std::vector<double>& nbar);
void write_sideband_csv(std::ostream& out, const std::vector<double>& detuning, const std::vector<double>& p);
void write_rabi_csv(std::ostream& out, const std::vector<double>& t, const std::vector<double>& p);

}  // namespace paultrap
