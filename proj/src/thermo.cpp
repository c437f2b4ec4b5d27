#include "paultrap/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "paultrap/csv.hpp"

namespace paultrap {

void CoolingConfig::validate() const {
  if (!(linewidth > 0.0)) throw DomainError("cooling linewidth must be positive");
  if (!(angle >= 0.0 && angle <= constants::pi / 2 + 1e-15)) throw DomainError("cooling angle must lie in [0, pi/2]");
  if (!(emission_fraction >= 0.0 && emission_fraction <= 1.0)) throw DomainError("emission fraction must lie in [0, 1]");
}

double ThermalState::probability(std::size_t n) const {
  if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
  const double r = nbar / (1.0 + nbar);
  return std::pow(r, static_cast<double>(n)) / (1.0 + nbar);
}

std::size_t ThermalState::cutoff(double tail) const {
  if (nbar < 0.0) throw DomainError("mean occupation must be non-negative");
  if (nbar == 0.0) return 1;
  // sum_{n >= N} p_n = r^N
  const double r = nbar / (1.0 + nbar);
  return static_cast<std::size_t>(std::ceil(std::log(tail) / std::log(r)));
}

double doppler_geometry_factor(const CoolingConfig& c) {
  c.validate();
  const double c2 = std::cos(c.angle) * std::cos(c.angle);
  if (c2 < 1e-12) throw DomainError("mode perpendicular to the cooling beam is not cooled");
  return (c2 + c.emission_fraction) / (2.0 * c2);
}

ThermalState doppler_limit_nbar(const CoolingConfig& c, double omega) {
  if (!(omega > 0.0)) throw DomainError("mode frequency must be positive");
  if (!(c.detuning < 0.0)) throw DomainError("Doppler cooling needs red detuning (Delta < 0)");
  const double g = doppler_geometry_factor(c);
  const double x = 2.0 * c.detuning / c.linewidth;
  const double detuning_factor = (1.0 + x * x) / (4.0 * std::abs(c.detuning) / c.linewidth);
  return {c.linewidth / (2.0 * omega) * detuning_factor * g};
}

double nbar_from_sideband_ratio(double R) {
  if (!(R >= 0.0 && R < 1.0)) throw DomainError("sideband ratio must lie in [0, 1) for a thermal state");
  return R / (1.0 - R);
}

double lamb_dicke(double wavelength, const IonSpecies& species, double omega, double angle) {
  if (!(omega > 0.0)) throw DomainError("mode frequency must be positive");
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  const double k = 2.0 * constants::pi / wavelength;
  return std::abs(k * std::cos(angle)) * std::sqrt(constants::hbar / (2.0 * species.mass * omega));
}

void check_lamb_dicke(const QubitCoupling& c) {
  if (!(c.rabi0 > 0.0)) throw DomainError("bare Rabi frequency must be positive");
  for (std::size_t i = 0; i < c.modes.size(); ++i) {
    const auto& m = c.modes[i];
    if (m.eta < 0.0 || m.state.nbar < 0.0) throw DomainError("eta and nbar must be non-negative");
    if (m.eta * m.eta * (2.0 * m.state.nbar + 1.0) >= 0.1)
      throw ValidityError("mode '" + (m.name.empty() ? std::to_string(i) : m.name) +
                          "' violates the Lamb-Dicke condition eta^2 (2 nbar + 1) < 0.1");
  }
}

double mean_rabi_frequency(const QubitCoupling& c) {
  double s = 0.0;
  for (const auto& m : c.modes) s += m.state.nbar * m.eta * m.eta;
  return c.rabi0 * (1.0 - s);
}

std::vector<double> thermal_rabi_signal(const QubitCoupling& c, const std::vector<double>& times) {
  check_lamb_dicke(c);
  // sin^2(Omega t / 2) = (1 - Re e^{i Omega t}) / 2 and Omega is linear in the
  // occupations, so the thermal sum factorises into one sum per mode.
  struct Table {
    std::vector<double> p;
    double step;  // Omega0 eta^2
  };
  std::vector<Table> tables;
  for (const auto& m : c.modes) {
    Table t;
    const std::size_t N = m.state.cutoff(kThermalTail);
    t.p.resize(N);
    for (std::size_t n = 0; n < N; ++n) t.p[n] = m.state.probability(n);
    t.step = c.rabi0 * m.eta * m.eta;
    tables.push_back(std::move(t));
  }
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    std::complex<double> z = std::polar(1.0, c.rabi0 * t);
    for (const auto& tab : tables) {
      std::complex<double> s = 0.0;
      for (std::size_t n = 0; n < tab.p.size(); ++n)
        s += tab.p[n] * std::polar(1.0, -tab.step * static_cast<double>(n) * t);
      z *= s;
    }
    out.push_back(0.5 * (1.0 - z.real()));
  }
  return out;
}

double pi_pulse_error(const QubitCoupling& c) {
  check_lamb_dicke(c);
  const double t_pi = constants::pi / mean_rabi_frequency(c);
  return 1.0 - thermal_rabi_signal(c, {t_pi}).front();
}

std::vector<double> rabi_contrast(const QubitCoupling& c, int oscillations, int per_period) {
  if (oscillations < 1 || per_period < 8) throw DomainError("need at least one oscillation and 8 samples per period");
  const double period = 2.0 * constants::pi / mean_rabi_frequency(c);
  std::vector<double> t;
  for (int k = 0; k < oscillations * per_period + 1; ++k) t.push_back(period * k / per_period);
  const auto p = thermal_rabi_signal(c, t);
  std::vector<double> out;
  for (int o = 0; o < oscillations; ++o) {
    const auto first = p.begin() + o * per_period;
    const auto [lo, hi] = std::minmax_element(first, first + per_period + 1);
    out.push_back(*hi - *lo);
  }
  return out;
}

double heating_rate_scaled(const HeatingModel& m, double from, double to) {
  if (!(from > 0.0) || !(to > 0.0)) throw DomainError("frequencies must be positive");
  if (!(m.lambda >= 0.0 && m.lambda <= 3.0)) throw DomainError("noise exponent must lie in [0, 3]");
  return m.reference_rate * std::pow(from / to, 1.0 + m.lambda);
}

namespace {

// Excitation of a two-level system driven for time T at Rabi frequency W and
// detuning d from resonance, in the weak-drive limit: (W T / 2)^2 sinc^2(d T / 2).
double weak_line(double W, double d, double T) {
  const double x = 0.5 * d * T;
  const double s = std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x;
  return 0.25 * W * W * T * T * s * s;
}

}  // namespace

std::vector<double> sideband_spectrum(const SidebandProbe& p, const ThermalState& state,
                                      const std::vector<double>& detunings) {
  if (!(p.omega_mode > 0.0) || !(p.probe_time > 0.0) || !(p.rabi0 > 0.0))
    throw DomainError("sideband probe needs positive mode frequency, Rabi frequency and probe time");
  if (detunings.empty()) throw DomainError("empty detuning grid");
  const auto [lo, hi] = std::minmax_element(detunings.begin(), detunings.end());
  const bool red = *lo <= -p.omega_mode && *hi >= -p.omega_mode;
  const bool blue = *lo <= p.omega_mode && *hi >= p.omega_mode;
  if (!red && !blue) throw DomainError("detuning grid contains neither motional sideband");
  const double n = state.nbar;
  std::vector<double> out;
  out.reserve(detunings.size());
  for (double d : detunings) {
    const double r = weak_line(p.rabi0 * p.eta, d + p.omega_mode, p.probe_time) * n;
    const double b = weak_line(p.rabi0 * p.eta, d - p.omega_mode, p.probe_time) * (n + 1.0);
    out.push_back(r + b);
  }
  return out;
}

double sideband_ratio(const ThermalState& s) { return s.nbar / (s.nbar + 1.0); }

void write_nbar_csv(std::ostream& out, const std::vector<double>& omega, const std::vector<double>& nbar) {
  CsvWriter w(out, {"omega_MHz", "nbar"});
  for (std::size_t i = 0; i < omega.size(); ++i) w.row({omega[i] / (2e6 * constants::pi), nbar[i]});
}

void write_sideband_csv(std::ostream& out, const std::vector<double>& detuning, const std::vector<double>& p) {
  CsvWriter w(out, {"delta_MHz", "P"});
  for (std::size_t i = 0; i < detuning.size(); ++i) w.row({detuning[i] / (2e6 * constants::pi), p[i]});
}

void write_rabi_csv(std::ostream& out, const std::vector<double>& t, const std::vector<double>& p) {
  CsvWriter w(out, {"t_us", "P"});
  for (std::size_t i = 0; i < t.size(); ++i) w.row({t[i] * 1e6, p[i]});
}

}  // namespace paultrap
