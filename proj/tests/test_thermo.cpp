#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "paultrap/thermo.hpp"

using namespace paultrap;

namespace {

const double kTwoPi = 2 * constants::pi;

double brute_force_signal(const QubitCoupling& c, double t) {
  // Explicit nested sum over two modes.
  const auto& a = c.modes.at(0);
  const auto& b = c.modes.at(1);
  double p = 0;
  for (std::size_t n = 0; n < 400; ++n)
    for (std::size_t m = 0; m < 400; ++m) {
      const double w = c.rabi0 * (1 - n * a.eta * a.eta - m * b.eta * b.eta);
      p += a.state.probability(n) * b.state.probability(m) * std::pow(std::sin(w * t / 2), 2);
    }
  return p;
}

QubitCoupling doppler_qubit(double f_mode, double beam_angle = 0.0) {
  const auto ca = species_lookup("Ca40");
  const double w = kTwoPi * f_mode;
  QubitCoupling c;
  c.rabi0 = kTwoPi * 185e3;
  c.modes.push_back({"radial", lamb_dicke(constants::ca_729_wavelength, ca, w, beam_angle),
                     doppler_limit_nbar(CoolingConfig{}, w)});
  return c;
}

}  // namespace

TEST_CASE("Doppler limit at the measured operating point") {
  const auto s = doppler_limit_nbar(CoolingConfig{}, kTwoPi * 21.29e6);
  CHECK(std::abs(s.nbar - 0.5) <= 0.15);
  CHECK(s.nbar == doctest::Approx(21.6 / (2 * 21.29) * 0.9).epsilon(1e-12));
}

TEST_CASE("Doppler limit scaling and geometry factor") {
  const CoolingConfig c;
  CHECK(doppler_limit_nbar(c, 2e8).nbar == doctest::Approx(doppler_limit_nbar(c, 1e8).nbar / 2).epsilon(1e-14));
  CoolingConfig axial = c;
  axial.angle = 0;
  // (cos^2 + 2/5) / (2 cos^2): 0.9 at 45 degrees, 0.7 along the beam.
  CHECK(doppler_limit_nbar(c, 1e8).nbar / doppler_limit_nbar(axial, 1e8).nbar == doctest::Approx(0.9 / 0.7));
  CoolingConfig perpendicular = c;
  perpendicular.angle = constants::pi / 2;
  CHECK_THROWS_AS(doppler_limit_nbar(perpendicular, 1e8), DomainError);
  double prev = 1e9;
  for (double f = 2; f <= 24; f += 0.5) {
    const double n = doppler_limit_nbar(c, kTwoPi * f * 1e6).nbar;
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("sideband ratio thermometry") {
  CHECK(nbar_from_sideband_ratio(0) == 0.0);
  CHECK(nbar_from_sideband_ratio(1.0 / 3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(nbar_from_sideband_ratio(1.0), DomainError);
  for (double nbar : {0.05, 0.5, 3.0}) {
    const ThermalState s{nbar};
    double red = 0, blue = 0;
    for (std::size_t n = 0; n < s.cutoff(1e-16); ++n) {
      red += s.probability(n) * n;
      blue += s.probability(n) * (n + 1);
    }
    CHECK(nbar_from_sideband_ratio(red / blue) == doctest::Approx(nbar).epsilon(1e-10));
  }
}

TEST_CASE("thermal state truncation") {
  const ThermalState s{0.5};
  double tail = 1;
  for (std::size_t n = 0; n < s.cutoff(); ++n) tail -= s.probability(n);
  CHECK(tail < 1e-8);
  CHECK(tail > 0);
}

TEST_CASE("Lamb-Dicke parameter") {
  const auto ca = species_lookup("Ca40");
  const double eta = lamb_dicke(729e-9, ca, kTwoPi * 20e6, 0);
  CHECK(std::abs(eta - 0.0217) <= 1e-4);
  CHECK(lamb_dicke(729e-9, ca, kTwoPi * 20e6, constants::pi / 2) < 1e-17);
  CHECK(lamb_dicke(729e-9, ca, 4 * kTwoPi * 20e6, 0) == doctest::Approx(eta / 2));
}

TEST_CASE("thermal Rabi signal") {
  QubitCoupling ground;
  ground.rabi0 = kTwoPi * 185e3;
  ground.modes = {{"x", 0.05, {0.0}}};
  const std::vector<double> t{0, 1e-6, 2.7e-6, 40e-6};
  const auto p = thermal_rabi_signal(ground, t);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(p[i] == doctest::Approx(std::pow(std::sin(ground.rabi0 * t[i] / 2), 2)).epsilon(1e-12));

  QubitCoupling two;
  two.rabi0 = kTwoPi * 185e3;
  two.modes = {{"x", 0.03, {0.7}}, {"z", 0.08, {4.0}}};
  for (double tt : {0.0, 3e-6, 17e-6, 60e-6})
    CHECK(thermal_rabi_signal(two, {tt}).front() == doctest::Approx(brute_force_signal(two, tt)).epsilon(1e-7));

  QubitCoupling hot = two;
  hot.modes[1].state.nbar = 50;
  CHECK_THROWS_AS(thermal_rabi_signal(hot, {1e-6}), ValidityError);
}

TEST_CASE("mean Rabi frequency equals the thermal average of Omega(n)") {
  QubitCoupling c;
  c.rabi0 = 1e6;
  c.modes = {{"x", 0.04, {1.3}}};
  double avg = 0;
  for (std::size_t n = 0; n < 2000; ++n) avg += c.modes[0].state.probability(n) * c.rabi0 * (1 - n * 0.04 * 0.04);
  CHECK(mean_rabi_frequency(c) == doctest::Approx(avg).epsilon(1e-12));
}

TEST_CASE("Rabi contrast after Doppler cooling at 21.29 MHz") {
  const auto c = doppler_qubit(21.29e6);
  const auto contrast = rabi_contrast(c, 11);
  CHECK(contrast.front() >= 0.99);
  for (std::size_t i = 1; i < contrast.size(); ++i) CHECK(contrast[i] <= contrast[i - 1] + 1e-12);
}

TEST_CASE("pi-pulse error") {
  QubitCoupling ground;
  ground.rabi0 = 1e6;
  ground.modes = {{"x", 0.05, {0.0}}};
  CHECK(pi_pulse_error(ground) == doctest::Approx(0).scale(1));
  CHECK(std::abs(pi_pulse_error(ground)) < 1e-15);

  const double eps = pi_pulse_error(doppler_qubit(20e6));
  CHECK(eps > 2e-7 / 5);
  CHECK(eps < 2e-7 * 5);

  QubitCoupling c;
  c.rabi0 = 1e6;
  c.modes = {{"x", 0.03, {0.3}}};
  double prev = 0;
  for (double n : {0.1, 0.3, 1.0, 3.0}) {
    c.modes[0].state.nbar = n;
    const double e = pi_pulse_error(c);
    CHECK(e > prev);
    prev = e;
  }
  prev = 0;
  c.modes[0].state.nbar = 0.5;
  for (double eta : {0.01, 0.02, 0.05}) {
    c.modes[0].eta = eta;
    const double e = pi_pulse_error(c);
    CHECK(e > prev);
    prev = e;
  }
}

TEST_CASE("heating rate scaling") {
  const HeatingModel m{100.0, 1e7, 1.0};
  CHECK(heating_rate_scaled(m, 1e7, 2e7) == doctest::Approx(25.0));
  const HeatingModel m2{100.0, 1e7, 1.5};
  CHECK(heating_rate_scaled(m2, 1e7, 2e7) == doctest::Approx(100.0 / std::pow(2.0, 2.5)));
  CHECK(heating_rate_scaled(m2, 1e7, 1e7) == 100.0);
}

TEST_CASE("sideband spectrum") {
  const double w = kTwoPi * 21.29e6;
  const SidebandProbe probe{w, 0.02, kTwoPi * 185e3, 20e-6};
  std::vector<double> grid;
  for (int i = -2000; i <= 2000; ++i) grid.push_back(w * 1.2 * i / 2000.0);
  const auto peak = [&](const std::vector<double>& s, double at) {
    double best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (std::abs(grid[i] - at) < 0.01 * w) best = std::max(best, s[i]);
    return best;
  };
  const auto ground = sideband_spectrum(probe, {0.0}, grid);
  CHECK(peak(ground, -w) < 1e-6 * peak(ground, w));
  CHECK(peak(ground, w) > 0.0);
  for (double nbar : {0.5, 0.1, 2.0}) {
    const auto s = sideband_spectrum(probe, {nbar}, {-w, w});
    const double R = s[0] / s[1];
    CHECK(nbar_from_sideband_ratio(R) == doctest::Approx(nbar).epsilon(1e-6));
    if (nbar == 0.5) CHECK(R == doctest::Approx(1.0 / 3).epsilon(1e-6));
    // peak positions do not move with nbar
    const auto full = sideband_spectrum(probe, {nbar}, grid);
    const auto it = std::max_element(full.begin(), full.end());
    CHECK(std::abs(grid[it - full.begin()] - w) <= 0.6 * (grid[1] - grid[0]));
  }
  CHECK_THROWS_AS(sideband_spectrum(probe, {0.5}, {0.0, 1.0}), DomainError);
}
