#include <doctest.h>

#include <cmath>
#include <sstream>

#include "paultrap/dynamics.hpp"
#include "support.hpp"

using namespace paultrap;
using paultrap::testing::ideal_setup;

namespace {

double period(const DriveConfig& d) { return 2 * constants::pi / d.omega_rf; }

}  // namespace

TEST_CASE("zero fields give straight-line motion") {
  auto s = ideal_setup(0, 0);
  s.drive.u_tilde = 0;
  s.drive.u_dc = 0;
  const Vec3 v0(3.0, -1.0, 0.5);
  const auto tr = integrate(*s.basis, s.drive, s.species, Vec3::Zero(), v0, 50 * period(s.drive), period(s.drive) / 64);
  CHECK_FALSE(tr.escaped);
  CHECK((tr.r.back() - v0 * tr.t.back()).norm() < 1e-18);
  CHECK(tr.steps_per_period == 64);
}

TEST_CASE("time step and start-point preconditions") {
  auto s = ideal_setup(0, 0.3);
  CHECK_THROWS_AS(integrate(*s.basis, s.drive, s.species, Vec3::Zero(), Vec3::Zero(), 1e-6, period(s.drive) / 40),
                  DomainError);
  CHECK_THROWS_AS(integrate(*s.basis, s.drive, s.species, Vec3(100e-6, 0, 0), Vec3::Zero(), 1e-6, period(s.drive) / 64),
                  DomainError);
  // dt is rounded down to an integer number of steps per RF period.
  const auto tr = integrate(*s.basis, s.drive, s.species, Vec3::Zero(), Vec3::Zero(), 2 * period(s.drive), period(s.drive) / 60.5);
  CHECK(tr.steps_per_period == 61);
  CHECK(tr.dt * 61 == doctest::Approx(period(s.drive)));
}

TEST_CASE("secular peak matches the Floquet frequency (a=0, q=0.3)") {
  const auto s = ideal_setup(0, 0.3);
  const double f_sec = secular_frequency({0, 0.3}, s.drive.omega_rf) / (2 * constants::pi);
  const auto tr = integrate(*s.basis, s.drive, s.species, Vec3(1e-6, 0, 0), Vec3::Zero(), 250 / f_sec,
                            period(s.drive) / 64);
  const auto sp = spectral_peaks(tr);
  CHECK(sp.peaks.front().axis == 0);
  CHECK(sp.peaks.front().frequency == doctest::Approx(f_sec).epsilon(0.005));
  CHECK(std::abs(sp.peaks.front().frequency - f_sec) <= sp.rbw / 2);
}

TEST_CASE("beyond the stability edge the ion escapes within 100 RF periods") {
  const auto s = ideal_setup(0, 0.95);
  const auto tr = integrate(*s.basis, s.drive, s.species, Vec3(1e-6, 0, 0), Vec3::Zero(), 100 * period(s.drive),
                            period(s.drive) / 64);
  CHECK(tr.escaped);
  REQUIRE(tr.escape_time);
  CHECK(*tr.escape_time < 100 * period(s.drive));
}

TEST_CASE("pure sinusoid: peak within RBW/2 and calibrated amplitude") {
  Trajectory tr;
  const double f = 1.2345e6, fs = 64e6;
  for (int i = 0; i < 65536; ++i) {
    const double t = i / fs;
    tr.t.push_back(t);
    tr.r.emplace_back(2e-6 * std::sin(2 * constants::pi * f * t), 0, 0);
  }
  const auto sp = spectral_peaks(tr);
  CHECK(std::abs(sp.peaks.front().frequency - f) <= sp.rbw / 2);
  CHECK(sp.peaks.front().amplitude == doctest::Approx(2e-6).epsilon(0.02));
  SpectralOptions strict;
  strict.min_periods = 5000;
  CHECK_THROWS_AS(spectral_peaks(tr, strict), ResolutionError);
}

TEST_CASE("micromotion sidebands and amplitude ratio") {
  for (double q : {0.1, 0.2}) {
    CAPTURE(q);
    const auto s = ideal_setup(0, q);
    const double f_sec = secular_frequency({0, q}, s.drive.omega_rf) / (2 * constants::pi);
    const auto tr = integrate(*s.basis, s.drive, s.species, Vec3(2e-6, 0, 0), Vec3::Zero(), 300 / f_sec,
                              period(s.drive) / 64);
    const auto sp = spectral_peaks(tr);
    const double f_rf = s.drive.omega_rf / (2 * constants::pi);
    const auto lo = sp.peak_near(0, f_rf - f_sec), hi = sp.peak_near(0, f_rf + f_sec);
    CHECK(lo.amplitude / sp.peaks.front().amplitude == doctest::Approx(q / 4).epsilon(0.15));
    CHECK(hi.amplitude / sp.peaks.front().amplitude == doctest::Approx(q / 4).epsilon(0.15));
    const auto mm = micromotion_amplitude(tr, s.drive.omega_rf);
    CHECK(mm.ratio == doctest::Approx(q / 2).epsilon(0.1));
  }
}

TEST_CASE("micromotion ratio vanishes with q and is independent of amplitude") {
  const auto small = ideal_setup(0, 0.01);
  const double f_sec = secular_frequency({0, 0.01}, small.drive.omega_rf) / (2 * constants::pi);
  const auto tr = integrate(*small.basis, small.drive, small.species, Vec3(2e-6, 0, 0), Vec3::Zero(), 220 / f_sec,
                            period(small.drive) / 64);
  CHECK(micromotion_amplitude(tr, small.drive.omega_rf).ratio < 0.01);

  const auto s = ideal_setup(0, 0.1);
  const double fs = secular_frequency({0, 0.1}, s.drive.omega_rf) / (2 * constants::pi);
  double ratios[2];
  int i = 0;
  for (double amp : {0.5e-6, 5e-6}) {
    const auto t2 = integrate(*s.basis, s.drive, s.species, Vec3(amp, 0, 0), Vec3::Zero(), 250 / fs,
                              period(s.drive) / 64);
    ratios[i++] = micromotion_amplitude(t2, s.drive.omega_rf).ratio;
  }
  CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(1e-6));
}

TEST_CASE("escaped trajectories have no micromotion estimate") {
  const auto s = ideal_setup(0, 1.1);
  const auto tr = integrate(*s.basis, s.drive, s.species, Vec3(1e-6, 0, 0), Vec3::Zero(), 200 * period(s.drive),
                            period(s.drive) / 64);
  REQUIRE(tr.escaped);
  CHECK_THROWS_AS(micromotion_amplitude(tr, s.drive.omega_rf), StabilityError);
}

TEST_CASE("DC-split radial modes show two peaks separated by the Floquet difference") {
  const double a = 0.0018, q = 0.9;
  const auto s = ideal_setup(a, q);
  const double w = s.drive.omega_rf;
  const double fx = secular_frequency({a, q}, w) / (2 * constants::pi);
  const double fy = secular_frequency({-a, q}, w) / (2 * constants::pi);
  const auto tr = integrate(*s.basis, s.drive, s.species, Vec3(1e-6, 1e-6, 0), Vec3::Zero(), 2000 / fx,
                            period(s.drive) / 64);
  REQUIRE_FALSE(tr.escaped);
  const auto sp = spectral_peaks(tr);
  const auto px = sp.peak_near(0, fx), py = sp.peak_near(1, fy);
  CHECK(std::abs(px.frequency - py.frequency) == doctest::Approx(std::abs(fx - fy)).epsilon(0.01));
}

TEST_CASE("stroboscopic Floquet invariant is conserved") {
  // Courant-Snyder form of the one-period map is invariant for the exact
  // motion; its drift measures integrator error.
  const double q = 0.4;
  const auto s = ideal_setup(0, q);
  const auto f = characteristic_exponent({0, q});
  const auto& M = f.monodromy;
  const double mu = std::acos(f.monodromy_trace / 2), sn = std::sin(mu);
  const double alpha = (M[0] - M[3]) / (2 * sn), beta = M[1] / sn, gamma = -M[2] / sn;
  const double xi_rate = s.drive.omega_rf / 2;  // dxi/dt
  const double secular_periods = 100;
  const double fsec = f.beta * s.drive.omega_rf / (4 * constants::pi);
  IntegrateOptions opts;
  opts.sample_every = 64;
  const auto tr = integrate(*s.basis, s.drive, s.species, Vec3(1e-6, 0, 0), Vec3::Zero(), secular_periods / fsec,
                            period(s.drive) / 64, opts);
  auto invariant = [&](std::size_t i) {
    const double x = tr.r[i].x(), xp = tr.v[i].x() / xi_rate;
    return gamma * x * x + 2 * alpha * x * xp + beta * xp * xp;
  };
  const double first = invariant(0);
  double worst = 0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) worst = std::max(worst, std::abs(invariant(i) / first - 1));
  CHECK(worst < 1e-4);
}

TEST_CASE("trajectory and spectrum CSV headers") {
  const auto s = ideal_setup(0, 0.3);
  const auto tr = integrate(*s.basis, s.drive, s.species, Vec3(1e-6, 0, 0), Vec3::Zero(), 3 * period(s.drive),
                            period(s.drive) / 64);
  std::ostringstream out;
  write_trajectory_csv(out, tr);
  CHECK(out.str().rfind("t_us,x_um,y_um,z_um\n0,1,0,0\n", 0) == 0);
}
