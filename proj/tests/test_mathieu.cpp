#include <doctest.h>

#include <cmath>
#include <numbers>

#include "paultrap/mathieu.hpp"

using namespace paultrap;

namespace {

// Classical fixed-step RK4 over one period, independent of the adaptive
// integrator under test. Returns the monodromy trace.
double rk4_trace(double a, double q, int steps) {
  const double h = std::numbers::pi / steps;
  auto f = [&](double xi, double x) { return -(a - 2 * q * std::cos(2 * xi)) * x; };
  double tr = 0.0;
  for (int ic = 0; ic < 2; ++ic) {
    double x = ic == 0 ? 1.0 : 0.0, v = ic == 0 ? 0.0 : 1.0, xi = 0.0;
    for (int s = 0; s < steps; ++s) {
      const double k1x = v, k1v = f(xi, x);
      const double k2x = v + 0.5 * h * k1v, k2v = f(xi + 0.5 * h, x + 0.5 * h * k1x);
      const double k3x = v + 0.5 * h * k2v, k3v = f(xi + 0.5 * h, x + 0.5 * h * k2x);
      const double k4x = v + h * k3v, k4v = f(xi + h, x + h * k3x);
      x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
      xi += h;
    }
    tr += ic == 0 ? x : v;
  }
  return tr;
}

double oracle_beta(double a, double q) { return std::acos(rk4_trace(a, q, 20000) / 2) / std::numbers::pi; }

}  // namespace

TEST_CASE("pure harmonic case has beta = sqrt(a)") {
  const auto r = characteristic_exponent({0.04, 0.0});
  CHECK(r.stable);
  CHECK(r.beta == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("exponent matches fine-step fixed-step oracle") {
  for (auto [a, q] : {std::pair{0.0, 0.3}, {0.0018, 0.903}, {-0.05, 0.5}, {0.1, 0.2}}) {
    const auto r = characteristic_exponent({a, q});
    CHECK(r.beta == doctest::Approx(oracle_beta(a, q)).epsilon(1e-6));
  }
}

TEST_CASE("q -> -q symmetry") {
  for (double q : {0.1, 0.4, 0.85}) {
    CHECK(characteristic_exponent({0.01, q}).beta ==
          doctest::Approx(characteristic_exponent({0.01, -q}).beta).epsilon(1e-9));
  }
}

TEST_CASE("stable iff |trace| < 2 and beta from trace") {
  for (double q = 0.05; q < 1.3; q += 0.05) {
    const auto r = characteristic_exponent({0.0, q});
    CHECK(r.stable == (std::abs(r.monodromy_trace) < 2.0));
    if (r.stable) CHECK(r.beta == doctest::Approx(std::acos(r.monodromy_trace / 2) / std::numbers::pi));
  }
}

TEST_CASE("tolerance and domain checks") {
  CHECK_THROWS_AS(characteristic_exponent({0.0, 0.3}, 1e-13), DomainError);
  CHECK_THROWS_AS(characteristic_exponent({0.0, 0.3}, 1e-2), DomainError);
  CHECK_THROWS_AS(characteristic_exponent({std::nan(""), 0.3}), DomainError);
  CHECK_THROWS_AS(characteristic_exponent({0.0, 11.0}), DomainError);
}

TEST_CASE("lowest-order beta") {
  CHECK(lowest_order_beta({0, 0.2}) == doctest::Approx(0.141421).epsilon(1e-5));
  CHECK(lowest_order_beta({0.0018, 0.13}) == doctest::Approx(0.10124).epsilon(1e-4));
  CHECK_THROWS_AS(lowest_order_beta({-0.1, 0.1}), DomainError);
}

TEST_CASE("stability boundary") {
  CHECK(stability_boundary_q(0.0) == doctest::Approx(0.908).epsilon(0.002 / 0.908));
  const double qp = stability_boundary_q(0.0018), qm = stability_boundary_q(-0.0018);
  CHECK(std::abs(qp - 0.911) <= 0.005);
  CHECK(std::abs(qm - 0.911) <= 0.005);
  CHECK(stability_boundary_q(0.5) < stability_boundary_q(0.0));
  // At the boundary the trace crosses -2.
  const double q0 = stability_boundary_q(0.0);
  CHECK(characteristic_exponent({0.0, q0 - 1e-4}).stable);
  CHECK_FALSE(characteristic_exponent({0.0, q0 + 1e-4}).stable);
  CHECK_THROWS_AS(stability_boundary_q(1.5), DomainError);
}

TEST_CASE("secular frequency") {
  const double w_rf = 2 * std::numbers::pi * 51.6e6;
  const double w = secular_frequency({0.0018, 0.903}, w_rf);
  CHECK(w / (2 * std::numbers::pi) == doctest::Approx(24.15e6).epsilon(0.02));
  CHECK(secular_frequency({0.0, 0.3}, 2 * w_rf) == doctest::Approx(2 * secular_frequency({0.0, 0.3}, w_rf)));
  const double q = 1e-3;
  CHECK(secular_frequency({0.0, q}, w_rf) == doctest::Approx(q * w_rf / (2 * std::sqrt(2.0))).epsilon(1e-6));
  CHECK_THROWS_AS(secular_frequency({0.0, 0.95}, w_rf), StabilityError);
  for (double q2 = 0.05; q2 < 0.9; q2 += 0.1) CHECK(secular_frequency({0.0, q2}, w_rf) < w_rf / 2);
}

TEST_CASE("parameters from curvature coefficients") {
  const auto ca = species_lookup("Ca40");
  DriveConfig drive;
  drive.omega_rf = 2 * std::numbers::pi * 150e6;
  drive.u_tilde = 160.0;
  const double d = 50e-6;
  const auto p = params_from_coefficients(ca, drive, 0.0, 1.0 / (d * d));
  // hand evaluation: 2 e U A' / (m w^2)
  const double oracle = 2 * 1.602176634e-19 * 160.0 / (d * d) /
                        (39.96259085 * 1.66053906660e-27 * drive.omega_rf * drive.omega_rf);
  CHECK(std::abs(p.q) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(p.q) == doctest::Approx(0.348).epsilon(0.002));
  drive.u_tilde = 0.0;
  CHECK(params_from_coefficients(ca, drive, 0.0, 1e8).q == 0.0);
  drive.u_tilde = 320.0;
  CHECK(std::abs(params_from_coefficients(ca, drive, 0.0, 1.0 / (d * d)).q) == doctest::Approx(2 * oracle));
}
