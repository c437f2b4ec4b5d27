#include <doctest.h>

#include <cmath>
#include <random>

#include "paultrap/fields/analytic.hpp"
#include "paultrap/fields/coefficients.hpp"

using namespace paultrap;

namespace {

// Divergence of the analytic field by central differences, with the sum of
// the absolute diagonal terms as the local curvature scale.
std::pair<double, double> fd_divergence(const FieldBasis& b, std::size_t k, const Vec3& r, double h) {
  double div = 0.0, scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec3 p = r, m = r;
    p[i] += h;
    m[i] -= h;
    const double d = (b.field(k, p)[i] - b.field(k, m)[i]) / (2 * h);
    div += d;
    scale += std::abs(d);
  }
  return {div, scale};
}

Vec3 fd_field(const FieldBasis& b, std::size_t k, const Vec3& r, double h) {
  Vec3 E;
  for (int i = 0; i < 3; ++i) {
    Vec3 p = r, m = r;
    p[i] += h;
    m[i] -= h;
    E[i] = -(b.potential(k, p) - b.potential(k, m)) / (2 * h);
  }
  return E;
}

}  // namespace

TEST_CASE("ideal quadrupole curvature and null") {
  const auto b = ideal_quadrupole_basis(100e-6, 1.0);
  const std::vector<double> rf{1, 0, 0, 0}, dc{0, 0, 0, 0};
  const auto c = quadrupole_coefficients(*b, rf, dc, Vec3::Zero());
  CHECK(std::abs(c.rf[0]) == doctest::Approx(1e8).epsilon(1e-6));
  CHECK(std::abs(c.rf[1]) == doctest::Approx(1e8).epsilon(1e-6));
  CHECK(std::abs(c.rf[2]) < 1e-2);
  CHECK(c.rf[0] + c.rf[1] + c.rf[2] == doctest::Approx(0).epsilon(1e-6).scale(1e8));
  CHECK(b->field(0, Vec3::Zero()).norm() == 0.0);
  const auto null = rf_null(*b, rf, Vec3(3e-6, -2e-6, 1e-6));
  CHECK(null.position.head<2>().norm() < 1e-12);
}

TEST_CASE("ideal quadrupole default polarities drive both RF electrodes") {
  const auto b = ideal_quadrupole_basis(50e-6, 0.8);
  DriveConfig drive;
  drive.omega_rf = 1e8;
  const auto w = rf_weights(*b, drive);
  REQUIRE(w.size() == 4);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == -1.0);
  CHECK(w[2] == 0.0);
  drive.polarity["nope"] = 1;
  CHECK_THROWS_AS(rf_weights(*b, drive), DomainError);
}

TEST_CASE("stray field displaces the RF null by E0 d^2 / kappa") {
  const double d = 100e-6, kappa = 0.7, E0 = 50.0;
  auto quad = ideal_quadrupole_basis(d, kappa);
  auto stray = std::make_shared<UniformFieldBasis>("STRAY", ElectrodeRole{RoleKind::Dc, 9}, Vec3::UnitX(), d);
  CompositeBasis both({quad, stray});
  std::vector<double> w(both.size(), 0.0);
  w[0] = 1.0;
  w[4] = E0;
  const auto null = rf_null(both, w, Vec3::Zero());
  CHECK(null.position.x() == doctest::Approx(E0 * d * d / kappa).epsilon(1e-8));
  CHECK(std::abs(null.position.y()) < 1e-15);
}

TEST_CASE("planar patch: limits, symmetry, analytic field") {
  const PlaneRect big{-1.0, 1.0, -1.0, 1.0};
  CHECK(PlanarPatchBasis::rect_potential(big, Vec3(0, 0, 1e-4)) == doctest::Approx(1.0).epsilon(1e-3));
  const PlaneRect r{-50e-6, 50e-6, 20e-6, 90e-6};
  const Vec3 p(30e-6, 10e-6, 40e-6), pm(-30e-6, 10e-6, 40e-6);
  CHECK(PlanarPatchBasis::rect_potential(r, p) == doctest::Approx(PlanarPatchBasis::rect_potential(r, pm)));
  auto basis = planar_patch_basis({{"P", {RoleKind::RfPlus, 0}, {r}}}, 100e-6);
  for (const Vec3& q : {p, Vec3(1e-6, 200e-6, 5e-6), Vec3(-80e-6, -5e-6, 150e-6)}) {
    const Vec3 E = basis->field(0, q), Efd = fd_field(*basis, 0, q, 1e-8);
    CHECK((E - Efd).norm() <= 1e-6 * E.norm());
  }
  CHECK_THROWS_AS(basis->potential(0, Vec3(0, 0, 0)), DomainError);
  CHECK_THROWS_AS(planar_patch_basis({{"A", {RoleKind::RfPlus, 0}, {r}}, {"B", {RoleKind::Dc, 0}, {r}}}, 1e-4),
                  DomainError);
}

TEST_CASE("analytic bases are harmonic") {
  auto quad = ideal_quadrupole_basis(100e-6, 1.0);
  auto planar = planar_patch_basis({{"L", {RoleKind::RfPlus, 0}, {{-200e-6, -50e-6, -1e-3, 1e-3}}},
                                    {"R", {RoleKind::RfPlus, 0}, {{50e-6, 200e-6, -1e-3, 1e-3}}}},
                                   100e-6);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-60e-6, 60e-6), uz(30e-6, 200e-6);
  for (int i = 0; i < 100; ++i) {
    const Vec3 r(u(rng), u(rng), uz(rng));
    for (const FieldBasis* b : {static_cast<const FieldBasis*>(planar.get()),
                                static_cast<const FieldBasis*>(quad.get())})
      for (std::size_t k = 0; k < b->size(); ++k) {
        const auto [div, scale] = fd_divergence(*b, k, r, 1e-7);
        CHECK(std::abs(div) <= 1e-3 * scale + 1e-6);
      }
  }
}
