#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "paultrap/fields/builtin.hpp"
#include "paultrap/fields/coefficients.hpp"
#include "paultrap/fields/geometry_io.hpp"

using namespace paultrap;

namespace {

std::string schema_message(const std::string& yaml) {
  try {
    parse_geometry(yaml, "bad.yaml");
  } catch (const SchemaError& e) {
    return e.what();
  }
  return {};
}

const char* kTwoRails = R"(name: rails
characteristic_distance: 100
electrodes:
  - name: RF1
    role: RF+
    rect: {origin: [-200, -1000, 0], u: [100, 0, 0], v: [0, 2000, 0]}
  - name: RF2
    role: RF-
    rect: {origin: [100, -1000, 0], u: [100, 0, 0], v: [0, 2000, 0]}
)";

struct FourPillar {
  std::shared_ptr<const BemBasis> basis;
  std::vector<double> w;
  NullSearchResult null;
  QuadrupoleCoefficients c;
};

FourPillar solve_fourpillar(const ElectrodeSystem& g, std::size_t panels) {
  FourPillar f;
  f.basis = solve_bem(g, panels);
  DriveConfig drive;
  drive.omega_rf = 2 * constants::pi * 51.6e6;
  drive.u_tilde = 1;
  f.w = rf_weights(*f.basis, drive);
  f.null = rf_null(*f.basis, f.w, Vec3(0, 0, kFourPillarIonHeight));
  const std::vector<double> none(f.basis->size(), 0.0);
  f.c = quadrupole_coefficients(*f.basis, f.w, none, f.null.position);
  return f;
}

}  // namespace

TEST_CASE("geometry file parses") {
  const auto g = parse_geometry(kTwoRails);
  REQUIRE(g.electrodes.size() == 2);
  CHECK(g.characteristic_distance == doctest::Approx(100e-6));
  CHECK(g.electrodes[1].role.kind == RoleKind::RfMinus);
  CHECK(diagnose(g).ok);
  CHECK(total_area(g) == doctest::Approx(2 * 100e-6 * 2000e-6));
}

TEST_CASE("geometry schema errors carry line numbers") {
  std::string dup = kTwoRails;
  dup.replace(dup.find("RF2"), 3, "RF1");
  const auto m = schema_message(dup);
  CHECK(m.find("bad.yaml:7") != std::string::npos);
  CHECK(m.find("duplicate electrode name 'RF1'") != std::string::npos);
  CHECK(m.find("line 4") != std::string::npos);

  const std::string flat = std::string(kTwoRails) +
                           "  - name: PAD\n"
                           "    role: DC\n"
                           "    panels:\n"
                           "      - [[0, 0, 0], [10, 0, 0], [20, 0, 0], [30, 0, 0]]\n";
  const auto z = schema_message(flat);
  CHECK(z.find("electrode 'PAD' panel #0 has zero area") != std::string::npos);
  CHECK(z.find("bad.yaml:") == 0);

  std::string typo = kTwoRails;
  typo.replace(typo.find("role: RF-"), 4, "rloe");
  CHECK(schema_message(typo).find("bad.yaml:8") != std::string::npos);

  std::string units = kTwoRails;
  units.insert(units.find("characteristic"), "units: furlong\n");
  CHECK_FALSE(schema_message(units).empty());

  std::string dc_only = kTwoRails;
  dc_only.replace(dc_only.find("RF+"), 3, "DC");
  dc_only.replace(dc_only.find("RF-"), 3, "DC");
  CHECK(schema_message(dc_only).find("RF") != std::string::npos);
}

TEST_CASE("bundled four-pillar file matches the embedded geometry") {
  std::ifstream in(PAULTRAP_SOURCE_DIR "/geometries/fourpillar.yaml");
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == std::string(fourpillar_yaml()));
  const auto g = load_geometry(PAULTRAP_SOURCE_DIR "/geometries/fourpillar.yaml");
  const auto d = diagnose(g);
  CHECK(d.ok);
  CHECK(d.rf_electrodes == 4);
  CHECK(d.dc_electrodes == 9);
}

TEST_CASE("four-pillar BEM trap: Laplace residual, null on axis, rotation, refinement") {
  const auto g = fourpillar_geometry();
  const auto ref = solve_fourpillar(g, 3000);

  CHECK(ref.c.rf_trace_residual < 1e-3);
  const Vec3 p = ref.null.position;
  CHECK(std::hypot(p.x(), p.y()) < 1e-6);
  CHECK(p.z() == doctest::Approx(kFourPillarIonHeight).epsilon(0.05));

  const auto rot = solve_fourpillar(rotated_about_z(g, constants::pi / 2), 3000);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(rot.c.rf[i] - ref.c.rf[i]) <= 1e-6 * std::abs(ref.c.rf[0]));
    // axes turn with the geometry
    const Vec3 turned(-ref.c.axes[i].y(), ref.c.axes[i].x(), ref.c.axes[i].z());
    if (i < 2) CHECK(std::abs(turned.dot(rot.c.axes[i])) == doctest::Approx(1).epsilon(1e-4));
  }

  // radial curvatures are equal and opposite, so only the magnitude is ordered
  const auto coarse = solve_fourpillar(g, 1500);
  CHECK(std::abs(std::abs(coarse.c.rf[0]) - std::abs(ref.c.rf[0])) < 0.02 * std::abs(ref.c.rf[0]));
}
