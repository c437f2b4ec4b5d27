#include "paultrap/fields/builtin.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>

#include "paultrap/fields/geometry_io.hpp"

namespace paultrap {

namespace {

constexpr std::string_view kFourPillar = R"(name: fourpillar
units: um
characteristic_distance: 100
electrodes:
  - name: RF1
    role: RF+
    box: {min: [100, -50, 0], max: [200, 50, 300], open: [zmin]}
  - name: RF2
    role: RF-
    box: {min: [-50, 100, 0], max: [50, 200, 300], open: [zmin]}
  - name: RF3
    role: RF+
    box: {min: [-200, -50, 0], max: [-100, 50, 300], open: [zmin]}
  - name: RF4
    role: RF-
    box: {min: [-50, -200, 0], max: [50, -100, 300], open: [zmin]}
  - name: DC1
    role: DC
    rect: {origin: [-300, 100, 0], u: [200, 0, 0], v: [0, 200, 0]}
  - name: DC2
    role: DC
    rect: {origin: [-100, 100, 0], u: [200, 0, 0], v: [0, 200, 0]}
  - name: DC3
    role: DC
    rect: {origin: [100, 100, 0], u: [200, 0, 0], v: [0, 200, 0]}
  - name: DC4
    role: DC
    rect: {origin: [-300, -100, 0], u: [200, 0, 0], v: [0, 200, 0]}
  - name: DC5
    role: DC
    rect: {origin: [-100, -100, 0], u: [200, 0, 0], v: [0, 200, 0]}
  - name: DC6
    role: DC
    rect: {origin: [100, -100, 0], u: [200, 0, 0], v: [0, 200, 0]}
  - name: DC7
    role: DC
    rect: {origin: [-300, -300, 0], u: [200, 0, 0], v: [0, 200, 0]}
  - name: DC8
    role: DC
    rect: {origin: [-100, -300, 0], u: [200, 0, 0], v: [0, 200, 0]}
  - name: DC9
    role: DC
    rect: {origin: [100, -300, 0], u: [200, 0, 0], v: [0, 200, 0]}
)";

// On-axis potential of two infinitely long rails |x| in [a, b] at unit voltage.
double rail_potential(double a, double b, double z) {
  return 2.0 / constants::pi * (std::atan(b / z) - std::atan(a / z));
}

double rail_curvature(double a, double b, double z) {
  const double h = 1e-3 * z;
  return (rail_potential(a, b, z + h) - 2 * rail_potential(a, b, z) + rail_potential(a, b, z - h)) /
         (h * h);
}

}  // namespace

std::string_view fourpillar_yaml() { return kFourPillar; }

ElectrodeSystem fourpillar_geometry() { return parse_geometry(std::string(kFourPillar), "builtin:fourpillar"); }

SurfaceTrapDesign design_five_wire(double height, double length) {
  if (!(height > 0.0) || !(length > 10 * height)) throw DomainError("five-wire design needs 0 < height < length / 10");
  auto negative_curvature = [&](double log_ratio) {
    const double r = std::exp(log_ratio);
    const double a = height / std::sqrt(r), b = height * std::sqrt(r);
    return -std::abs(rail_curvature(a, b, height));
  };
  const auto [best, value] =
      boost::math::tools::brent_find_minima(negative_curvature, std::log(1.5), std::log(100.0), 40);
  SurfaceTrapDesign d;
  d.height = height;
  d.rail_inner = height / std::sqrt(std::exp(best));
  d.rail_outer = height * std::sqrt(std::exp(best));
  d.length = length;
  d.efficiency = -value * height * height;
  return d;
}

std::shared_ptr<const PlanarPatchBasis> five_wire_basis(const SurfaceTrapDesign& d) {
  const double a = d.rail_inner, b = d.rail_outer, y = d.length / 2, outer = 2e-3;
  std::vector<PlanarElectrode> e{
      {"RF_L", {RoleKind::RfPlus, 0}, {{-b, -a, -y, y}}},
      {"RF_R", {RoleKind::RfPlus, 0}, {{a, b, -y, y}}},
      {"DC_C", {RoleKind::Dc, 0}, {{-a, a, -y, y}}},
      {"DC_L", {RoleKind::Dc, 1}, {{-b - outer, -b, -y, y}}},
      {"DC_R", {RoleKind::Dc, 2}, {{b, b + outer, -y, y}}},
  };
  return planar_patch_basis(std::move(e), d.height);
}

std::vector<std::string> builtin_geometries() { return {"fourpillar", "ideal3d", "surface5wire"}; }

FieldBasisPtr builtin_basis(std::string_view name, const BuiltinOptions& o) {
  if (name == "ideal3d") return ideal_quadrupole_basis(o.distance, 1.0);
  if (name == "surface5wire") return five_wire_basis(design_five_wire(o.distance));
  if (name == "fourpillar") return solve_bem(fourpillar_geometry(), o.bem_panels, o.bem);
  throw SchemaError("unknown builtin geometry '" + std::string(name) +
                    "' (known: fourpillar, ideal3d, surface5wire)");
}

Vec3 builtin_null_guess(std::string_view name, const BuiltinOptions& o) {
  if (name == "surface5wire") return Vec3(0, 0, o.distance);
  if (name == "fourpillar") return Vec3(0, 0, kFourPillarIonHeight);
  return Vec3::Zero();
}

}  // namespace paultrap
