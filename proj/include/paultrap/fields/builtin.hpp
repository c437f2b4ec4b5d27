#pragma once

// Geometries shipped with the library.
//
//   ideal3d       ideal linear quadrupole, kappa = 1
//   surface5wire  gapless symmetric two-rail surface trap, rails sized so the
//                 RF null sits at the requested height with maximal curvature
//   fourpillar    four 300 um tall RF pillars (200 um between opposing faces)
//                 standing on a 3 x 3 grid of DC pads covering 600 um x 600 um

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "paultrap/fields/analytic.hpp"
#include "paultrap/fields/bem.hpp"

namespace paultrap {

std::string_view fourpillar_yaml();
ElectrodeSystem fourpillar_geometry();

/// Height of the RF null above the DC plane of the four-pillar trap (m).
inline constexpr double kFourPillarIonHeight = 130e-6;

struct SurfaceTrapDesign {
  double height = 0.0;      // RF null height above the plane (m)
  double rail_inner = 0.0;  // inner rail edge |x| (m)
  double rail_outer = 0.0;  // outer rail edge |x| (m)
  double length = 0.0;      // rail length along y (m)
  double efficiency = 0.0;  // |A'| h^2 of the infinitely long rails
};

/// Rails at |x| in [a, b] with sqrt(a b) = height; b / a is chosen to maximise
/// the RF curvature at the null (infinitely long rails, closed form).
SurfaceTrapDesign design_five_wire(double height, double length = 40e-3);

/// Electrodes RF_L, RF_R (both RF+), DC_C (centre), DC_L, DC_R (outer, 2 mm wide).
std::shared_ptr<const PlanarPatchBasis> five_wire_basis(const SurfaceTrapDesign& design);

struct BuiltinOptions {
  double distance = 100e-6;      // ideal3d / surface5wire characteristic distance
  std::size_t bem_panels = 3000; // fourpillar mesh target
  BemOptions bem;
};

std::vector<std::string> builtin_geometries();

/// Field basis of a builtin geometry; throws SchemaError for unknown names.
FieldBasisPtr builtin_basis(std::string_view name, const BuiltinOptions& options = {});

/// Point near which the RF null of a builtin geometry is searched.
Vec3 builtin_null_guess(std::string_view name, const BuiltinOptions& options = {});

}  // namespace paultrap
