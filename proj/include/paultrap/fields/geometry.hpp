#pragma once

// Electrode geometry: named electrodes made of planar panels or analytic
// primitives (box, parallelogram, sphere), and the mesher that turns them into
// the flat panel list consumed by the boundary-element solver.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace paultrap {

using Vec3 = Eigen::Vector3d;

enum class RoleKind { RfPlus, RfMinus, Dc };

struct ElectrodeRole {
  RoleKind kind = RoleKind::Dc;
  int dc_index = 0;  // position among DC electrodes, only meaningful for Dc

  bool is_rf() const { return kind != RoleKind::Dc; }
  /// Polarity used when a drive does not list the electrode explicitly.
  double default_polarity() const {
    return kind == RoleKind::RfPlus ? 1.0 : kind == RoleKind::RfMinus ? -1.0 : 0.0;
  }
};

std::string role_name(const ElectrodeRole& role);

/// Planar convex polygon with 3 or 4 vertices (metres), ordered counter-clockwise
/// about the normal (v1 - v0) x (v2 - v0).
struct Panel {
  std::vector<Vec3> vertices;

  Vec3 centroid() const;
  Vec3 normal() const;  // unit
  double area() const;
  double diameter() const;  // longest vertex-vertex distance
  /// Largest distance of a vertex from the plane of the first three, relative to the diameter.
  double non_planarity() const;
};

struct BoxPrimitive {
  Vec3 min, max;
  std::vector<std::string> open_faces;  // subset of xmin, xmax, ymin, ymax, zmin, zmax
};

struct RectPrimitive {
  Vec3 origin, u, v;  // parallelogram origin + s u + t v, s, t in [0, 1]
};

struct SpherePrimitive {
  Vec3 center;
  double radius = 0.0;
};

using Primitive = std::variant<BoxPrimitive, RectPrimitive, SpherePrimitive>;

struct Electrode {
  std::string name;
  ElectrodeRole role;
  std::vector<Panel> panels;          // explicit panels
  std::vector<Primitive> primitives;  // meshed on demand
  int source_line = 0;                // 1-based line in the geometry file, 0 if built in code
};

struct ElectrodeSystem {
  std::string name;
  std::vector<Electrode> electrodes;
  double characteristic_distance = 0.0;  // ion to nearest RF electrode, metres

  /// Throws SchemaError describing the first structural problem found.
  void validate() const;
};

struct PanelQuality {
  std::size_t panel_count = 0;
  double min_area = 0.0, max_area = 0.0;
  double max_aspect = 0.0;  // diameter^2 / area
  double max_non_planarity = 0.0;
};

struct GeometryDiagnostics {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  PanelQuality quality;  // of the explicit panels plus a default meshing
  std::size_t rf_electrodes = 0, dc_electrodes = 0;
};

/// Non-throwing structural check (schema already parsed): names, roles,
/// degenerate panels, primitive sizes, panel quality.
GeometryDiagnostics diagnose(const ElectrodeSystem& system);

struct MeshedPanel {
  Panel panel;
  std::size_t electrode = 0;
};

/// Meshes every electrode with a uniform target panel size chosen so that the
/// total count lands near `target_panels`. Panels whose centroid lies on or
/// inside the footprint of another electrode's box are dropped (a pillar
/// standing on a planar electrode covers that part of it).
std::vector<MeshedPanel> mesh_system(const ElectrodeSystem& system, std::size_t target_panels);

/// Total surface area of the unmeshed system.
double total_area(const ElectrodeSystem& system);

/// Rotates every electrode about the z axis through the origin.
ElectrodeSystem rotated_about_z(const ElectrodeSystem& system, double angle);

}  // namespace paultrap
