#include "paultrap/fields/geometry.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "paultrap/model.hpp"

namespace paultrap {

std::string role_name(const ElectrodeRole& role) {
  switch (role.kind) {
    case RoleKind::RfPlus: return "RF+";
    case RoleKind::RfMinus: return "RF-";
    case RoleKind::Dc: return "DC";
  }
  return "?";
}

Vec3 Panel::centroid() const {
  if (vertices.size() == 3) return (vertices[0] + vertices[1] + vertices[2]) / 3.0;
  // Area-weighted centroid of the two triangles of the quad.
  const Vec3& a = vertices[0];
  const Vec3& b = vertices[1];
  const Vec3& c = vertices[2];
  const Vec3& d = vertices[3];
  const double a1 = 0.5 * (b - a).cross(c - a).norm();
  const double a2 = 0.5 * (c - a).cross(d - a).norm();
  if (a1 + a2 == 0.0) return (a + b + c + d) / 4.0;
  return (a1 * (a + b + c) / 3.0 + a2 * (a + c + d) / 3.0) / (a1 + a2);
}

Vec3 Panel::normal() const {
  Vec3 n = Vec3::Zero();
  // Newell's method, robust for slightly warped quads.
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec3& p = vertices[i];
    const Vec3& q = vertices[(i + 1) % vertices.size()];
    n += p.cross(q);
  }
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double Panel::area() const {
  Vec3 n = Vec3::Zero();
  for (std::size_t i = 0; i < vertices.size(); ++i)
    n += vertices[i].cross(vertices[(i + 1) % vertices.size()]);
  return 0.5 * n.norm();
}

double Panel::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      best = std::max(best, (vertices[i] - vertices[j]).norm());
  return best;
}

double Panel::non_planarity() const {
  if (vertices.size() < 4) return 0.0;
  const Vec3 n = (vertices[1] - vertices[0]).cross(vertices[2] - vertices[0]);
  const double len = n.norm();
  const double diam = diameter();
  if (len == 0.0 || diam == 0.0) return 0.0;
  return std::abs((vertices[3] - vertices[0]).dot(n / len)) / diam;
}

namespace {

constexpr double kMinRelativeArea = 1e-12;

std::string panel_label(const Electrode& e, std::size_t i) {
  std::ostringstream s;
  s << "electrode '" << e.name << "' panel #" << i;
  if (e.source_line > 0) s << " (line " << e.source_line << ")";
  return s.str();
}

// Meshes the parallelogram origin + s u + t v into nu x nv quads.
void mesh_parallelogram(const Vec3& origin, const Vec3& u, const Vec3& v, double h,
                        std::vector<Panel>& out) {
  const int nu = std::max(1, static_cast<int>(std::ceil(u.norm() / h - 1e-9)));
  const int nv = std::max(1, static_cast<int>(std::ceil(v.norm() / h - 1e-9)));
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double s0 = double(i) / nu, s1 = double(i + 1) / nu;
      const double t0 = double(j) / nv, t1 = double(j + 1) / nv;
      out.push_back(Panel{{origin + s0 * u + t0 * v, origin + s1 * u + t0 * v,
                           origin + s1 * u + t1 * v, origin + s0 * u + t1 * v}});
    }
}

struct BoxFace {
  std::string name;
  Vec3 origin, u, v;  // u x v points outward
};

std::vector<BoxFace> box_faces(const BoxPrimitive& b) {
  const Vec3 lo = b.min, hi = b.max;
  const Vec3 d = hi - lo;
  const Vec3 ex(d.x(), 0, 0), ey(0, d.y(), 0), ez(0, 0, d.z());
  return {
      {"xmin", lo, ez, ey},
      {"xmax", Vec3(hi.x(), lo.y(), lo.z()), ey, ez},
      {"ymin", lo, ex, ez},
      {"ymax", Vec3(lo.x(), hi.y(), lo.z()), ez, ex},
      {"zmin", lo, ey, ex},
      {"zmax", Vec3(lo.x(), lo.y(), hi.z()), ex, ey},
  };
}

double primitive_area(const Primitive& p) {
  return std::visit(
      [](const auto& prim) -> double {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, BoxPrimitive>) {
          double a = 0.0;
          for (const auto& f : box_faces(prim))
            if (std::find(prim.open_faces.begin(), prim.open_faces.end(), f.name) ==
                prim.open_faces.end())
              a += f.u.cross(f.v).norm();
          return a;
        } else if constexpr (std::is_same_v<T, RectPrimitive>) {
          return prim.u.cross(prim.v).norm();
        } else {
          return 4.0 * std::numbers::pi * prim.radius * prim.radius;
        }
      },
      p);
}

// Geodesic sphere: every icosahedron face split into n^2 triangles whose
// vertices are pushed out to the sphere.
void mesh_sphere(const SpherePrimitive& s, double h, std::vector<Panel>& out) {
  const double area = 4.0 * std::numbers::pi * s.radius * s.radius;
  const int n = std::max(1, static_cast<int>(std::lround(std::sqrt(area / (h * h) / 20.0))));
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> ico = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                           {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                           {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : ico) v.normalize();
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7}, {9, 8, 1}};
  auto project = [&](const Vec3& p) -> Vec3 { return s.center + s.radius * p.normalized(); };
  for (const auto& f : faces) {
    const Vec3& A = ico[f[0]];
    const Vec3& B = ico[f[1]];
    const Vec3& C = ico[f[2]];
    auto point = [&](int i, int j) {  // barycentric lattice point, i + j <= n
      return Vec3(A + (B - A) * (double(i) / n) + (C - A) * (double(j) / n));
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; i + j < n; ++j) {
        out.push_back(Panel{{project(point(i, j)), project(point(i + 1, j)),
                             project(point(i, j + 1))}});
        if (i + j + 1 < n)
          out.push_back(Panel{{project(point(i + 1, j)), project(point(i + 1, j + 1)),
                               project(point(i, j + 1))}});
      }
  }
}

// Splits explicit panels until their diameter is at most `limit`.
void refine_panel(const Panel& p, double limit, std::vector<Panel>& out, int depth = 0) {
  if (p.diameter() <= limit || depth > 12) {
    out.push_back(p);
    return;
  }
  const auto& v = p.vertices;
  if (v.size() == 3) {
    const Vec3 m01 = 0.5 * (v[0] + v[1]), m12 = 0.5 * (v[1] + v[2]), m20 = 0.5 * (v[2] + v[0]);
    for (const Panel& c : {Panel{{v[0], m01, m20}}, Panel{{m01, v[1], m12}},
                           Panel{{m20, m12, v[2]}}, Panel{{m01, m12, m20}}})
      refine_panel(c, limit, out, depth + 1);
  } else {
    const Vec3 m01 = 0.5 * (v[0] + v[1]), m12 = 0.5 * (v[1] + v[2]);
    const Vec3 m23 = 0.5 * (v[2] + v[3]), m30 = 0.5 * (v[3] + v[0]);
    const Vec3 c = 0.25 * (v[0] + v[1] + v[2] + v[3]);
    for (const Panel& q : {Panel{{v[0], m01, c, m30}}, Panel{{m01, v[1], m12, c}},
                           Panel{{c, m12, v[2], m23}}, Panel{{m30, c, m23, v[3]}}})
      refine_panel(q, limit, out, depth + 1);
  }
}

void mesh_electrode(const Electrode& e, double h, std::vector<Panel>& out) {
  for (const Panel& p : e.panels) refine_panel(p, h * std::sqrt(2.0) * 1.0001, out);
  for (const Primitive& prim : e.primitives) {
    std::visit(
        [&](const auto& pr) {
          using T = std::decay_t<decltype(pr)>;
          if constexpr (std::is_same_v<T, BoxPrimitive>) {
            for (const auto& f : box_faces(pr))
              if (std::find(pr.open_faces.begin(), pr.open_faces.end(), f.name) ==
                  pr.open_faces.end())
                mesh_parallelogram(f.origin, f.u, f.v, h, out);
          } else if constexpr (std::is_same_v<T, RectPrimitive>) {
            mesh_parallelogram(pr.origin, pr.u, pr.v, h, out);
          } else {
            mesh_sphere(pr, h, out);
          }
        },
        prim);
  }
}

bool covered_by_box(const Vec3& p, const BoxPrimitive& b) {
  const double tol = 1e-9 * (b.max - b.min).norm();
  return p.x() > b.min.x() + tol && p.x() < b.max.x() - tol && p.y() > b.min.y() + tol &&
         p.y() < b.max.y() - tol && p.z() > b.min.z() - tol && p.z() < b.max.z() - tol;
}

}  // namespace

double total_area(const ElectrodeSystem& system) {
  double a = 0.0;
  for (const auto& e : system.electrodes) {
    for (const auto& p : e.panels) a += p.area();
    for (const auto& prim : e.primitives) a += primitive_area(prim);
  }
  return a;
}

std::vector<MeshedPanel> mesh_system(const ElectrodeSystem& system, std::size_t target_panels) {
  if (target_panels == 0) throw DomainError("target panel count must be positive");
  const double area = total_area(system);
  if (!(area > 0.0)) throw DomainError("electrode system has no surface area");
  const double h = std::sqrt(area / static_cast<double>(target_panels));

  std::vector<MeshedPanel> out;
  for (std::size_t k = 0; k < system.electrodes.size(); ++k) {
    std::vector<Panel> panels;
    mesh_electrode(system.electrodes[k], h, panels);
    for (auto& p : panels) {
      const Vec3 c = p.centroid();
      bool covered = false;
      for (std::size_t other = 0; other < system.electrodes.size() && !covered; ++other) {
        if (other == k) continue;
        for (const auto& prim : system.electrodes[other].primitives)
          if (const auto* box = std::get_if<BoxPrimitive>(&prim); box && covered_by_box(c, *box)) {
            covered = true;
            break;
          }
      }
      if (!covered) out.push_back({std::move(p), k});
    }
  }
  return out;
}

void ElectrodeSystem::validate() const {
  const GeometryDiagnostics d = diagnose(*this);
  if (!d.ok) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < d.errors.size(); ++i) msg << (i ? "; " : "") << d.errors[i];
    throw SchemaError(msg.str());
  }
}

GeometryDiagnostics diagnose(const ElectrodeSystem& system) {
  GeometryDiagnostics d;
  auto fail = [&d](std::string m) {
    d.ok = false;
    d.errors.push_back(std::move(m));
  };
  if (!(system.characteristic_distance > 0.0))
    fail("characteristic distance must be positive");
  if (system.electrodes.empty()) fail("no electrodes defined");

  std::map<std::string, int> seen;
  double largest = 0.0;
  for (const auto& e : system.electrodes) {
    if (e.name.empty()) fail("electrode without a name");
    if (auto [it, inserted] = seen.emplace(e.name, e.source_line); !inserted) {
      std::ostringstream s;
      s << "duplicate electrode name '" << e.name << "'";
      if (e.source_line > 0) s << " at line " << e.source_line;
      if (it->second > 0) s << " (first defined at line " << it->second << ")";
      fail(s.str());
    }
    if (e.role.is_rf()) ++d.rf_electrodes;
    else ++d.dc_electrodes;
    if (e.panels.empty() && e.primitives.empty())
      fail("electrode '" + e.name + "' has no surface");
    for (const auto& p : e.panels) largest = std::max(largest, p.diameter());
    for (const auto& prim : e.primitives) largest = std::max(largest, std::sqrt(primitive_area(prim)));
  }
  if (d.rf_electrodes == 0) fail("electrode system needs at least one RF electrode");

  for (const auto& e : system.electrodes) {
    for (std::size_t i = 0; i < e.panels.size(); ++i) {
      const Panel& p = e.panels[i];
      if (p.vertices.size() != 3 && p.vertices.size() != 4) {
        fail(panel_label(e, i) + " must have 3 or 4 vertices");
        continue;
      }
      if (!(p.area() > kMinRelativeArea * largest * largest)) {
        fail(panel_label(e, i) + " has zero area");
        continue;
      }
      if (p.non_planarity() > 1e-6) fail(panel_label(e, i) + " is not planar");
    }
    for (std::size_t i = 0; i < e.primitives.size(); ++i) {
      std::visit(
          [&](const auto& pr) {
            using T = std::decay_t<decltype(pr)>;
            if constexpr (std::is_same_v<T, BoxPrimitive>) {
              if (!((pr.max - pr.min).minCoeff() > 0.0))
                fail("electrode '" + e.name + "' box has non-positive extent");
              for (const auto& f : pr.open_faces)
                if (f != "xmin" && f != "xmax" && f != "ymin" && f != "ymax" && f != "zmin" &&
                    f != "zmax")
                  fail("electrode '" + e.name + "' box has unknown open face '" + f + "'");
            } else if constexpr (std::is_same_v<T, RectPrimitive>) {
              if (!(pr.u.cross(pr.v).norm() > 0.0))
                fail("electrode '" + e.name + "' rect has zero area");
            } else {
              if (!(pr.radius > 0.0)) fail("electrode '" + e.name + "' sphere radius must be positive");
            }
          },
          e.primitives[i]);
    }
  }

  if (d.ok) {
    std::vector<Panel> all;
    for (const auto& e : system.electrodes) all.insert(all.end(), e.panels.begin(), e.panels.end());
    if (total_area(system) > 0.0)
      for (const auto& mp : mesh_system(system, 2000)) all.push_back(mp.panel);
    PanelQuality& q = d.quality;
    q.panel_count = all.size();
    q.min_area = std::numeric_limits<double>::infinity();
    for (const auto& p : all) {
      const double a = p.area();
      q.min_area = std::min(q.min_area, a);
      q.max_area = std::max(q.max_area, a);
      q.max_aspect = std::max(q.max_aspect, p.diameter() * p.diameter() / a);
      q.max_non_planarity = std::max(q.max_non_planarity, p.non_planarity());
    }
    if (all.empty()) q.min_area = 0.0;
    if (q.max_aspect > 20.0) d.warnings.push_back("panels with aspect ratio above 20");
  }
  return d;
}

ElectrodeSystem rotated_about_z(const ElectrodeSystem& system, double angle) {
  const Eigen::Matrix3d R = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  const double quarter = angle / (std::numbers::pi / 2.0);
  const long turns = std::lround(quarter);
  const bool right_angle = std::abs(quarter - static_cast<double>(turns)) < 1e-12;
  ElectrodeSystem out = system;
  for (auto& e : out.electrodes) {
    for (auto& p : e.panels)
      for (auto& v : p.vertices) v = R * v;
    for (auto& prim : e.primitives) {
      std::visit(
          [&](auto& pr) {
            using T = std::decay_t<decltype(pr)>;
            if constexpr (std::is_same_v<T, BoxPrimitive>) {
              if (!right_angle)
                throw DomainError("box primitives only rotate by multiples of 90 degrees");
              const Vec3 a = R * pr.min, b = R * pr.max;
              pr.min = a.cwiseMin(b);
              pr.max = a.cwiseMax(b);
              // Each quarter turn maps faces xmin->ymin, ymin->xmax, xmax->ymax, ymax->xmin.
              const int n = static_cast<int>(((turns % 4) + 4) % 4);
              for (auto& f : pr.open_faces)
                for (int t = 0; t < n; ++t) {
                  if (f == "xmin") f = "ymin";
                  else if (f == "ymin") f = "xmax";
                  else if (f == "xmax") f = "ymax";
                  else if (f == "ymax") f = "xmin";
                }
            } else if constexpr (std::is_same_v<T, RectPrimitive>) {
              pr.origin = R * pr.origin;
              pr.u = R * pr.u;
              pr.v = R * pr.v;
            } else {
              pr.center = R * pr.center;
            }
          },
          prim);
    }
  }
  return out;
}

}  // namespace paultrap
