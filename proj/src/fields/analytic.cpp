#include "paultrap/fields/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace paultrap {

IdealQuadrupoleBasis::IdealQuadrupoleBasis(double d, double kappa) : d_(d), kappa_(kappa) {
  if (!(d > 0.0)) throw DomainError("ideal quadrupole: d must be positive");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw DomainError("ideal quadrupole: kappa must lie in (0, 1]");
  infos_ = {{"RF+", {RoleKind::RfPlus, 0}},
            {"RF-", {RoleKind::RfMinus, 0}},
            {"DCQ", {RoleKind::Dc, 0}},
            {"EC", {RoleKind::Dc, 1}}};
}

double IdealQuadrupoleBasis::potential(std::size_t k, const Vec3& r) const {
  const double x = r.x(), y = r.y(), z = r.z();
  const double inv = 1.0 / (2.0 * d_ * d_);
  switch (k) {
    case 0: return kappa_ * (x * x - y * y) * inv;
    case 1: return -kappa_ * (x * x - y * y) * inv;
    case 2: return (x * x - y * y) * inv;
    case 3: return (2.0 * z * z - x * x - y * y) * inv;
    default: throw std::out_of_range("ideal quadrupole electrode index");
  }
}

Vec3 IdealQuadrupoleBasis::field(std::size_t k, const Vec3& r) const {
  const double inv = 1.0 / (d_ * d_);
  switch (k) {
    case 0: return -kappa_ * inv * Vec3(r.x(), -r.y(), 0.0);
    case 1: return kappa_ * inv * Vec3(r.x(), -r.y(), 0.0);
    case 2: return -inv * Vec3(r.x(), -r.y(), 0.0);
    case 3: return -inv * Vec3(-r.x(), -r.y(), 2.0 * r.z());
    default: throw std::out_of_range("ideal quadrupole electrode index");
  }
}

bool IdealQuadrupoleBasis::near_surface(const Vec3& r) const {
  return std::abs(r.x() * r.x() - r.y() * r.y()) >= d_ * d_ / kappa_;
}

Provenance IdealQuadrupoleBasis::provenance() const {
  std::ostringstream s;
  s << "ideal quadrupole d=" << d_ * 1e6 << "um kappa=" << kappa_;
  return {"analytic", s.str(), 0, 0, 0, 0, ""};
}

std::shared_ptr<const IdealQuadrupoleBasis> ideal_quadrupole_basis(double d, double kappa) {
  return std::make_shared<IdealQuadrupoleBasis>(d, kappa);
}

PlanarPatchBasis::PlanarPatchBasis(std::vector<PlanarElectrode> electrodes, double length_scale)
    : electrodes_(std::move(electrodes)), scale_(length_scale) {
  if (!(length_scale > 0.0)) throw DomainError("planar basis: length scale must be positive");
  for (const auto& e : electrodes_) {
    for (const auto& r : e.rects)
      if (!(r.x1 > r.x0 && r.y1 > r.y0))
        throw DomainError("planar electrode '" + e.name + "' has an empty rectangle");
    infos_.push_back({e.name, e.role});
  }
  for (std::size_t a = 0; a < electrodes_.size(); ++a)
    for (std::size_t b = a + 1; b < electrodes_.size(); ++b)
      if (electrodes_[a].name == electrodes_[b].name)
        throw DomainError("duplicate planar electrode name '" + electrodes_[a].name + "'");
  for (std::size_t a = 0; a < electrodes_.size(); ++a)
    for (const auto& ra : electrodes_[a].rects)
      for (std::size_t b = a; b < electrodes_.size(); ++b)
        for (const auto& rb : electrodes_[b].rects) {
          if (&ra == &rb) continue;
          const double ox = std::min(ra.x1, rb.x1) - std::max(ra.x0, rb.x0);
          const double oy = std::min(ra.y1, rb.y1) - std::max(ra.y0, rb.y0);
          if (ox > 0.0 && oy > 0.0)
            throw DomainError("planar rectangles overlap ('" + electrodes_[a].name + "', '" +
                              electrodes_[b].name + "')");
        }
}

namespace {

void require_above_plane(const Vec3& r) {
  if (!(r.z() > 0.0)) throw DomainError("planar patch fields are only defined for z > 0");
}

}  // namespace

// phi = (1/2pi) sum_corners s atan(u v / (z R)), u = X - x, v = Y - y,
// R = sqrt(u^2 + v^2 + z^2), with sign s = +1 at (x1, y1) and (x0, y0).
double PlanarPatchBasis::rect_potential(const PlaneRect& rect, const Vec3& r) {
  require_above_plane(r);
  const double z = r.z();
  auto corner = [&](double X, double Y) {
    const double u = X - r.x(), v = Y - r.y();
    return std::atan(u * v / (z * std::sqrt(u * u + v * v + z * z)));
  };
  return (corner(rect.x1, rect.y1) - corner(rect.x0, rect.y1) - corner(rect.x1, rect.y0) +
          corner(rect.x0, rect.y0)) /
         (2.0 * std::numbers::pi);
}

Vec3 PlanarPatchBasis::rect_field(const PlaneRect& rect, const Vec3& r) {
  require_above_plane(r);
  const double z = r.z();
  Vec3 e = Vec3::Zero();
  auto corner = [&](double X, double Y, double sign) {
    const double u = X - r.x(), v = Y - r.y();
    const double u2z = u * u + z * z, v2z = v * v + z * z;
    const double R = std::sqrt(u * u + v * v + z * z);
    e.x() += sign * v * z / (R * u2z);
    e.y() += sign * u * z / (R * v2z);
    e.z() += sign * u * v * (R * R + z * z) / (R * u2z * v2z);
  };
  corner(rect.x1, rect.y1, 1.0);
  corner(rect.x0, rect.y1, -1.0);
  corner(rect.x1, rect.y0, -1.0);
  corner(rect.x0, rect.y0, 1.0);
  return e / (2.0 * std::numbers::pi);
}

double PlanarPatchBasis::potential(std::size_t k, const Vec3& r) const {
  double v = 0.0;
  for (const auto& rect : electrodes_.at(k).rects) v += rect_potential(rect, r);
  return v;
}

Vec3 PlanarPatchBasis::field(std::size_t k, const Vec3& r) const {
  Vec3 e = Vec3::Zero();
  for (const auto& rect : electrodes_.at(k).rects) e += rect_field(rect, r);
  return e;
}

Provenance PlanarPatchBasis::provenance() const {
  std::size_t rects = 0;
  for (const auto& e : electrodes_) rects += e.rects.size();
  return {"analytic", "gapless planar patches (" + std::to_string(rects) + " rectangles)", 0, 0,
          0, 0, ""};
}

std::shared_ptr<const PlanarPatchBasis> planar_patch_basis(std::vector<PlanarElectrode> electrodes,
                                                           double length_scale) {
  return std::make_shared<PlanarPatchBasis>(std::move(electrodes), length_scale);
}

}  // namespace paultrap
