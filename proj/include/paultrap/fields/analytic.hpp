#pragma once

#include <vector>

#include "paultrap/fields/basis.hpp"

namespace paultrap {

/// Ideal linear quadrupole with RF electrode distance d and geometric efficiency kappa.
///
/// Electrodes:
///   RF+  phi =  kappa (x^2 - y^2) / (2 d^2)
///   RF-  phi = -kappa (x^2 - y^2) / (2 d^2)
///   DCQ  phi =  (x^2 - y^2) / (2 d^2)               static radial quadrupole (mode splitting)
///   EC   phi =  (2 z^2 - x^2 - y^2) / (2 d^2)       end caps (axial confinement)
///
/// With RF+ alone at 1 V the RF curvatures are A' = kappa/d^2, B' = -kappa/d^2, C' = 0.
class IdealQuadrupoleBasis final : public FieldBasis {
 public:
  using FieldBasis::field;
  using FieldBasis::potential;

  IdealQuadrupoleBasis(double d, double kappa);

  std::size_t size() const override { return infos_.size(); }
  const ElectrodeInfo& electrode(std::size_t k) const override { return infos_.at(k); }
  double potential(std::size_t k, const Vec3& r) const override;
  Vec3 field(std::size_t k, const Vec3& r) const override;
  /// Beyond the hyperbolic RF electrode surfaces |x^2 - y^2| = d^2 / kappa.
  bool near_surface(const Vec3& r) const override;
  double length_scale() const override { return d_; }
  Provenance provenance() const override;

  double distance() const { return d_; }
  double efficiency() const { return kappa_; }

 private:
  double d_, kappa_;
  std::vector<ElectrodeInfo> infos_;
};

std::shared_ptr<const IdealQuadrupoleBasis> ideal_quadrupole_basis(double d, double kappa);

/// Axis-aligned rectangle in the z = 0 plane, metres.
struct PlaneRect {
  double x0, x1, y0, y1;
};

struct PlanarElectrode {
  std::string name;
  ElectrodeRole role;
  std::vector<PlaneRect> rects;
};

/// Gapless planar electrodes: each rectangle is held at its electrode's
/// potential in an otherwise grounded infinite plane z = 0. Potentials and
/// fields are closed-form; evaluation requires z > 0.
class PlanarPatchBasis final : public FieldBasis {
 public:
  using FieldBasis::field;
  using FieldBasis::potential;

  PlanarPatchBasis(std::vector<PlanarElectrode> electrodes, double length_scale);

  std::size_t size() const override { return electrodes_.size(); }
  const ElectrodeInfo& electrode(std::size_t k) const override { return infos_.at(k); }
  double potential(std::size_t k, const Vec3& r) const override;
  Vec3 field(std::size_t k, const Vec3& r) const override;
  /// Points at z <= 0 lie on or behind the electrode plane.
  bool near_surface(const Vec3& r) const override { return r.z() <= 0.0; }
  double length_scale() const override { return scale_; }
  Provenance provenance() const override;

  const std::vector<PlanarElectrode>& electrodes() const { return electrodes_; }

  /// Potential and field of a single rectangle at unit potential.
  static double rect_potential(const PlaneRect& rect, const Vec3& r);
  static Vec3 rect_field(const PlaneRect& rect, const Vec3& r);

 private:
  std::vector<PlanarElectrode> electrodes_;
  std::vector<ElectrodeInfo> infos_;
  double scale_;
};

std::shared_ptr<const PlanarPatchBasis> planar_patch_basis(std::vector<PlanarElectrode> electrodes,
                                                           double length_scale);

}  // namespace paultrap
