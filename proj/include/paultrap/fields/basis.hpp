#pragma once

// Per-electrode unit-voltage field evaluators. A FieldBasis maps electrode k to
// phi_k(r) (potential per volt, dimensionless) and E_k(r) = -grad phi_k (1/m);
// any applied voltage pattern is a linear combination sum_k V_k phi_k.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paultrap/fields/geometry.hpp"
#include "paultrap/model.hpp"

namespace paultrap {

struct ElectrodeInfo {
  std::string name;
  ElectrodeRole role;
};

struct Provenance {
  std::string kind;  // "analytic" or "bem"
  std::string description;
  std::size_t panel_count = 0;
  double min_panel_area = 0.0, max_panel_area = 0.0;
  double condition_estimate = 0.0;  // reciprocal condition number estimate, BEM only
  std::string solve_method;
};

/// Potential and field of one fixed linear combination of basis electrodes.
class CombinedField {
 public:
  virtual ~CombinedField() = default;
  virtual double potential(const Vec3& r) const = 0;
  virtual Vec3 field(const Vec3& r) const = 0;
};

class FieldBasis : public std::enable_shared_from_this<FieldBasis> {
 public:
  virtual ~FieldBasis() = default;

  virtual std::size_t size() const = 0;
  virtual const ElectrodeInfo& electrode(std::size_t k) const = 0;
  virtual double potential(std::size_t k, const Vec3& r) const = 0;
  virtual Vec3 field(std::size_t k, const Vec3& r) const = 0;

  /// Superposition sum_k w_k phi_k(r) and sum_k w_k E_k(r).
  virtual double potential(std::span<const double> weights, const Vec3& r) const;
  virtual Vec3 field(std::span<const double> weights, const Vec3& r) const;

  /// Evaluator for a fixed weight vector; cheaper than the span overloads in loops.
  virtual std::unique_ptr<CombinedField> combine(std::span<const double> weights) const;

  /// True where the model is known to be inaccurate (on or next to an electrode).
  virtual bool near_surface(const Vec3& r) const;

  /// Typical electrode distance; used to pick finite-difference steps.
  virtual double length_scale() const = 0;

  virtual Provenance provenance() const = 0;

  std::optional<std::size_t> index_of(std::string_view name) const;
};

using FieldBasisPtr = std::shared_ptr<const FieldBasis>;

/// Per-electrode RF weights (polarities) for a drive. Electrodes not named
/// in `drive.polarity` take their role default (RF+ -> +1, RF- -> -1, DC -> 0);
/// an empty map means "all defaults". Unknown names throw DomainError.
std::vector<double> rf_weights(const FieldBasis& basis, const DriveConfig& drive);

/// Per-electrode static weights from `drive.dc_weights` (missing -> 0).
std::vector<double> dc_weights(const FieldBasis& basis, const DriveConfig& drive);

/// Weights from an explicit name -> value map; unknown names throw DomainError.
std::vector<double> weights_from_map(const FieldBasis& basis,
                                     const std::map<std::string, double>& values);

/// phi = -(r . direction): a uniform field of 1 V/m per volt along `direction`.
class UniformFieldBasis final : public FieldBasis {
 public:
  using FieldBasis::field;
  using FieldBasis::potential;

  UniformFieldBasis(std::string name, ElectrodeRole role, const Vec3& direction,
                    double length_scale);
  std::size_t size() const override { return 1; }
  const ElectrodeInfo& electrode(std::size_t) const override { return info_; }
  double potential(std::size_t, const Vec3& r) const override { return -r.dot(direction_); }
  Vec3 field(std::size_t, const Vec3&) const override { return direction_; }
  double length_scale() const override { return scale_; }
  Provenance provenance() const override;

 private:
  ElectrodeInfo info_;
  Vec3 direction_;
  double scale_;
};

/// Concatenation of several bases; electrode names must stay unique.
class CompositeBasis final : public FieldBasis {
 public:
  using FieldBasis::field;
  using FieldBasis::potential;

  explicit CompositeBasis(std::vector<FieldBasisPtr> parts);
  std::size_t size() const override { return index_.size(); }
  const ElectrodeInfo& electrode(std::size_t k) const override;
  double potential(std::size_t k, const Vec3& r) const override;
  Vec3 field(std::size_t k, const Vec3& r) const override;
  std::unique_ptr<CombinedField> combine(std::span<const double> weights) const override;
  bool near_surface(const Vec3& r) const override;
  double length_scale() const override;
  Provenance provenance() const override;

 private:
  std::vector<FieldBasisPtr> parts_;
  std::vector<std::pair<std::size_t, std::size_t>> index_;  // (part, local index)
};

}  // namespace paultrap
