#include "paultrap/fields/basis.hpp"

#include <set>

namespace paultrap {

namespace {

class GenericCombination final : public CombinedField {
 public:
  GenericCombination(const FieldBasis& basis, std::span<const double> w)
      : basis_(basis), weights_(w.begin(), w.end()) {}
  double potential(const Vec3& r) const override { return basis_.potential(weights_, r); }
  Vec3 field(const Vec3& r) const override { return basis_.field(weights_, r); }

 private:
  const FieldBasis& basis_;
  std::vector<double> weights_;
};

void check_weights(const FieldBasis& basis, std::span<const double> w) {
  if (w.size() != basis.size())
    throw DomainError("weight vector length " + std::to_string(w.size()) +
                      " does not match basis size " + std::to_string(basis.size()));
}

}  // namespace

double FieldBasis::potential(std::span<const double> weights, const Vec3& r) const {
  check_weights(*this, weights);
  double v = 0.0;
  for (std::size_t k = 0; k < size(); ++k)
    if (weights[k] != 0.0) v += weights[k] * potential(k, r);
  return v;
}

Vec3 FieldBasis::field(std::span<const double> weights, const Vec3& r) const {
  check_weights(*this, weights);
  Vec3 e = Vec3::Zero();
  for (std::size_t k = 0; k < size(); ++k)
    if (weights[k] != 0.0) e += weights[k] * field(k, r);
  return e;
}

std::unique_ptr<CombinedField> FieldBasis::combine(std::span<const double> weights) const {
  check_weights(*this, weights);
  return std::make_unique<GenericCombination>(*this, weights);
}

bool FieldBasis::near_surface(const Vec3&) const { return false; }

std::optional<std::size_t> FieldBasis::index_of(std::string_view name) const {
  for (std::size_t k = 0; k < size(); ++k)
    if (electrode(k).name == name) return k;
  return std::nullopt;
}

std::vector<double> weights_from_map(const FieldBasis& basis,
                                     const std::map<std::string, double>& values) {
  std::vector<double> w(basis.size(), 0.0);
  for (const auto& [name, value] : values) {
    const auto k = basis.index_of(name);
    if (!k) throw DomainError("unknown electrode '" + name + "'");
    w[*k] = value;
  }
  return w;
}

std::vector<double> rf_weights(const FieldBasis& basis, const DriveConfig& drive) {
  std::vector<double> w(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) w[k] = basis.electrode(k).role.default_polarity();
  for (const auto& [name, value] : drive.polarity) {
    const auto k = basis.index_of(name);
    if (!k) throw DomainError("polarity given for unknown electrode '" + name + "'");
    w[*k] = value;
  }
  return w;
}

std::vector<double> dc_weights(const FieldBasis& basis, const DriveConfig& drive) {
  return weights_from_map(basis, drive.dc_weights);
}

UniformFieldBasis::UniformFieldBasis(std::string name, ElectrodeRole role, const Vec3& direction,
                                     double length_scale)
    : info_{std::move(name), role}, direction_(direction.normalized()), scale_(length_scale) {
  if (!(direction.norm() > 0.0)) throw DomainError("uniform field direction must be non-zero");
}

Provenance UniformFieldBasis::provenance() const {
  return {"analytic", "uniform field '" + info_.name + "'", 0, 0, 0, 0, ""};
}

CompositeBasis::CompositeBasis(std::vector<FieldBasisPtr> parts) : parts_(std::move(parts)) {
  std::set<std::string> names;
  for (std::size_t p = 0; p < parts_.size(); ++p)
    for (std::size_t k = 0; k < parts_[p]->size(); ++k) {
      if (!names.insert(parts_[p]->electrode(k).name).second)
        throw DomainError("duplicate electrode name '" + parts_[p]->electrode(k).name +
                          "' in composite basis");
      index_.emplace_back(p, k);
    }
}

const ElectrodeInfo& CompositeBasis::electrode(std::size_t k) const {
  const auto [p, local] = index_.at(k);
  return parts_[p]->electrode(local);
}

double CompositeBasis::potential(std::size_t k, const Vec3& r) const {
  const auto [p, local] = index_.at(k);
  return parts_[p]->potential(local, r);
}

Vec3 CompositeBasis::field(std::size_t k, const Vec3& r) const {
  const auto [p, local] = index_.at(k);
  return parts_[p]->field(local, r);
}

namespace {

class CompositeCombination final : public CombinedField {
 public:
  explicit CompositeCombination(std::vector<std::unique_ptr<CombinedField>> parts)
      : parts_(std::move(parts)) {}
  double potential(const Vec3& r) const override {
    double v = 0.0;
    for (const auto& p : parts_) v += p->potential(r);
    return v;
  }
  Vec3 field(const Vec3& r) const override {
    Vec3 e = Vec3::Zero();
    for (const auto& p : parts_) e += p->field(r);
    return e;
  }

 private:
  std::vector<std::unique_ptr<CombinedField>> parts_;
};

}  // namespace

std::unique_ptr<CombinedField> CompositeBasis::combine(std::span<const double> weights) const {
  check_weights(*this, weights);
  std::vector<std::vector<double>> local(parts_.size());
  for (std::size_t p = 0; p < parts_.size(); ++p) local[p].assign(parts_[p]->size(), 0.0);
  for (std::size_t k = 0; k < index_.size(); ++k) local[index_[k].first][index_[k].second] = weights[k];
  std::vector<std::unique_ptr<CombinedField>> parts;
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    bool any = false;
    for (double w : local[p]) any = any || w != 0.0;
    if (any) parts.push_back(parts_[p]->combine(local[p]));
  }
  return std::make_unique<CompositeCombination>(std::move(parts));
}

bool CompositeBasis::near_surface(const Vec3& r) const {
  for (const auto& p : parts_)
    if (p->near_surface(r)) return true;
  return false;
}

double CompositeBasis::length_scale() const {
  double s = 0.0;
  for (const auto& p : parts_) s = std::max(s, p->length_scale());
  return s;
}

Provenance CompositeBasis::provenance() const {
  Provenance out{"composite", "", 0, 0, 0, 0, ""};
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    const Provenance sub = parts_[p]->provenance();
    out.description += (p ? " + " : "") + sub.kind + ":" + sub.description;
    out.panel_count += sub.panel_count;
  }
  return out;
}

}  // namespace paultrap
