#include "paultrap/fields/bem.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "paultrap/simd/point_kernels.hpp"

namespace paultrap {

namespace {

constexpr double kFourPiEps0 = 4.0 * std::numbers::pi * constants::epsilon0;

// 4-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 4> kGaussNodes = {
    0.069431844202973712, 0.33000947820757187, 0.66999052179242813, 0.93056815579702629};
constexpr std::array<double, 4> kGaussWeights = {
    0.17392742256872693, 0.32607257743127307, 0.32607257743127307, 0.17392742256872693};

// ln(R + l) with R = sqrt(R0sq + l^2), stable for l << 0.
struct LogPair {
  double value;
  bool degenerate;  // R0sq == 0 and l <= 0: ln(R + l) = -inf
};

LogPair log_r_plus_l(double R0sq, double R, double l) {
  if (l >= 0.0) return {std::log(R + l), false};
  if (R0sq <= 0.0) return {0.0, true};
  return {std::log(R0sq) - std::log(R - l), false};
}

struct EdgeTerms {
  double log_term;   // ln((R+ + l+)/(R- + l-))
  double atan_term;  // atan(P0 l+/(R0^2 + |d| R+)) - atan(P0 l-/(R0^2 + |d| R-))
  double P0;
  Vec3 u;            // outward in-plane edge normal
};

template <typename Fn>
void for_each_edge(const PanelGeometry& p, const Vec3& r, double& d_out, Fn&& fn) {
  const Vec3& n = p.normal;
  const double d = (r - p.vertices[0]).dot(n);
  d_out = d;
  const Vec3 rho = r - d * n;
  const double ad = std::abs(d);
  const double tiny = 1e-13 * p.diameter;
  for (int i = 0; i < p.vertex_count; ++i) {
    const Vec3& pm = p.vertices[i];
    const Vec3& pp = p.vertices[(i + 1) % p.vertex_count];
    const Vec3 edge = pp - pm;
    const double len = edge.norm();
    const Vec3 t = edge / len;
    const Vec3 u = t.cross(n);
    const double P0 = (pm - rho).dot(u);
    const double lp = (pp - rho).dot(t);
    const double lm = (pm - rho).dot(t);
    double R0sq = P0 * P0 + d * d;
    if (R0sq < tiny * tiny) R0sq = 0.0;
    const double Rp = std::sqrt(R0sq + lp * lp);
    const double Rm = std::sqrt(R0sq + lm * lm);

    double log_term = 0.0;
    const LogPair a = log_r_plus_l(R0sq, Rp, lp);
    const LogPair b = log_r_plus_l(R0sq, Rm, lm);
    if (!a.degenerate && !b.degenerate) {
      log_term = a.value - b.value;
    } else if (a.degenerate && b.degenerate) {
      // Point on the edge line beyond p-: both l < 0.
      log_term = std::log(std::abs(lm)) - std::log(std::abs(lp));
    } else {
      // Point on the edge segment itself; the term is multiplied by P0 = 0 in
      // the potential and the field is singular there.
      log_term = 0.0;
    }

    double atan_term = 0.0;
    if (ad > tiny && std::abs(P0) > tiny)
      atan_term = std::atan(P0 * lp / (R0sq + ad * Rp)) - std::atan(P0 * lm / (R0sq + ad * Rm));
    fn(EdgeTerms{log_term, atan_term, P0, u});
  }
}

}  // namespace

PanelGeometry::PanelGeometry(const Panel& panel) {
  vertex_count = static_cast<int>(panel.vertices.size());
  if (vertex_count != 3 && vertex_count != 4)
    throw DomainError("panels must have 3 or 4 vertices");
  for (int i = 0; i < vertex_count; ++i) vertices[i] = panel.vertices[i];
  centroid = panel.centroid();
  normal = panel.normal();
  area = panel.area();
  diameter = panel.diameter();
  if (!(area > 0.0)) throw DomainError("degenerate panel with zero area");
}

double panel_integral(const PanelGeometry& p, const Vec3& r) {
  double d = 0.0;
  double sum = 0.0;
  double solid = 0.0;
  const double tiny = 1e-13 * p.diameter;
  for_each_edge(p, r, d, [&](const EdgeTerms& e) {
    if (std::abs(e.P0) > tiny) sum += e.P0 * e.log_term;
    solid += e.atan_term;
  });
  return sum - std::abs(d) * solid;
}

Vec3 panel_integral_gradient(const PanelGeometry& p, const Vec3& r) {
  double d = 0.0;
  Vec3 g = Vec3::Zero();
  double solid = 0.0;
  for_each_edge(p, r, d, [&](const EdgeTerms& e) {
    g -= e.u * e.log_term;
    solid += e.atan_term;
  });
  const double sgn = d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0;
  return g - p.normal * (sgn * solid);
}

std::array<std::array<double, 4>, kQuadraturePoints> panel_quadrature(const PanelGeometry& p) {
  std::array<std::array<double, 4>, kQuadraturePoints> out{};
  const auto& v = p.vertices;
  int n = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double s = kGaussNodes[i], t = kGaussNodes[j];
      Vec3 x;
      double jac;
      if (p.vertex_count == 4) {
        x = (1 - s) * (1 - t) * v[0] + s * (1 - t) * v[1] + s * t * v[2] + (1 - s) * t * v[3];
        const Vec3 xs = (1 - t) * (v[1] - v[0]) + t * (v[2] - v[3]);
        const Vec3 xt = (1 - s) * (v[3] - v[0]) + s * (v[2] - v[1]);
        jac = xs.cross(xt).norm();
      } else {
        // Collapsed square: x = v0 + s (v1 - v0) + s t (v2 - v1).
        x = v[0] + s * (v[1] - v[0]) + s * t * (v[2] - v[1]);
        jac = s * (v[1] - v[0]).cross(v[2] - v[1]).norm();
      }
      out[n++] = {x.x(), x.y(), x.z(), kGaussWeights[i] * kGaussWeights[j] * jac};
    }
  return out;
}

BemBasis::BemBasis(std::vector<MeshedPanel> panels, std::vector<ElectrodeInfo> electrodes,
                   double length_scale, std::string name, const BemOptions& options)
    : electrodes_(std::move(electrodes)), scale_(length_scale), name_(std::move(name)),
      options_(options) {
  if (panels.empty()) throw DomainError("BEM: no panels");
  geometry_.reserve(panels.size());
  owner_.reserve(panels.size());
  for (const auto& mp : panels) {
    if (mp.electrode >= electrodes_.size()) throw DomainError("BEM: panel owner out of range");
    geometry_.emplace_back(mp.panel);
    owner_.push_back(mp.electrode);
  }
  const std::size_t n = geometry_.size();
  qx_.resize(n * kQuadraturePoints);
  qy_.resize(n * kQuadraturePoints);
  qz_.resize(n * kQuadraturePoints);
  qw_.resize(n * kQuadraturePoints);
  for (std::size_t j = 0; j < n; ++j) {
    const auto q = panel_quadrature(geometry_[j]);
    for (int m = 0; m < kQuadraturePoints; ++m) {
      const std::size_t idx = j * kQuadraturePoints + m;
      qx_[idx] = q[m][0];
      qy_[idx] = q[m][1];
      qz_[idx] = q[m][2];
      qw_[idx] = q[m][3];
    }
  }
  assemble_and_solve();
}

std::vector<std::size_t> BemBasis::near_panels(const Vec3& r) const {
  std::vector<std::size_t> near;
  for (std::size_t j = 0; j < geometry_.size(); ++j) {
    const double lim = options_.near_factor * geometry_[j].diameter;
    if ((r - geometry_[j].centroid).squaredNorm() < lim * lim) near.push_back(j);
  }
  return near;
}

void BemBasis::assemble_and_solve() {
  const std::size_t n = geometry_.size();
  const std::size_t k_count = electrodes_.size();

  auto row_entry = [this](std::size_t i, std::size_t j) {
    const Vec3& c = geometry_[i].centroid;
    const PanelGeometry& pj = geometry_[j];
    const double lim = options_.near_factor * pj.diameter;
    if ((c - pj.centroid).squaredNorm() < lim * lim) return panel_integral(pj, c);
    const std::size_t off = j * kQuadraturePoints;
    const simd::SourceView src{{&qx_[off], kQuadraturePoints},
                               {&qy_[off], kQuadraturePoints},
                               {&qz_[off], kQuadraturePoints},
                               {&qw_[off], kQuadraturePoints}};
    return simd::potential_sum(src, c.x(), c.y(), c.z());
  };

  auto parallel_rows = [&](auto&& body) {
    const unsigned workers = std::max(1u, options_.workers);
    if (workers == 1) {
      for (std::size_t i = 0; i < n; ++i) body(i);
      return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) body(i);
      });
    for (auto& t : pool) t.join();
  };

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(k_count));
  for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i), owner_[i]) = 1.0;

  if (n <= options_.dense_limit) {
    Eigen::MatrixXd P(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_rows([&](std::size_t i) {
      for (std::size_t j = 0; j < n; ++j)
        P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row_entry(i, j);
    });
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(P);
    rcond_ = lu.rcond();
    if (!std::isfinite(rcond_) || rcond_ < 1e-13) {
      std::ostringstream msg;
      msg << "BEM collocation matrix is singular or ill-conditioned (rcond estimate " << rcond_
          << ", " << n << " panels)";
      throw NumericalError(msg.str());
    }
    scaled_ = lu.solve(rhs);
    method_ = "dense LU";
  } else {
    // Matrix-free Jacobi-preconditioned BiCGSTAB; rows are rebuilt per product.
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) diag(static_cast<Eigen::Index>(i)) = row_entry(i, i);
    auto apply = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd y(static_cast<Eigen::Index>(n));
      parallel_rows([&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row_entry(i, j) * x(static_cast<Eigen::Index>(j));
        y(static_cast<Eigen::Index>(i)) = acc;
      });
      return y;
    };
    scaled_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k_count));
    for (std::size_t k = 0; k < k_count; ++k) {
      const Eigen::VectorXd b = rhs.col(static_cast<Eigen::Index>(k));
      Eigen::VectorXd x = b.cwiseQuotient(diag);
      Eigen::VectorXd r = b - apply(x);
      const Eigen::VectorXd r_hat = r;
      double rho = 1, alpha = 1, omega = 1;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size()), p = v;
      const double bnorm = b.norm();
      int it = 0;
      for (; it < options_.max_iterations && r.norm() > options_.iterative_tolerance * bnorm; ++it) {
        const double rho_new = r_hat.dot(r);
        if (rho_new == 0.0) throw NumericalError("BiCGSTAB breakdown (rho = 0)");
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p = r + beta * (p - omega * v);
        const Eigen::VectorXd y = p.cwiseQuotient(diag);
        v = apply(y);
        alpha = rho / r_hat.dot(v);
        const Eigen::VectorXd s = r - alpha * v;
        const Eigen::VectorXd z = s.cwiseQuotient(diag);
        const Eigen::VectorXd t = apply(z);
        omega = t.dot(s) / t.dot(t);
        x += alpha * y + omega * z;
        r = s - omega * t;
      }
      if (r.norm() > options_.iterative_tolerance * bnorm) {
        std::ostringstream msg;
        msg << "BEM iterative solve did not converge in " << it << " iterations (residual "
            << r.norm() / bnorm << ")";
        throw NumericalError(msg.str());
      }
      scaled_.col(static_cast<Eigen::Index>(k)) = x;
    }
    rcond_ = 0.0;
    method_ = "matrix-free BiCGSTAB";
  }

  unit_cloud_.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k)
    unit_cloud_[k] = cloud_weights(scaled_.col(static_cast<Eigen::Index>(k)));
}

std::vector<double> BemBasis::cloud_weights(const Eigen::VectorXd& s) const {
  std::vector<double> w(qw_.size());
  for (std::size_t j = 0; j < geometry_.size(); ++j)
    for (int m = 0; m < kQuadraturePoints; ++m) {
      const std::size_t idx = j * kQuadraturePoints + m;
      w[idx] = qw_[idx] * s(static_cast<Eigen::Index>(j));
    }
  return w;
}

double BemBasis::evaluate_potential(const Eigen::VectorXd& s, const std::vector<double>& w,
                                    const Vec3& r) const {
  const auto near = near_panels(r);
  double total = 0.0;
  std::size_t begin = 0;
  auto far_range = [&](std::size_t from, std::size_t to) {  // panels [from, to)
    if (to <= from) return;
    const std::size_t off = from * kQuadraturePoints, cnt = (to - from) * kQuadraturePoints;
    total += simd::potential_sum(
        {{&qx_[off], cnt}, {&qy_[off], cnt}, {&qz_[off], cnt}, {&w[off], cnt}}, r.x(), r.y(), r.z());
  };
  for (std::size_t j : near) {
    far_range(begin, j);
    total += s(static_cast<Eigen::Index>(j)) * panel_integral(geometry_[j], r);
    begin = j + 1;
  }
  far_range(begin, geometry_.size());
  return total;
}

Vec3 BemBasis::evaluate_field(const Eigen::VectorXd& s, const std::vector<double>& w,
                              const Vec3& r) const {
  const auto near = near_panels(r);
  Vec3 total = Vec3::Zero();
  std::size_t begin = 0;
  auto far_range = [&](std::size_t from, std::size_t to) {
    if (to <= from) return;
    const std::size_t off = from * kQuadraturePoints, cnt = (to - from) * kQuadraturePoints;
    const auto e = simd::field_sum(
        {{&qx_[off], cnt}, {&qy_[off], cnt}, {&qz_[off], cnt}, {&w[off], cnt}}, r.x(), r.y(), r.z());
    total += Vec3(e[0], e[1], e[2]);
  };
  for (std::size_t j : near) {
    far_range(begin, j);
    total -= s(static_cast<Eigen::Index>(j)) * panel_integral_gradient(geometry_[j], r);
    begin = j + 1;
  }
  far_range(begin, geometry_.size());
  return total;
}

double BemBasis::potential(std::size_t k, const Vec3& r) const {
  return evaluate_potential(scaled_.col(static_cast<Eigen::Index>(k)), unit_cloud_.at(k), r);
}

Vec3 BemBasis::field(std::size_t k, const Vec3& r) const {
  return evaluate_field(scaled_.col(static_cast<Eigen::Index>(k)), unit_cloud_.at(k), r);
}

namespace {

class BemCombination final : public CombinedField {
 public:
  BemCombination(const BemBasis& basis, Eigen::VectorXd s)
      : basis_(basis), s_(std::move(s)), w_(basis.cloud_weights(s_)) {}
  double potential(const Vec3& r) const override { return basis_.evaluate_potential(s_, w_, r); }
  Vec3 field(const Vec3& r) const override { return basis_.evaluate_field(s_, w_, r); }

 private:
  const BemBasis& basis_;
  Eigen::VectorXd s_;
  std::vector<double> w_;
};

}  // namespace

std::unique_ptr<CombinedField> BemBasis::combine(std::span<const double> weights) const {
  if (weights.size() != size()) throw DomainError("weight vector length does not match basis size");
  Eigen::VectorXd s = Eigen::VectorXd::Zero(scaled_.rows());
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (weights[k] != 0.0) s += weights[k] * scaled_.col(static_cast<Eigen::Index>(k));
  return std::make_unique<BemCombination>(*this, std::move(s));
}

bool BemBasis::near_surface(const Vec3& r) const {
  for (const auto& p : geometry_)
    if ((r - p.centroid).squaredNorm() < p.diameter * p.diameter) return true;
  return false;
}

Provenance BemBasis::provenance() const {
  Provenance p;
  p.kind = "bem";
  p.description = name_;
  p.panel_count = geometry_.size();
  p.min_panel_area = std::numeric_limits<double>::infinity();
  for (const auto& g : geometry_) {
    p.min_panel_area = std::min(p.min_panel_area, g.area);
    p.max_panel_area = std::max(p.max_panel_area, g.area);
  }
  p.condition_estimate = rcond_;
  p.solve_method = method_;
  return p;
}

Eigen::VectorXd BemBasis::charge_density(std::size_t k) const {
  return kFourPiEps0 * scaled_.col(static_cast<Eigen::Index>(k));
}

Eigen::MatrixXd BemBasis::capacitance_matrix() const {
  const auto k_count = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k_count, k_count);
  for (std::size_t j = 0; j < geometry_.size(); ++j)
    for (Eigen::Index l = 0; l < k_count; ++l)
      C(static_cast<Eigen::Index>(owner_[j]), l) +=
          kFourPiEps0 * scaled_(static_cast<Eigen::Index>(j), l) * geometry_[j].area;
  return C;
}

double BemBasis::total_charge(std::size_t k) const {
  double q = 0.0;
  for (std::size_t j = 0; j < geometry_.size(); ++j)
    q += kFourPiEps0 * scaled_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) *
         geometry_[j].area;
  return q;
}

std::shared_ptr<const BemBasis> solve_bem(const ElectrodeSystem& system, std::size_t target_panels,
                                          const BemOptions& options) {
  if (target_panels < 100 || target_panels > 100000)
    throw DomainError("BEM target panel count must lie in [100, 1e5]");
  system.validate();
  std::vector<ElectrodeInfo> infos;
  for (const auto& e : system.electrodes) infos.push_back({e.name, e.role});
  auto panels = mesh_system(system, target_panels);
  return std::make_shared<BemBasis>(std::move(panels), std::move(infos),
                                    system.characteristic_distance, system.name, options);
}

}  // namespace paultrap
