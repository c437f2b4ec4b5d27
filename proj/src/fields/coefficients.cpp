#include "paultrap/fields/coefficients.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace paultrap {

namespace {

Eigen::Matrix3d hessian_at_step(const CombinedField& f, const Vec3& c, double h) {
  auto at = [&](int i, double si, int j, double sj) {
    Vec3 r = c;
    r[i] += si * h;
    r[j] += sj * h;
    return f.potential(r);
  };
  const double f0 = f.potential(c);
  Eigen::Matrix3d H;
  for (int i = 0; i < 3; ++i) {
    auto p = [&](double s) {
      Vec3 r = c;
      r[i] += s * h;
      return f.potential(r);
    };
    H(i, i) = (-p(2) + 16 * p(1) - 30 * f0 + 16 * p(-1) - p(-2)) / (12 * h * h);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double v =
          (8 * (at(i, 1, j, -2) + at(i, 2, j, -1) + at(i, -2, j, 1) + at(i, -1, j, 2)) -
           8 * (at(i, -1, j, -2) + at(i, -2, j, -1) + at(i, 1, j, 2) + at(i, 2, j, 1)) -
           (at(i, 2, j, -2) + at(i, -2, j, 2) - at(i, -2, j, -2) - at(i, 2, j, 2)) +
           64 * (at(i, -1, j, -1) + at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1))) /
          (144 * h * h);
      H(i, j) = H(j, i) = v;
    }
  return H;
}

struct Principal {
  std::array<double, 3> values;
  std::array<Vec3, 3> axes;
};

// Eigen-decomposition sorted by decreasing |eigenvalue|; each axis is signed
// so that its largest component is positive.
Principal principal(const Eigen::Matrix3d& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  Principal p;
  for (int i = 0; i < 3; ++i) {
    p.values[i] = es.eigenvalues()(order[i]);
    Vec3 v = es.eigenvectors().col(order[i]);
    Eigen::Index idx;
    v.cwiseAbs().maxCoeff(&idx);
    if (v(idx) < 0) v = -v;
    p.axes[i] = v;
  }
  return p;
}

double trace_residual(const Principal& p) {
  const double scale = std::abs(p.values[0]);
  if (scale == 0.0) return 0.0;
  return std::abs(p.values[0] + p.values[1] + p.values[2]) / scale;
}

}  // namespace

Eigen::Matrix3d finite_difference_hessian(const CombinedField& field, const Vec3& center,
                                          double length_scale, double* chosen_step) {
  constexpr int kLadder = 7;
  std::array<Eigen::Matrix3d, kLadder> H;
  std::array<double, kLadder> steps;
  for (int k = 0; k < kLadder; ++k) {
    steps[k] = length_scale * 0.2 * std::pow(0.5, k);
    H[k] = hessian_at_step(field, center, steps[k]);
  }
  int best = 0;
  double best_diff = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < kLadder; ++k) {
    const double diff = (H[k] - H[k + 1]).norm();
    if (diff < best_diff) {
      best_diff = diff;
      best = k + 1;
    }
  }
  if (chosen_step) *chosen_step = steps[best];
  return H[best];
}

QuadrupoleCoefficients quadrupole_coefficients(const FieldBasis& basis,
                                               std::span<const double> rf_weights,
                                               std::span<const double> dc_weights,
                                               const Vec3& center) {
  if (basis.near_surface(center))
    throw AccuracyError("quadrupole expansion point lies on or next to an electrode");
  QuadrupoleCoefficients out;
  out.center = center;
  const auto rf = basis.combine(rf_weights);
  out.rf_hessian = finite_difference_hessian(*rf, center, basis.length_scale(), &out.step);
  const bool any_dc =
      std::any_of(dc_weights.begin(), dc_weights.end(), [](double w) { return w != 0.0; });
  if (any_dc) {
    const auto dc = basis.combine(dc_weights);
    out.dc_hessian = finite_difference_hessian(*dc, center, basis.length_scale());
  }

  const Principal prf = principal(out.rf_hessian);
  const Principal pdc = principal(out.dc_hessian);
  out.axes = prf.axes;
  out.rf = prf.values;
  out.dc_principal = pdc.values;
  out.dc_axes = pdc.axes;
  for (int i = 0; i < 3; ++i) out.dc[i] = out.axes[i].dot(out.dc_hessian * out.axes[i]);
  out.rf_trace_residual = trace_residual(prf);
  out.dc_trace_residual = trace_residual(pdc);

  // Rotation needed to diagonalise each 2x2 block of the static tensor in the
  // RF frame; zero for degenerate static eigenvalues with no coupling.
  Eigen::Matrix3d R;
  for (int i = 0; i < 3; ++i) R.col(i) = out.axes[i];
  const Eigen::Matrix3d S = R.transpose() * out.dc_hessian * R;
  double worst = 0.0;
  const double s_scale = S.cwiseAbs().maxCoeff();
  if (s_scale > 0.0)
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        if (std::abs(S(i, j)) < 1e-9 * s_scale) continue;
        const double angle = 0.5 * std::atan2(2.0 * std::abs(S(i, j)), std::abs(S(i, i) - S(j, j)));
        worst = std::max(worst, angle);
      }
  out.frame_misalignment_deg = worst * 180.0 / std::numbers::pi;

  if (out.rf_trace_residual > 1e-2) {
    std::ostringstream msg;
    msg << "RF curvature tensor violates Laplace: |trace|/max|eig| = " << out.rf_trace_residual
        << " (mesh too coarse?)";
    throw AccuracyError(msg.str());
  }
  return out;
}

NullSearchResult rf_null(const FieldBasis& basis, std::span<const double> rf_weights,
                         const Vec3& guess, int max_iterations) {
  const auto field = basis.combine(rf_weights);
  const double scale = basis.length_scale();
  const double h = 1e-3 * scale;
  NullSearchResult out;
  Vec3 r = guess;
  Vec3 E = field->field(r);
  out.trace.push_back(r);

  auto jacobian = [&](const Vec3& at) {
    Eigen::Matrix3d J;
    for (int j = 0; j < 3; ++j) {
      Vec3 p = at, m = at;
      p[j] += h;
      m[j] -= h;
      J.col(j) = (field->field(p) - field->field(m)) / (2 * h);
    }
    return J;
  };

  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::Matrix3d J = jacobian(r);
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues()(0);
    if (smax == 0.0) break;
    svd.setThreshold(1e-4);
    const Vec3 step = -svd.solve(E);
    // Converged when the Newton step is negligible compared to the geometry.
    if (step.norm() < 1e-12 * scale) {
      out.position = r;
      out.residual_field = E.norm();
      return out;
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Vec3 trial = r + alpha * step;
      const Vec3 Et = field->field(trial);
      if (Et.squaredNorm() <= E.squaredNorm()) {
        r = trial;
        E = Et;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    out.trace.push_back(r);
    if (!accepted || E.norm() <= 1e-13 * smax * scale) {
      out.position = r;
      out.residual_field = E.norm();
      return out;
    }
  }
  std::ostringstream msg;
  msg << "RF null search did not converge after " << max_iterations << " iterations; trace:";
  for (const auto& p : out.trace) msg << " (" << p.x() << "," << p.y() << "," << p.z() << ")";
  throw NumericalError(msg.str());
}

}  // namespace paultrap
