// AArch64 Advanced SIMD variant (two doubles per register).
#include <arm_neon.h>

#include <cmath>

#include "paultrap/simd/point_kernels.hpp"

namespace paultrap::simd::neon {

double potential_sum(const SourceView& src, double rx, double ry, double rz) {
  const std::size_t n = src.size();
  const float64x2_t vrx = vdupq_n_f64(rx), vry = vdupq_n_f64(ry), vrz = vdupq_n_f64(rz);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t dx = vsubq_f64(vrx, vld1q_f64(&src.x[j]));
    const float64x2_t dy = vsubq_f64(vry, vld1q_f64(&src.y[j]));
    const float64x2_t dz = vsubq_f64(vrz, vld1q_f64(&src.z[j]));
    float64x2_t r2 = vmulq_f64(dx, dx);
    r2 = vfmaq_f64(r2, dy, dy);
    r2 = vfmaq_f64(r2, dz, dz);
    const float64x2_t inv = vdivq_f64(vdupq_n_f64(1.0), vsqrtq_f64(r2));
    acc = vfmaq_f64(acc, vld1q_f64(&src.w[j]), inv);
  }
  double total = vaddvq_f64(acc);
  for (; j < n; ++j) {
    const double dx = rx - src.x[j], dy = ry - src.y[j], dz = rz - src.z[j];
    total += src.w[j] / std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return total;
}

std::array<double, 3> field_sum(const SourceView& src, double rx, double ry, double rz) {
  const std::size_t n = src.size();
  const float64x2_t vrx = vdupq_n_f64(rx), vry = vdupq_n_f64(ry), vrz = vdupq_n_f64(rz);
  float64x2_t ax = vdupq_n_f64(0.0), ay = vdupq_n_f64(0.0), az = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t dx = vsubq_f64(vrx, vld1q_f64(&src.x[j]));
    const float64x2_t dy = vsubq_f64(vry, vld1q_f64(&src.y[j]));
    const float64x2_t dz = vsubq_f64(vrz, vld1q_f64(&src.z[j]));
    float64x2_t r2 = vmulq_f64(dx, dx);
    r2 = vfmaq_f64(r2, dy, dy);
    r2 = vfmaq_f64(r2, dz, dz);
    const float64x2_t inv = vdivq_f64(vdupq_n_f64(1.0), vsqrtq_f64(r2));
    const float64x2_t s = vmulq_f64(vld1q_f64(&src.w[j]), vmulq_f64(inv, vmulq_f64(inv, inv)));
    ax = vfmaq_f64(ax, s, dx);
    ay = vfmaq_f64(ay, s, dy);
    az = vfmaq_f64(az, s, dz);
  }
  std::array<double, 3> out{vaddvq_f64(ax), vaddvq_f64(ay), vaddvq_f64(az)};
  for (; j < n; ++j) {
    const double dx = rx - src.x[j], dy = ry - src.y[j], dz = rz - src.z[j];
    const double inv = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
    const double s = src.w[j] * inv * inv * inv;
    out[0] += s * dx;
    out[1] += s * dy;
    out[2] += s * dz;
  }
  return out;
}

}  // namespace paultrap::simd::neon
