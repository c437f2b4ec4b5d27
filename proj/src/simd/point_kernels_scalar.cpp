#include <cmath>

#include "paultrap/simd/point_kernels.hpp"

namespace paultrap::simd::scalar {

double potential_sum(const SourceView& src, double rx, double ry, double rz) {
  double acc = 0.0;
  for (std::size_t j = 0; j < src.size(); ++j) {
    const double dx = rx - src.x[j], dy = ry - src.y[j], dz = rz - src.z[j];
    acc += src.w[j] / std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return acc;
}

std::array<double, 3> field_sum(const SourceView& src, double rx, double ry, double rz) {
  double ax = 0.0, ay = 0.0, az = 0.0;
  for (std::size_t j = 0; j < src.size(); ++j) {
    const double dx = rx - src.x[j], dy = ry - src.y[j], dz = rz - src.z[j];
    const double inv = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
    const double s = src.w[j] * inv * inv * inv;
    ax += s * dx;
    ay += s * dy;
    az += s * dz;
  }
  return {ax, ay, az};
}

}  // namespace paultrap::simd::scalar
