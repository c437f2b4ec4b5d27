// Compiled with -mavx2 -mfma; only reached when the CPU reports both.
#include <immintrin.h>

#include <cmath>

#include "paultrap/simd/point_kernels.hpp"

namespace paultrap::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double potential_sum(const SourceView& src, double rx, double ry, double rz) {
  const std::size_t n = src.size();
  const __m256d vrx = _mm256_set1_pd(rx), vry = _mm256_set1_pd(ry), vrz = _mm256_set1_pd(rz);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vrx, _mm256_loadu_pd(&src.x[j]));
    const __m256d dy = _mm256_sub_pd(vry, _mm256_loadu_pd(&src.y[j]));
    const __m256d dz = _mm256_sub_pd(vrz, _mm256_loadu_pd(&src.z[j]));
    __m256d r2 = _mm256_mul_pd(dx, dx);
    r2 = _mm256_fmadd_pd(dy, dy, r2);
    r2 = _mm256_fmadd_pd(dz, dz, r2);
    const __m256d inv = _mm256_div_pd(one, _mm256_sqrt_pd(r2));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(&src.w[j]), inv, acc);
  }
  double total = hsum(acc);
  for (; j < n; ++j) {
    const double dx = rx - src.x[j], dy = ry - src.y[j], dz = rz - src.z[j];
    total += src.w[j] / std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return total;
}

std::array<double, 3> field_sum(const SourceView& src, double rx, double ry, double rz) {
  const std::size_t n = src.size();
  const __m256d vrx = _mm256_set1_pd(rx), vry = _mm256_set1_pd(ry), vrz = _mm256_set1_pd(rz);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d ax = _mm256_setzero_pd(), ay = _mm256_setzero_pd(), az = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vrx, _mm256_loadu_pd(&src.x[j]));
    const __m256d dy = _mm256_sub_pd(vry, _mm256_loadu_pd(&src.y[j]));
    const __m256d dz = _mm256_sub_pd(vrz, _mm256_loadu_pd(&src.z[j]));
    __m256d r2 = _mm256_mul_pd(dx, dx);
    r2 = _mm256_fmadd_pd(dy, dy, r2);
    r2 = _mm256_fmadd_pd(dz, dz, r2);
    const __m256d inv = _mm256_div_pd(one, _mm256_sqrt_pd(r2));
    const __m256d s =
        _mm256_mul_pd(_mm256_loadu_pd(&src.w[j]), _mm256_mul_pd(inv, _mm256_mul_pd(inv, inv)));
    ax = _mm256_fmadd_pd(s, dx, ax);
    ay = _mm256_fmadd_pd(s, dy, ay);
    az = _mm256_fmadd_pd(s, dz, az);
  }
  std::array<double, 3> out{hsum(ax), hsum(ay), hsum(az)};
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

}  // namespace paultrap::simd::avx2
