#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "paultrap/simd/point_kernels.hpp"

using namespace paultrap::simd;

namespace {

struct Cloud {
  std::vector<double> x, y, z, w;
  SourceView view() const { return {x, y, z, w}; }
};

Cloud random_cloud(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.x.push_back(u(rng));
    c.y.push_back(u(rng));
    c.z.push_back(u(rng));
    c.w.push_back(u(rng) * 1e-3);
  }
  return c;
}

}  // namespace

TEST_CASE("scalar kernel against direct sum") {
  const auto c = random_cloud(37, 1);
  double phi = 0;
  for (std::size_t i = 0; i < 37; ++i)
    phi += c.w[i] / std::sqrt(std::pow(3 - c.x[i], 2) + std::pow(0.5 - c.y[i], 2) + std::pow(-2 - c.z[i], 2));
  CHECK(scalar::potential_sum(c.view(), 3, 0.5, -2) == doctest::Approx(phi).epsilon(1e-14));
}

TEST_CASE("field kernel is minus the gradient of the potential kernel") {
  const auto c = random_cloud(20, 2);
  const double h = 1e-5;
  const auto E = scalar::field_sum(c.view(), 2.0, 1.5, 3.0);
  const double gx = (scalar::potential_sum(c.view(), 2.0 + h, 1.5, 3.0) -
                     scalar::potential_sum(c.view(), 2.0 - h, 1.5, 3.0)) / (2 * h);
  CHECK(E[0] == doctest::Approx(-gx).epsilon(1e-7));
}

TEST_CASE("vector kernels agree with scalar reference") {
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (!isa_available(isa)) continue;
    CAPTURE(isa_name(isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 16u, 101u, 4099u}) {
      const auto c = random_cloud(n, 7 + n);
      for (int k = 0; k < 5; ++k) {
        const double rx = 2.0 + k, ry = -1.5, rz = 0.3 * k;
        const double ps = scalar::potential_sum(c.view(), rx, ry, rz);
        const auto fs = scalar::field_sum(c.view(), rx, ry, rz);
        double pv = ps;
        std::array<double, 3> fv = fs;
#ifdef PAULTRAP_HAVE_AVX2
        if (isa == Isa::Avx2) {
          pv = avx2::potential_sum(c.view(), rx, ry, rz);
          fv = avx2::field_sum(c.view(), rx, ry, rz);
        }
#endif
#ifdef PAULTRAP_HAVE_NEON
        if (isa == Isa::Neon) {
          pv = neon::potential_sum(c.view(), rx, ry, rz);
          fv = neon::field_sum(c.view(), rx, ry, rz);
        }
#endif
        const double scale = 1e-3 * static_cast<double>(n + 1);
        CHECK(std::abs(pv - ps) <= 1e-13 * scale);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(fv[i] - fs[i]) <= 1e-13 * scale);
      }
    }
  }
}

TEST_CASE("dispatch selection") {
  CHECK(isa_available(Isa::Scalar));
  const Isa before = active_isa();
  set_active_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  set_active_isa(before);
  if (!isa_available(Isa::Neon)) CHECK_THROWS_AS(set_active_isa(Isa::Neon), std::invalid_argument);
}
