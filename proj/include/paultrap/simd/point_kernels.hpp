#pragma once

// Point-source sums used by the boundary-element solver and its evaluators:
//
//     potential_sum(r) = sum_j w_j / |r - s_j|
//     field_sum(r)     = sum_j w_j (r - s_j) / |r - s_j|^3     (= -grad potential_sum)
//
// A scalar reference implementation is always built. Vector variants are
// compiled per ISA and picked at runtime; every variant must agree with the
// scalar kernel to rounding (see tests/test_point_kernels.cpp).

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace paultrap::simd {

/// Structure-of-arrays view of weighted source points. All spans have equal length.
struct SourceView {
  std::span<const double> x, y, z, w;
  std::size_t size() const { return w.size(); }
};

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

/// Best ISA supported by both the build and the running CPU.
Isa detect_isa();

/// ISA used by the dispatching entry points below.
Isa active_isa();

/// Overrides the dispatch (tests, benchmarking). Throws std::invalid_argument
/// if the ISA is not available on this machine.
void set_active_isa(Isa isa);

bool isa_available(Isa isa);

double potential_sum(const SourceView& src, double rx, double ry, double rz);
std::array<double, 3> field_sum(const SourceView& src, double rx, double ry, double rz);

namespace scalar {
double potential_sum(const SourceView& src, double rx, double ry, double rz);
std::array<double, 3> field_sum(const SourceView& src, double rx, double ry, double rz);
}  // namespace scalar

namespace avx2 {
double potential_sum(const SourceView& src, double rx, double ry, double rz);
std::array<double, 3> field_sum(const SourceView& src, double rx, double ry, double rz);
}  // namespace avx2

namespace neon {
double potential_sum(const SourceView& src, double rx, double ry, double rz);
std::array<double, 3> field_sum(const SourceView& src, double rx, double ry, double rz);
}  // namespace neon

}  // namespace paultrap::simd
