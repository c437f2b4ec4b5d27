#include <atomic>
#include <stdexcept>
#include <string>

#include "paultrap/simd/point_kernels.hpp"

namespace paultrap::simd {

namespace {

bool cpu_has_avx2() {
#if defined(PAULTRAP_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__)) && \
    (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
    case Isa::Neon:
#if defined(PAULTRAP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("ISA not available: " + std::string(isa_name(isa)));
  active().store(isa, std::memory_order_relaxed);
}

double potential_sum(const SourceView& src, double rx, double ry, double rz) {
  switch (active_isa()) {
#if defined(PAULTRAP_HAVE_AVX2)
    case Isa::Avx2: return avx2::potential_sum(src, rx, ry, rz);
#endif
#if defined(PAULTRAP_HAVE_NEON)
    case Isa::Neon: return neon::potential_sum(src, rx, ry, rz);
#endif
    default: return scalar::potential_sum(src, rx, ry, rz);
  }
}

std::array<double, 3> field_sum(const SourceView& src, double rx, double ry, double rz) {
  switch (active_isa()) {
#if defined(PAULTRAP_HAVE_AVX2)
    case Isa::Avx2: return avx2::field_sum(src, rx, ry, rz);
#endif
#if defined(PAULTRAP_HAVE_NEON)
    case Isa::Neon: return neon::field_sum(src, rx, ry, rz);
#endif
    default: return scalar::field_sum(src, rx, ry, rz);
  }
}

}  // namespace paultrap::simd
