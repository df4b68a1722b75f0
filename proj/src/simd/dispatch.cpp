#include <atomic>

#include "hfslock/error.hpp"
#include "hfslock/simd/kernels.hpp"

namespace hfslock::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(HFSLOCK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

Isa detected_isa() noexcept { return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) throw ValidationError("instruction set '" + std::string(isa_name(isa)) + "' is not available");
  active().store(isa, std::memory_order_relaxed);
}

void voigt_profile(std::span<const double> x, double center, const VoigtShape& shape, std::span<double> out) {
  if (x.size() != out.size()) throw ValidationError("voigt_profile: input and output sizes differ");
#if defined(HFSLOCK_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    detail::voigt_profile_avx2(x.data(), x.size(), center, shape, out.data());
    return;
  }
#endif
  detail::voigt_profile_scalar(x.data(), x.size(), center, shape, out.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("dot: sizes differ");
#if defined(HFSLOCK_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return detail::dot_avx2(a.data(), b.data(), a.size());
#endif
  return detail::dot_scalar(a.data(), b.data(), a.size());
}

}  // namespace hfslock::simd
