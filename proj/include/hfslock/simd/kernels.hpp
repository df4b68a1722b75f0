#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference and,
// on x86-64, an AVX2/FMA variant; the variant is chosen once at runtime from
// CPUID and can be overridden (tests pin both and compare them).

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace hfslock::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Best instruction set supported by both the build and the running CPU.
Isa detected_isa() noexcept;

/// Instruction set currently used by the dispatching entry points.
Isa active_isa() noexcept;

/// Pin the dispatch target. Throws ValidationError if `isa` is unavailable.
void set_active_isa(Isa isa);

/// Whether `isa` was compiled in and is supported by this CPU.
bool isa_available(Isa isa) noexcept;

/// Precomputed scaling of a unit-peak Voigt profile.
///
/// For the mixed case the profile is Re w(u + i a) / Re w(i a) with
/// u = 2 sqrt(ln 2) x / gaussian_fwhm and a = sqrt(ln 2) lorentzian_fwhm / gaussian_fwhm.
struct VoigtShape {
  enum class Kind { voigt, gaussian, lorentzian };
  Kind kind = Kind::voigt;
  double scale = 0.0;      // u per MHz (or 2/FWHM for the pure shapes)
  double damping = 0.0;    // a
  double peak_norm = 0.0;  // 1 / Re w(i a)
};

/// Complex probability (Faddeeva) function w(x + i y) for y >= 0.
std::complex<double> faddeeva(double x, double y) noexcept;

/// Re w(x + i y), y >= 0, with relative accuracy better than 1e-6
/// (including the far wings where the real part is tiny).
double faddeeva_real(double x, double y) noexcept;

/// out[k] = profile(x[k] - center). Sizes must match.
void voigt_profile(std::span<const double> x, double center, const VoigtShape& shape, std::span<double> out);

/// sum_k a[k] * b[k]
double dot(std::span<const double> a, std::span<const double> b);

namespace detail {

void voigt_profile_scalar(const double* x, std::size_t n, double center, const VoigtShape& shape, double* out);
double dot_scalar(const double* a, const double* b, std::size_t n);

#if defined(HFSLOCK_HAVE_AVX2)
void voigt_profile_avx2(const double* x, std::size_t n, double center, const VoigtShape& shape, double* out);
double dot_avx2(const double* a, const double* b, std::size_t n);
#endif

}  // namespace detail

}  // namespace hfslock::simd
