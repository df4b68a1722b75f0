// Portable reference kernels. The AVX2 variants must agree with these.

#include <cmath>

#include "faddeeva_coeffs.hpp"
#include "hfslock/simd/kernels.hpp"

namespace hfslock::simd {

namespace {

using namespace detail;

struct Cplx {
  double re;
  double im;
};

inline Cplx mul(Cplx a, Cplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }

inline Cplx div(Cplx a, Cplx b) {
  const double inv = 1.0 / (b.re * b.re + b.im * b.im);
  return {(a.re * b.re + a.im * b.im) * inv, (a.im * b.re - a.re * b.im) * inv};
}

// Weideman approximation, accurate to ~1e-15 absolute near the origin.
Cplx w_rational(double x, double y) {
  const Cplx lmiz{weideman_l + y, -x};  // L - iz
  const Cplx lpiz{weideman_l - y, x};   // L + iz
  const Cplx zz = div(lpiz, lmiz);
  Cplx p{weideman_coeffs[0], 0.0};
  for (int k = 1; k < weideman_terms; ++k) {
    p = mul(p, zz);
    p.re += weideman_coeffs[k];
  }
  const Cplx inv = div({1.0, 0.0}, lmiz);
  const Cplx inv2 = mul(inv, inv);
  return {2.0 * (p.re * inv2.re - p.im * inv2.im) + inv_sqrt_pi * inv.re,
          2.0 * (p.re * inv2.im + p.im * inv2.re) + inv_sqrt_pi * inv.im};
}

// Laplace continued fraction, relative accuracy ~1e-15 for |z| >= 8.
Cplx w_continued_fraction(double x, double y) {
  double rr = 0.0, ri = 0.0;
  for (int k = continued_fraction_depth; k >= 1; --k) {
    const double dr = x - rr, di = y - ri;
    const double s = 0.5 * k / (dr * dr + di * di);
    rr = s * dr;
    ri = -s * di;
  }
  const double dr = x - rr, di = y - ri;
  const double s = inv_sqrt_pi / (dr * dr + di * di);
  return {s * di, s * dr};
}

Cplx w_any(double x, double y) {
  return std::abs(x) + y < weideman_radius ? w_rational(x, y) : w_continued_fraction(x, y);
}

}  // namespace

std::complex<double> faddeeva(double x, double y) noexcept {
  const Cplx w = w_any(x, y);
  return {w.re, w.im};
}

double faddeeva_real(double x, double y) noexcept {
  if (y < small_damping) {
    // Re w(x+iy) = exp(-x^2) + y (2x Im w(x) - 2/sqrt(pi)) + O(y^2)
    const double im0 = w_any(x, 0.0).im;
    return std::exp(-x * x) + y * (2.0 * x * im0 - 2.0 * inv_sqrt_pi);
  }
  return w_any(x, y).re;
}

namespace detail {

void voigt_profile_scalar(const double* x, std::size_t n, double center, const VoigtShape& shape, double* out) {
  switch (shape.kind) {
    case VoigtShape::Kind::gaussian:
      for (std::size_t k = 0; k < n; ++k) {
        const double u = (x[k] - center) * shape.scale;
        out[k] = std::exp(-u * u);
      }
      return;
    case VoigtShape::Kind::lorentzian:
      for (std::size_t k = 0; k < n; ++k) {
        const double u = (x[k] - center) * shape.scale;
        out[k] = 1.0 / (1.0 + u * u);
      }
      return;
    case VoigtShape::Kind::voigt:
      for (std::size_t k = 0; k < n; ++k)
        out[k] = shape.peak_norm * faddeeva_real((x[k] - center) * shape.scale, shape.damping);
      return;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

}  // namespace detail

}  // namespace hfslock::simd
