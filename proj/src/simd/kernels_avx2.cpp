// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// is only entered after the dispatcher has checked CPUID.

#include <immintrin.h>

#include "faddeeva_coeffs.hpp"
#include "hfslock/simd/kernels.hpp"

namespace hfslock::simd::detail {

namespace {

struct V4c {
  __m256d re;
  __m256d im;
};

inline V4c cmul(V4c a, V4c b) {
  return {_mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)), _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re))};
}

inline V4c cdiv(V4c a, V4c b) {
  const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_fmadd_pd(b.re, b.re, _mm256_mul_pd(b.im, b.im)));
  return {_mm256_mul_pd(_mm256_fmadd_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)), inv),
          _mm256_mul_pd(_mm256_fmsub_pd(a.im, b.re, _mm256_mul_pd(a.re, b.im)), inv)};
}

inline __m256d re_rational(__m256d x, __m256d y) {
  const __m256d l = _mm256_set1_pd(weideman_l);
  const V4c lmiz{_mm256_add_pd(l, y), _mm256_sub_pd(_mm256_setzero_pd(), x)};
  const V4c lpiz{_mm256_sub_pd(l, y), x};
  const V4c zz = cdiv(lpiz, lmiz);
  V4c p{_mm256_set1_pd(weideman_coeffs[0]), _mm256_setzero_pd()};
  for (int k = 1; k < weideman_terms; ++k) {
    p = cmul(p, zz);
    p.re = _mm256_add_pd(p.re, _mm256_set1_pd(weideman_coeffs[k]));
  }
  const V4c inv = cdiv({_mm256_set1_pd(1.0), _mm256_setzero_pd()}, lmiz);
  const V4c inv2 = cmul(inv, inv);
  const __m256d two_p_inv2 = _mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_fmsub_pd(p.re, inv2.re, _mm256_mul_pd(p.im, inv2.im)));
  return _mm256_fmadd_pd(_mm256_set1_pd(inv_sqrt_pi), inv.re, two_p_inv2);
}

inline __m256d re_continued_fraction(__m256d x, __m256d y) {
  __m256d rr = _mm256_setzero_pd(), ri = _mm256_setzero_pd();
  for (int k = continued_fraction_depth; k >= 1; --k) {
    const __m256d dr = _mm256_sub_pd(x, rr), di = _mm256_sub_pd(y, ri);
    const __m256d s = _mm256_div_pd(_mm256_set1_pd(0.5 * k), _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di)));
    rr = _mm256_mul_pd(s, dr);
    ri = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(s, di));
  }
  const __m256d dr = _mm256_sub_pd(x, rr), di = _mm256_sub_pd(y, ri);
  const __m256d s = _mm256_div_pd(_mm256_set1_pd(inv_sqrt_pi), _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di)));
  return _mm256_mul_pd(s, di);
}

}  // namespace

void voigt_profile_avx2(const double* x, std::size_t n, double center, const VoigtShape& shape, double* out) {
  // The pure shapes and the tiny-damping expansion stay on the scalar path.
  if (shape.kind != VoigtShape::Kind::voigt || shape.damping < small_damping) {
    voigt_profile_scalar(x, n, center, shape, out);
    return;
  }
  const __m256d c = _mm256_set1_pd(center);
  const __m256d scale = _mm256_set1_pd(shape.scale);
  const __m256d y = _mm256_set1_pd(shape.damping);
  const __m256d norm = _mm256_set1_pd(shape.peak_norm);
  const __m256d radius = _mm256_set1_pd(weideman_radius);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + k), c), scale);
    const __m256d inner = _mm256_cmp_pd(_mm256_add_pd(_mm256_and_pd(u, abs_mask), y), radius, _CMP_LT_OQ);
    const int mask = _mm256_movemask_pd(inner);
    __m256d re;
    if (mask == 0xF) {
      re = re_rational(u, y);
    } else if (mask == 0) {
      re = re_continued_fraction(u, y);
    } else {
      re = _mm256_blendv_pd(re_continued_fraction(u, y), re_rational(u, y), inner);
    }
    _mm256_storeu_pd(out + k, _mm256_mul_pd(re, norm));
  }
  if (k < n) voigt_profile_scalar(x + k, n - k, center, shape, out + k);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

}  // namespace hfslock::simd::detail
