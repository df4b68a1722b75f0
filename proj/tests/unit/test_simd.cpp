#include <doctest.h>

#include <cmath>
#include <complex>

#include "hfslock/error.hpp"
#include "hfslock/lineshape.hpp"
#include "hfslock/simd/kernels.hpp"
#include "oracles.hpp"

using namespace hfslock;
using namespace hfslock::simd;

namespace {

// Restores the dispatch target when a test pins it.
struct IsaGuard {
  Isa saved = active_isa();
  ~IsaGuard() { set_active_isa(saved); }
};

std::vector<double> random_axis(oracle::Gen& g, std::size_t n, double span) {
  std::vector<double> x(n);
  for (auto& v : x) v = g.uniform(-span, span);
  return x;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("dispatch reports a usable instruction set") {
  CHECK(isa_available(Isa::scalar));
  CHECK(isa_available(detected_isa()));
  CHECK(isa_name(Isa::scalar) == "scalar");
  CHECK(isa_name(Isa::avx2) == "avx2");
  IsaGuard guard;
  set_active_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  if (!isa_available(Isa::avx2)) CHECK_THROWS_AS(set_active_isa(Isa::avx2), ValidationError);
}

TEST_CASE("faddeeva function reference values") {
  CHECK(std::real(faddeeva(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-13));
  for (double x : {0.3, 1.0, 2.5, 5.0}) CHECK(faddeeva_real(x, 0.0) == doctest::Approx(std::exp(-x * x)).epsilon(1e-6));
  for (double y : {0.01, 0.5, 1.0, 3.0, 10.0}) {
    const double erfcx = std::exp(y * y) * std::erfc(y);
    CHECK(std::real(faddeeva(0.0, y)) == doctest::Approx(erfcx).epsilon(1e-7));
    CHECK(faddeeva_real(0.0, y) == doctest::Approx(erfcx).epsilon(1e-7));
  }
  // Large |z|: w(z) -> i / (sqrt(pi) z).
  const std::complex<double> z(40.0, 3.0);
  const auto asym = std::complex<double>(0.0, 1.0) / (std::sqrt(std::acos(-1.0)) * z);
  CHECK(std::abs(faddeeva(40.0, 3.0) - asym) <= 1e-3 * std::abs(asym));
}

TEST_CASE("scalar and vector voigt kernels agree") {
  if (!isa_available(Isa::avx2)) return;
  oracle::Gen g(123);
  for (int n = 0; n < 60; ++n) {
    const double gw = g.coin() ? g.uniform(1.0, 600.0) : 0.0;
    const double lw = (gw == 0.0 || g.coin()) ? g.uniform(1e-3, 400.0) : 0.0;
    const auto shape = make_voigt_shape(gw, lw);
    const std::size_t len = static_cast<std::size_t>(g.integer(0, 67));
    const auto x = random_axis(g, len, 60.0 * voigt_fwhm(gw, lw));
    const double centre = g.uniform(-500, 500);
    std::vector<double> a(len), b(len);
    detail::voigt_profile_scalar(x.data(), len, centre, shape, a.data());
#if defined(HFSLOCK_HAVE_AVX2)
    detail::voigt_profile_avx2(x.data(), len, centre, shape, b.data());
#endif
    for (std::size_t k = 0; k < len; ++k) {
      INFO("g=", gw, " l=", lw, " x=", x[k] - centre);
      CHECK(std::abs(a[k] - b[k]) <= 1e-13 * std::abs(a[k]) + 1e-300);
    }
  }
}

TEST_CASE("both voigt kernels meet the accuracy target") {
  IsaGuard guard;
  for (Isa isa : {Isa::scalar, Isa::avx2}) {
    if (!isa_available(isa)) continue;
    set_active_isa(isa);
    for (const auto& [gw, lw] : {std::pair{370.0, 40.0}, {50.0, 300.0}, {300.0, 1.0}}) {
      const auto shape = make_voigt_shape(gw, lw);
      std::vector<double> x;
      for (double u = -50.0; u <= 50.0; u += 0.731) x.push_back(u * voigt_fwhm(gw, lw));
      std::vector<double> out(x.size());
      voigt_profile(x, 0.0, shape, out);
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double want = oracle::voigt_convolution(x[k], gw, lw);
        CHECK(std::abs(out[k] - want) <= 1e-6 * want);
      }
    }
  }
}

TEST_CASE("scalar and vector dot products agree") {
  oracle::Gen g(7);
  for (int n = 0; n < 100; ++n) {
    const std::size_t len = static_cast<std::size_t>(g.integer(0, 3000));
    const auto a = random_axis(g, len, 1.0), b = random_axis(g, len, 1.0);
    double mag = 0.0;
    for (std::size_t k = 0; k < len; ++k) mag += std::abs(a[k] * b[k]);
    const double s = detail::dot_scalar(a.data(), b.data(), len);
    CHECK(std::abs(dot(a, b) - s) <= 1e-14 * mag + 1e-300);
#if defined(HFSLOCK_HAVE_AVX2)
    if (isa_available(Isa::avx2)) CHECK(std::abs(detail::dot_avx2(a.data(), b.data(), len) - s) <= 1e-14 * mag + 1e-300);
#endif
  }
}

TEST_CASE("spectrum evaluation is the same under either instruction set") {
  if (!isa_available(Isa::avx2)) return;
  IsaGuard guard;
  SpectrumModel m;
  m.components = enumerate_components(HalfInt::from_twice(5), HalfInt::from_twice(7), HalfInt::from_twice(9),
                                      HfsConstants{730, -20}, HfsConstants{640, 10});
  m.gaussian_fwhm = 370;
  m.lorentzian_fwhm = 40;
  m.baseline_offset = 0.05;
  std::vector<double> axis;
  for (int k = 0; k < 2001; ++k) axis.push_back(-6000 + 6.0 * k);
  set_active_isa(Isa::scalar);
  const auto a = m.evaluate(axis);
  set_active_isa(Isa::avx2);
  const auto b = m.evaluate(axis);
  for (std::size_t k = 0; k < axis.size(); ++k) CHECK(b[k] == doctest::Approx(a[k]).epsilon(1e-13));
  for (std::size_t k = 0; k < axis.size(); k += 97) CHECK(m.evaluate(axis[k]) == doctest::Approx(a[k]).epsilon(1e-13));
}

TEST_CASE("kernel rejects mismatched spans") {
  std::vector<double> x(5), out(4);
  CHECK_THROWS_AS(voigt_profile(x, 0.0, make_voigt_shape(1, 1), out), ValidationError);
  CHECK_THROWS_AS(dot(std::vector<double>(3), std::vector<double>(2)), ValidationError);
}

}
