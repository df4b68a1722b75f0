#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "hfslock/error.hpp"
#include "hfslock/lineshape.hpp"
#include "oracles.hpp"

using namespace hfslock;
namespace fs = std::filesystem;

namespace {

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

std::vector<double> grid(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return x;
}

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hfslock_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("lineshape") {

TEST_CASE("pure profiles reach half maximum at half width") {
  CHECK(voigt(185.0, 370.0, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(voigt(20.0, 0.0, 40.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(voigt(0.0, 370.0, 40.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(voigt(1.0, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(voigt(1.0, -5.0, 10.0), ValidationError);
}

TEST_CASE("voigt at half the estimated FWHM") {
  const double fw = voigt_fwhm(380.0, 40.0);
  CHECK(fw == doctest::Approx(401.8).epsilon(0.1 / 401.8));
  CHECK(voigt(0.5 * fw, 380.0, 40.0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(oracle::voigt_convolution(0.5 * fw, 380.0, 40.0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(voigt_fwhm(370.0, 0.0) == 370.0);
  CHECK(voigt_fwhm(0.0, 40.0) == doctest::Approx(40.0).epsilon(1e-5));
}

TEST_CASE("estimated FWHM matches the numerical width of the convolution") {
  for (const auto& [g, l] : {std::pair{380.0, 40.0}, {355.0, 35.0}, {200.0, 200.0}, {50.0, 300.0}}) {
    const double est = voigt_fwhm(g, l);
    // Bisection on the quadrature oracle for the half-maximum point.
    double lo = 0.0, hi = est;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (oracle::voigt_convolution(mid, g, l) > 0.5 ? lo : hi) = mid;
    }
    CHECK(est == doctest::Approx(2.0 * lo).epsilon(2e-4));
  }
}

TEST_CASE("voigt matches numerical convolution to 1e-6 relative out to 50 FWHM") {
  for (const auto& [g, l] : {std::pair{370.0, 40.0}, {355.0, 35.0}, {100.0, 400.0}, {400.0, 2.0}, {300.0, 300.0}}) {
    const double fw = voigt_fwhm(g, l);
    for (double u : {0.0, 0.1, 0.37, 0.5, 0.8, 1.0, 1.5, 2.3, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0, 50.0}) {
      const double x = u * fw;
      const double want = oracle::voigt_convolution(x, g, l);
      INFO("g=", g, " l=", l, " x=", x);
      CHECK(std::abs(voigt(x, g, l) - want) <= 1e-6 * want);
    }
  }
}

TEST_CASE("voigt is even and decreasing away from the centre") {
  oracle::Gen gen(17);
  for (int n = 0; n < 200; ++n) {
    const double g = gen.uniform(0.0, 500.0), l = gen.uniform(1e-3, 300.0);
    const double x = gen.uniform(0.0, 40.0 * voigt_fwhm(g, l));
    CHECK(std::abs(voigt(x, g, l) - voigt(-x, g, l)) <= 1e-12 * voigt(x, g, l));
  }
  for (const auto& [g, l] : {std::pair{370.0, 40.0}, {10.0, 400.0}, {400.0, 0.5}, {370.0, 0.0}}) {
    double prev = voigt(0.0, g, l);
    for (double x = 0.5; x < 30.0 * voigt_fwhm(g, l); x += 0.5) {
      const double v = voigt(x, g, l);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("doppler width") {
  const double w = doppler_fwhm(1115.0, 473.15, 140.9077);
  CHECK(w == doctest::Approx(353.0).epsilon(1.0 / 353.0));
  CHECK(w >= 350.0);
  CHECK(w <= 400.0);
  CHECK(doppler_fwhm(1115.0, 4 * 473.15, 140.9077) == 2.0 * w);
  CHECK(doppler_fwhm(557.5, 473.15, 140.9077) == 2.0 * w);
  CHECK_THROWS_AS(doppler_fwhm(0.0, 300, 140), ValidationError);
  CHECK_THROWS_AS(doppler_fwhm(1115.0, -1, 140), ValidationError);
  CHECK_THROWS_AS(doppler_fwhm(1115.0, 300, 0), ValidationError);
}

TEST_CASE("doppler width matches a Monte-Carlo velocity histogram") {
  const double mc = oracle::doppler_fwhm_monte_carlo(1115.0, 450.0, 140.9077, 1'000'000, 4242);
  CHECK(doppler_fwhm(1115.0, 450.0, 140.9077) == doctest::Approx(mc).epsilon(0.01));
}

TEST_CASE("synthesis of simple models") {
  SpectrumModel m;
  m.gaussian_fwhm = 370;
  m.lorentzian_fwhm = 40;
  m.baseline_offset = 0.3;
  m.baseline_slope = 1e-4;
  m.cog = 100;
  const auto axis = grid(-3000, 3000, 1201);
  const auto flat = synthesize(m, axis);
  for (std::size_t k = 0; k < axis.size(); ++k) CHECK(flat.lif[k] == m.baseline(axis[k]));
  CHECK(flat.frequency_axis_valid);

  m.components = {HfsComponent{h(2), h(4), 250.0, 1.0, true}};
  m.baseline_slope = 0.0;
  const auto one = synthesize(m, axis);
  const auto peak = std::max_element(one.lif.begin(), one.lif.end()) - one.lif.begin();
  CHECK(std::abs(axis[static_cast<std::size_t>(peak)] - 350.0) <= axis[1] - axis[0]);
}

TEST_CASE("flag pattern of six dominant peaks") {
  SpectrumModel m;
  m.components = enumerate_components(h(5), h(7), h(9), HfsConstants{730, 0}, HfsConstants{300, 0});
  m.gaussian_fwhm = 150;
  m.lorentzian_fwhm = 15;
  const auto axis = grid(-9000, 9000, 18001);
  const auto t = synthesize(m, axis);
  std::vector<std::pair<double, double>> peaks;  // height, position
  for (std::size_t k = 1; k + 1 < t.size(); ++k)
    if (t.lif[k] > t.lif[k - 1] && t.lif[k] >= t.lif[k + 1]) peaks.emplace_back(t.lif[k], axis[k]);
  REQUIRE(peaks.size() >= 6);
  std::sort(peaks.rbegin(), peaks.rend());
  peaks.resize(6);
  std::vector<const HfsComponent*> diag;
  for (const auto& c : m.components)
    if (c.diagonal) diag.push_back(&c);
  REQUIRE(diag.size() == 6);
  for (const auto* c : diag) {
    // F=3->4 sits 90 MHz from a weak neighbour that pulls its maximum by a few MHz.
    const bool found = std::any_of(peaks.begin(), peaks.end(), [&](auto& p) { return std::abs(p.second - c->offset) <= 10.0; });
    CHECK(found);
  }
  std::sort(peaks.begin(), peaks.end(), [](auto& a, auto& b) { return a.second < b.second; });
  const bool rising = peaks[1].first > peaks[0].first;
  for (std::size_t k = 1; k < peaks.size(); ++k) CHECK((peaks[k].first > peaks[k - 1].first) == rising);
}

TEST_CASE("synthesis is linear in the amplitude") {
  SpectrumModel m;
  m.components = enumerate_components(h(5), h(7), h(9), HfsConstants{730, -20}, HfsConstants{640, 10});
  m.gaussian_fwhm = 370;
  m.lorentzian_fwhm = 40;
  const auto axis = grid(-6000, 6000, 801);
  const auto base = synthesize(m, axis);
  for (double c : {2.0, 0.5, 8.0}) {
    SpectrumModel s = m;
    s.amplitude = c;
    const auto scaled = synthesize(s, axis);
    for (std::size_t k = 0; k < axis.size(); ++k) CHECK(scaled.lif[k] == c * base.lif[k]);
  }
  m.baseline_offset = 0.2;
  m.baseline_slope = -3e-5;
  const auto b0 = synthesize(m, axis);
  SpectrumModel s = m;
  s.amplitude = 3.7;
  const auto b1 = synthesize(s, axis);
  for (std::size_t k = 0; k < axis.size(); ++k) {
    const double base_k = m.baseline(axis[k]);
    CHECK((b1.lif[k] - base_k) == doctest::Approx(3.7 * (b0.lif[k] - base_k)).epsilon(1e-12).scale(1e-15));
  }
}

TEST_CASE("noise is reproducible for a fixed seed") {
  SpectrumModel m;
  m.components = enumerate_components(h(5), h(7), h(9), HfsConstants{730, -20}, HfsConstants{640, 10});
  m.gaussian_fwhm = 370;
  m.lorentzian_fwhm = 40;
  const auto axis = grid(-6000, 6000, 501);
  const auto a = synthesize(m, axis, GaussianNoise{0.01, 7});
  const auto b = synthesize(m, axis, GaussianNoise{0.01, 7});
  const auto c = synthesize(m, axis, GaussianNoise{0.01, 8});
  CHECK(a.lif == b.lif);
  CHECK(a.lif != c.lif);
  const auto d = std::vector<double>{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(synthesize(m, d), ValidationError);
}

TEST_CASE("model validation") {
  SpectrumModel m;
  m.gaussian_fwhm = 0;
  m.lorentzian_fwhm = 0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m.gaussian_fwhm = 100;
  m.amplitude = 0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m.amplitude = 1;
  m.components = {HfsComponent{h(2), h(4), 0.0, -0.1, true}};
  CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("trace CSV round trip") {
  Trace t;
  t.abscissa = {-1.5, 0.0, 0.1, 1e-9, 2.0};
  std::sort(t.abscissa.begin(), t.abscissa.end());
  t.lif = {0.1, 1.0 / 3.0, -2.5e-7, 4.0, 5.25};
  t.frequency_axis_valid = true;
  const auto p = temp_file("round.csv");
  write_trace_csv(t, p);
  const auto r = read_trace_csv(p);
  CHECK(r.abscissa == t.abscissa);
  CHECK(r.lif == t.lif);
  CHECK_FALSE(r.fpi.has_value());
  CHECK(r.frequency_axis_valid);

  t.fpi = std::vector<double>{1, 2, 3, 4, 5};
  t.frequency_axis_valid = false;
  write_trace_csv(t, p);
  const auto r2 = read_trace_csv(p);
  REQUIRE(r2.fpi.has_value());
  CHECK(*r2.fpi == *t.fpi);
  CHECK_FALSE(r2.frequency_axis_valid);
}

TEST_CASE("trace CSV errors carry the line") {
  const auto p = temp_file("bad.csv");
  {
    std::ofstream out(p);
    out << "abscissa,lif,fpi\n0,1,\n1,x,\n";
  }
  try {
    read_trace_csv(p);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 2);
  }
  {
    std::ofstream out(p);
    out << "abscissa,lif,fpi\n0,1,\n0,2,\n";
  }
  CHECK_THROWS_AS(read_trace_csv(p), ValidationError);
  {
    std::ofstream out(p);
    out << "x,y\n";
  }
  CHECK_THROWS_AS(read_trace_csv(p), ParseError);
}

}
