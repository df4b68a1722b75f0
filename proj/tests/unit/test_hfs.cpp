#include <doctest.h>

#include <cmath>
#include <map>

#include "hfslock/error.hpp"
#include "hfslock/hfs.hpp"
#include "oracles.hpp"

using namespace hfslock;

namespace {

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

Level level(double e, int twice_j, Parity p, std::optional<HfsConstants> c = std::nullopt) {
  return Level{"L", Wavenumber::from_cm1(e), h(twice_j), p, c, "test"};
}

}  // namespace

TEST_SUITE("hfs") {

TEST_CASE("half-integers parse and print exactly") {
  CHECK(HalfInt::parse("5/2").twice() == 5);
  CHECK(HalfInt::parse("3").twice() == 6);
  CHECK(HalfInt::parse("2.5").twice() == 5);
  CHECK(HalfInt::parse("0").twice() == 0);
  CHECK(h(7).str() == "7/2");
  CHECK(h(8).str() == "4");
  CHECK_THROWS_AS(HalfInt::parse("-1/2"), ValidationError);
  CHECK_THROWS_AS(HalfInt::parse("5/3"), ValidationError);
  CHECK_THROWS_AS(HalfInt::parse("2.25"), ValidationError);
  CHECK_THROWS_AS(HalfInt::parse(""), ValidationError);
  CHECK_THROWS_AS(HalfInt::from_twice(-2), ValidationError);
}

TEST_CASE("casimir shift examples") {
  // Stretched state with B = 0: K = 2IJ.
  CHECK(casimir_shift(h(5), h(9), h(14), {100.0, 0.0}) == doctest::Approx(1125.0).epsilon(1e-15));
  CHECK(casimir_shift(h(5), h(9), h(14), {1.0, 0.0}) == 11.25);
  for (int f = 2; f <= 12; f += 2) CHECK(casimir_shift(h(5), h(7), h(f), {0.0, 0.0}) == 0.0);
  CHECK(casimir_shift(h(5), h(7), h(12), {500.0, -10.0}) == doctest::Approx(4372.5).epsilon(1e-14));
}

TEST_CASE("casimir shift rejects F outside the coupling range") {
  CHECK_THROWS_AS(casimir_shift(h(5), h(7), h(14), {1, 0}), ValidationError);
  CHECK_THROWS_AS(casimir_shift(h(5), h(7), h(0), {1, 0}), ValidationError);
  CHECK_THROWS_AS(casimir_shift(h(5), h(7), h(3), {1, 0}), ValidationError);
}

TEST_CASE("quadrupole term vanishes for I or J at most 1/2") {
  CHECK(casimir_shift(h(1), h(7), h(8), {0.0, 123.0}) == 0.0);
  CHECK(casimir_shift(h(5), h(1), h(6), {0.0, 123.0}) == 0.0);
  CHECK(casimir_shift(h(5), h(0), h(5), {77.0, 123.0}) == 0.0);
}

TEST_CASE("casimir shift matches the exact rational oracle") {
  oracle::Gen g(20240611);
  for (int n = 0; n < 1000; ++n) {
    const int ti = g.integer(0, 15), tj = g.integer(0, 15);
    const int lo = std::abs(ti - tj), hi = ti + tj;
    const int tf = lo + 2 * g.integer(0, (hi - lo) / 2);
    const double a = g.uniform(-2000, 2000), b = g.uniform(-500, 500);
    const double got = casimir_shift(h(ti), h(tj), h(tf), {a, b});
    const double want = oracle::casimir_exact(ti, tj, tf, a, b);
    const double scale = std::max({std::abs(want), std::abs(a), std::abs(b)});
    INFO("I=", ti, "/2 J=", tj, "/2 F=", tf, "/2");
    CHECK(std::abs(got - want) <= 1e-9 * scale);
  }
}

TEST_CASE("sublevel counts") {
  CHECK(sublevel_count(h(5), h(7)) == 6);
  CHECK(sublevel_count(h(5), h(3)) == 4);
  CHECK(sublevel_count(h(5), h(0)) == 1);
  for (int ti = 0; ti <= 15; ++ti)
    for (int tj = 0; tj <= 15; ++tj) CHECK(static_cast<int>(f_values(h(ti), h(tj)).size()) == sublevel_count(h(ti), h(tj)));
}

TEST_CASE("state count is conserved over F") {
  for (int ti = 0; ti <= 15; ++ti)
    for (int tj = 0; tj <= 15; ++tj) {
      int states = 0;
      for (const auto f : f_values(h(ti), h(tj))) states += f.multiplicity();
      CHECK(states == (ti + 1) * (tj + 1));
    }
}

TEST_CASE("dipole centre of gravity is zero") {
  oracle::Gen g(99);
  for (int n = 0; n < 200; ++n) {
    const int ti = g.integer(1, 15), tj = g.integer(1, 15);
    const double a = g.uniform(-1000, 1000);
    double weighted = 0.0, scale = 0.0;
    for (const auto f : f_values(h(ti), h(tj))) {
      const double s = casimir_shift(h(ti), h(tj), f, {a, 0.0});
      weighted += f.multiplicity() * s;
      scale += f.multiplicity() * std::abs(s);
    }
    CHECK(std::abs(weighted) <= 1e-9 * scale);
  }
}

TEST_CASE("casimir shift is symmetric in I and J") {
  oracle::Gen g(5);
  for (int n = 0; n < 300; ++n) {
    const int ti = g.integer(0, 15), tj = g.integer(0, 15);
    const auto fs = f_values(h(ti), h(tj));
    const auto f = fs[static_cast<std::size_t>(g.integer(0, static_cast<int>(fs.size()) - 1))];
    const HfsConstants c{g.uniform(-900, 900), g.uniform(-300, 300)};
    CHECK(casimir_shift(h(ti), h(tj), f, c) == casimir_shift(h(tj), h(ti), f, c));
  }
}

TEST_CASE("component counts of the spec examples") {
  const auto count = [](int ti, int tj, int tjp) {
    const auto cs = enumerate_components(h(ti), h(tj), h(tjp));
    int diag = 0;
    for (const auto& c : cs) diag += c.diagonal;
    return std::pair<int, int>{static_cast<int>(cs.size()), diag};
  };
  CHECK(count(5, 9, 11) == std::pair{15, 6});
  CHECK(count(5, 9, 9) == std::pair{16, 6});
  CHECK(count(5, 1, 1).first == 4);
  for (const auto& c : enumerate_components(h(5), h(1), h(1))) {
    CHECK((c.f_lower.twice() == 4 || c.f_lower.twice() == 6));
    CHECK((c.f_upper.twice() == 4 || c.f_upper.twice() == 6));
  }
}

TEST_CASE("exhaustive counts for J, J' above I = 5/2") {
  for (int tj = 7; tj <= 15; ++tj)
    for (int tjp = 7; tjp <= 15; ++tjp) {
      if ((tj - tjp) % 2 != 0 || std::abs(tj - tjp) > 2) continue;
      const auto cs = enumerate_components(h(5), h(tj), h(tjp));
      int diag = 0;
      for (const auto& c : cs) diag += c.diagonal;
      CHECK(diag == 6);
      CHECK(cs.size() == (tj == tjp ? 16u : 15u));
    }
}

TEST_CASE("components are ordered, obey selection rules and carry Casimir offsets") {
  const HfsConstants lo{730, -20}, up{640, 10};
  const auto cs = enumerate_components(h(5), h(7), h(9), lo, up);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const auto& c = cs[k];
    CHECK(std::abs(c.f_upper.twice() - c.f_lower.twice()) <= 2);
    CHECK(c.f_lower.twice() + c.f_upper.twice() >= 2);
    CHECK(c.diagonal == (c.f_upper.twice() - c.f_lower.twice() == 2));
    CHECK(c.offset == casimir_shift(h(5), h(9), c.f_upper, up) - casimir_shift(h(5), h(7), c.f_lower, lo));
    if (k > 0) {
      const auto& p = cs[k - 1];
      CHECK(std::pair(p.f_lower, p.f_upper) < std::pair(c.f_lower, c.f_upper));
    }
  }
  for (const auto& c : enumerate_components(h(5), h(7), h(9))) CHECK(c.offset == 0.0);
}

TEST_CASE("enumeration rejects forbidden J pairs") {
  CHECK_THROWS_AS(enumerate_components(h(5), h(1), h(5)), ValidationError);
  CHECK_THROWS_AS(enumerate_components(h(5), h(0), h(0)), ValidationError);
}

TEST_CASE("relative intensities") {
  const Transition t(level(16502.616, 7, Parity::even), level(25442.742, 9, Parity::odd), h(5));
  double best = 0.0, sum = 0.0;
  std::pair<int, int> arg{};
  for (const auto& c : enumerate_components(t)) {
    const double w = relative_intensity(t, c.f_lower, c.f_upper);
    CHECK(w == doctest::Approx(c.rel_intensity).epsilon(1e-12));
    sum += w;
    if (w > best) {
      best = w;
      arg = {c.f_lower.twice(), c.f_upper.twice()};
    }
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(arg == std::pair{12, 14});

  const auto cs = enumerate_components(h(5), h(9), h(11));
  double min_diag = 1.0, max_off = 0.0;
  for (const auto& c : cs) {
    if (c.diagonal) min_diag = std::min(min_diag, c.rel_intensity);
    else max_off = std::max(max_off, c.rel_intensity);
  }
  CHECK(min_diag > max_off);

  CHECK_THROWS_AS(relative_intensity(t, h(12), h(8)), ValidationError);
  CHECK_THROWS_AS(relative_intensity(t, h(14), h(14)), ValidationError);
}

TEST_CASE("intensities sum to one for random transitions") {
  oracle::Gen g(31);
  for (int n = 0; n < 100; ++n) {
    const int ti = g.integer(0, 9), tj = g.integer(0, 13);
    const int tjp = tj + 2 * g.integer(tj == 0 ? 1 : -1, 1);
    if (tjp < 0 || (tj == 0 && tjp == 0)) continue;
    double sum = 0.0;
    for (const auto& c : enumerate_components(h(ti), h(tj), h(tjp))) {
      CHECK(c.rel_intensity >= 0.0);
      sum += c.rel_intensity;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("six-j symbols agree with the tabulated one-unit closed forms") {
  CHECK(wigner_6j(h(2), h(2), h(2), h(2), h(2), h(2)) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  int compared = 0;
  for (int ta = 0; ta <= 12; ++ta)
    for (int tb = 1; tb <= 12; ++tb)
      for (int tc = 1; tc <= 12; ++tc)
        for (int de = -2; de <= 2; de += 2)
          for (int df = -2; df <= 2; df += 2) {
            const int te = tc + de, tf = tb + df;
            if (te < 0 || tf < 0) continue;
            const double want = oracle::sixj_with_one(ta, tb, tc, te, tf);
            const double got = wigner_6j(h(ta), h(tb), h(tc), h(2), h(te), h(tf));
            INFO("{", ta, " ", tb, " ", tc, "; 2 ", te, " ", tf, "}/2");
            CHECK(got == doctest::Approx(want).epsilon(1e-12).scale(1e-15));
            compared += want != 0.0;
          }
  CHECK(compared > 1000);
}

TEST_CASE("six-j symmetry under column permutation") {
  oracle::Gen g(8);
  for (int n = 0; n < 300; ++n) {
    int v[6];
    for (int& x : v) x = g.integer(0, 10);
    const double base = wigner_6j(h(v[0]), h(v[1]), h(v[2]), h(v[3]), h(v[4]), h(v[5]));
    CHECK(wigner_6j(h(v[1]), h(v[0]), h(v[2]), h(v[4]), h(v[3]), h(v[5])) == doctest::Approx(base).scale(1e-15));
    CHECK(wigner_6j(h(v[0]), h(v[4]), h(v[5]), h(v[3]), h(v[1]), h(v[2])) == doctest::Approx(base).scale(1e-15));
  }
}

TEST_CASE("transition checks") {
  const auto lo = level(0.0, 9, Parity::odd);
  CHECK_NOTHROW(Transition(lo, level(8927.0, 11, Parity::even), h(5)));
  CHECK_THROWS_AS(Transition(lo, level(8927.0, 11, Parity::odd), h(5)), ValidationError);
  CHECK_THROWS_AS(Transition(lo, level(8927.0, 13, Parity::even), h(5)), ValidationError);
  CHECK_THROWS_AS(Transition(level(9000.0, 9, Parity::even), lo, h(5)), ValidationError);
  CHECK_THROWS_AS(Transition(level(0, 0, Parity::odd), level(10, 0, Parity::even), h(5)), ValidationError);
  CHECK(dipole_allowed(level(0, 1, Parity::even), level(5, 3, Parity::odd)));
  CHECK_FALSE(dipole_allowed(level(0, 1, Parity::even), level(5, 5, Parity::odd)));
}

TEST_CASE("wavenumbers parse exactly") {
  CHECK(Wavenumber::parse("16502.616").units() == 16502616000);
  CHECK(Wavenumber::parse("0.000001").units() == 1);
  CHECK(Wavenumber::parse("20643.071") - Wavenumber::parse("11713.220") == Wavenumber::parse("8929.851"));
  CHECK_THROWS_AS(Wavenumber::parse("1.2345678"), ValidationError);
  CHECK_THROWS_AS(Wavenumber::parse("12a"), ValidationError);
  CHECK_THROWS_AS(Wavenumber::parse("."), ValidationError);
}

}
