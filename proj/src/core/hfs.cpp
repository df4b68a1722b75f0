#include "hfslock/hfs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include <boost/multiprecision/cpp_int.hpp>

#include "hfslock/error.hpp"

namespace hfslock {

char parity_code(Parity p) noexcept { return p == Parity::even ? 'e' : 'o'; }

Wavenumber Wavenumber::from_cm1(double cm1) {
  if (!std::isfinite(cm1)) throw ValidationError("energy must be finite");
  return Wavenumber(static_cast<std::int64_t>(std::llround(cm1 * units_per_cm1)));
}

Wavenumber Wavenumber::parse(std::string_view text) {
  const std::string bad = "not a wavenumber: '" + std::string(text) + "'";
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw ValidationError(bad);
  if (frac.size() > 6) throw ValidationError(bad + " (more than 6 decimals)");

  std::int64_t w = 0;
  if (!whole.empty()) {
    auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
    if (ec != std::errc() || p != whole.data() + whole.size()) throw ValidationError(bad);
  }
  std::int64_t f = 0;
  if (!frac.empty()) {
    auto [p, ec] = std::from_chars(frac.data(), frac.data() + frac.size(), f);
    if (ec != std::errc() || p != frac.data() + frac.size() || frac.front() == '-' || frac.front() == '+')
      throw ValidationError(bad);
    for (std::size_t k = frac.size(); k < 6; ++k) f *= 10;
  }
  const std::int64_t units = w * units_per_cm1 + f;
  return Wavenumber(negative ? -units : units);
}

bool dipole_allowed(HalfInt j_a, HalfInt j_b) noexcept {
  const int d = std::abs(j_a.twice() - j_b.twice());
  if (d != 0 && d != 2) return false;
  return !(j_a.twice() == 0 && j_b.twice() == 0);
}

bool dipole_allowed(const Level& a, const Level& b) noexcept {
  return a.parity != b.parity && dipole_allowed(a.j, b.j);
}

Transition::Transition(Level lower, Level upper, HalfInt nuclear_spin)
    : lower_(std::move(lower)), upper_(std::move(upper)), spin_(nuclear_spin) {
  if (!(upper_.energy > lower_.energy))
    throw ValidationError("transition upper level must lie above the lower level");
  if (lower_.parity == upper_.parity) throw ValidationError("electric dipole transition needs opposite parities");
  if (!dipole_allowed(lower_.j, upper_.j))
    throw ValidationError("electric dipole transition needs |dJ| <= 1 and not J = J' = 0 (J=" + lower_.j.str() +
                          ", J'=" + upper_.j.str() + ")");
}

namespace {

bool in_coupling_range(HalfInt i, HalfInt j, HalfInt f) noexcept { return triangle(i, j, f); }

}  // namespace

double casimir_shift(HalfInt i, HalfInt j, HalfInt f, const HfsConstants& c) {
  if (!in_coupling_range(i, j, f))
    throw ValidationError("F=" + f.str() + " outside coupling range of I=" + i.str() + ", J=" + j.str());

  const std::int64_t i2 = i.twice(), j2 = j.twice(), f2 = f.twice();
  // 4K = 2F(2F+2) - 2I(2I+2) - 2J(2J+2)
  const std::int64_t k4 = f2 * (f2 + 2) - i2 * (i2 + 2) - j2 * (j2 + 2);
  const double dipole = c.a * static_cast<double>(k4) / 8.0;
  if (i2 <= 1 || j2 <= 1) return dipole;

  // [3/4 K(K+1) - I(I+1)J(J+1)] / [2I(2I-1)J(2J-1)] with everything scaled to integers.
  const std::int64_t num = 3 * k4 * (k4 + 4) - 4 * i2 * (i2 + 2) * j2 * (j2 + 2);
  const std::int64_t den = 32 * i2 * (i2 - 1) * j2 * (j2 - 1);
  return dipole + c.b * (static_cast<double>(num) / static_cast<double>(den));
}

int sublevel_count(HalfInt i, HalfInt j) noexcept { return j < i ? j.multiplicity() : i.multiplicity(); }

std::vector<HalfInt> f_values(HalfInt i, HalfInt j) {
  std::vector<HalfInt> out;
  for (int f2 = std::abs(i.twice() - j.twice()); f2 <= i.twice() + j.twice(); f2 += 2)
    out.push_back(HalfInt::from_twice(f2));
  return out;
}

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int factorial(int n) {
  cpp_int r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// Delta(abc)^2 with arguments given as twice-values.
cpp_rational delta_squared(int a, int b, int c) {
  return cpp_rational(factorial((a + b - c) / 2) * factorial((a - b + c) / 2) * factorial((-a + b + c) / 2),
                      factorial((a + b + c) / 2 + 1));
}

struct SixJSquared {
  cpp_rational value;  // {6j}^2
  int sign = 0;
};

SixJSquared six_j_exact(int a, int b, int c, int d, int e, int f) {
  auto tri = [](int x, int y, int z) {
    return triangle(HalfInt::from_twice(x), HalfInt::from_twice(y), HalfInt::from_twice(z));
  };
  if (!tri(a, b, c) || !tri(a, e, f) || !tri(d, b, f) || !tri(d, e, c)) return {};

  const int abc = (a + b + c) / 2, aef = (a + e + f) / 2, dbf = (d + b + f) / 2, dec = (d + e + c) / 2;
  const int abde = (a + b + d + e) / 2, acdf = (a + c + d + f) / 2, bcef = (b + c + e + f) / 2;
  const int t_min = std::max({abc, aef, dbf, dec});
  const int t_max = std::min({abde, acdf, bcef});

  cpp_rational sum = 0;
  for (int t = t_min; t <= t_max; ++t) {
    cpp_rational term(factorial(t + 1), factorial(t - abc) * factorial(t - aef) * factorial(t - dbf) *
                                            factorial(t - dec) * factorial(abde - t) * factorial(acdf - t) *
                                            factorial(bcef - t));
    sum += (t % 2 == 0) ? term : cpp_rational(-term);
  }
  if (sum == 0) return {};
  const cpp_rational deltas = delta_squared(a, b, c) * delta_squared(a, e, f) * delta_squared(d, b, f) *
                              delta_squared(d, e, c);
  return {deltas * sum * sum, sum > 0 ? 1 : -1};
}

}  // namespace

double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  const auto r = six_j_exact(j1.twice(), j2.twice(), j3.twice(), j4.twice(), j5.twice(), j6.twice());
  if (r.sign == 0) return 0.0;
  return r.sign * std::sqrt(static_cast<double>(r.value));
}

double line_strength(HalfInt i, HalfInt j_lower, HalfInt j_upper, HalfInt f, HalfInt f_prime) {
  const HalfInt one = HalfInt::integer(1);
  if (!triangle(i, j_lower, f) || !triangle(i, j_upper, f_prime) || !triangle(f, f_prime, one) ||
      !triangle(j_lower, j_upper, one))
    throw ValidationError("F=" + f.str() + " -> F'=" + f_prime.str() + " violates a triangle condition");
  const auto r = six_j_exact(j_lower.twice(), f.twice(), i.twice(), f_prime.twice(), j_upper.twice(), one.twice());
  const cpp_rational w = r.value * f.multiplicity() * f_prime.multiplicity();
  return static_cast<double>(w);
}

namespace {

void require_dipole_allowed(HalfInt j_lower, HalfInt j_upper) {
  if (!dipole_allowed(j_lower, j_upper))
    throw ValidationError("J=" + j_lower.str() + " -> J'=" + j_upper.str() + " is not dipole allowed");
}

}  // namespace

std::vector<HfsComponent> enumerate_components(HalfInt i, HalfInt j_lower, HalfInt j_upper,
                                               const std::optional<HfsConstants>& lower,
                                               const std::optional<HfsConstants>& upper) {
  require_dipole_allowed(j_lower, j_upper);
  const int dj2 = j_upper.twice() - j_lower.twice();
  const bool with_offsets = lower.has_value() && upper.has_value();

  std::vector<HfsComponent> out;
  double total = 0.0;
  for (const HalfInt f : f_values(i, j_lower)) {
    for (const HalfInt fp : f_values(i, j_upper)) {
      const int df2 = fp.twice() - f.twice();
      if (df2 < -2 || df2 > 2) continue;
      if (f.twice() + fp.twice() < 2) continue;  // F = F' = 0
      HfsComponent c;
      c.f_lower = f;
      c.f_upper = fp;
      c.diagonal = df2 == dj2;
      c.rel_intensity = line_strength(i, j_lower, j_upper, f, fp);
      if (with_offsets) c.offset = casimir_shift(i, j_upper, fp, *upper) - casimir_shift(i, j_lower, f, *lower);
      total += c.rel_intensity;
      out.push_back(c);
    }
  }
  if (total > 0.0)
    for (auto& c : out) c.rel_intensity /= total;
  return out;
}

std::vector<HfsComponent> enumerate_components(const Transition& t) {
  return enumerate_components(t.nuclear_spin(), t.lower().j, t.upper().j, t.lower().hfs, t.upper().hfs);
}

double relative_intensity(const Transition& t, HalfInt f, HalfInt f_prime) {
  const HalfInt i = t.nuclear_spin();
  const HalfInt jl = t.lower().j, ju = t.upper().j;
  const double s = line_strength(i, jl, ju, f, f_prime);
  if (f.twice() + f_prime.twice() < 2) throw ValidationError("F = F' = 0 is forbidden");
  double total = 0.0;
  for (const auto& c : enumerate_components(i, jl, ju)) total += line_strength(i, jl, ju, c.f_lower, c.f_upper);
  return s / total;
}

}  // namespace hfslock
