#include "hfslock/half_int.hpp"

#include <charconv>
#include <cmath>

#include "hfslock/error.hpp"

namespace hfslock {

HalfInt HalfInt::from_twice(int twice) {
  if (twice < 0) throw ValidationError("angular momentum must be non-negative (twice value " + std::to_string(twice) + ")");
  return HalfInt(twice);
}

namespace {

bool parse_int(std::string_view s, int& out) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

HalfInt HalfInt::parse(std::string_view text) {
  const std::string_view s = trim(text);
  const std::string bad = "not an angular momentum: '" + std::string(text) + "'";
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    int num = 0, den = 0;
    if (!parse_int(s.substr(0, slash), num) || !parse_int(s.substr(slash + 1), den)) throw ValidationError(bad);
    if (den == 1) return from_twice(2 * num);
    if (den == 2) return from_twice(num);
    throw ValidationError(bad);
  }
  int whole = 0;
  if (parse_int(s, whole)) return from_twice(2 * whole);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ValidationError(bad);
  const double twice = 2.0 * v;
  if (std::abs(twice - std::round(twice)) > 1e-9) throw ValidationError(bad);
  return from_twice(static_cast<int>(std::lround(twice)));
}

std::string HalfInt::str() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

}  // namespace hfslock
