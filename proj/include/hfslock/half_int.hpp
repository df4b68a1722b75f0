#pragma once

#include <compare>
#include <cstdlib>
#include <string>
#include <string_view>

namespace hfslock {

/// Non-negative angular momentum quantum number stored as twice its value,
/// so 5/2 is held as 5 and arithmetic on couplings stays exact.
class HalfInt {
 public:
  constexpr HalfInt() = default;

  static HalfInt from_twice(int twice);
  static HalfInt integer(int value) { return from_twice(2 * value); }

  /// Accepts "5/2", "3", "2.5".
  static HalfInt parse(std::string_view text);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  constexpr bool is_integer() const noexcept { return twice_ % 2 == 0; }

  /// 2J + 1
  constexpr int multiplicity() const noexcept { return twice_ + 1; }

  std::string str() const;

  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

/// |a - b|
inline HalfInt abs_diff(HalfInt a, HalfInt b) { return HalfInt::from_twice(std::abs(a.twice() - b.twice())); }

inline HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt::from_twice(a.twice() + b.twice()); }

/// True when a, b, c can couple: |a-b| <= c <= a+b and a+b+c integral.
constexpr bool triangle(HalfInt a, HalfInt b, HalfInt c) noexcept {
  const int s = a.twice() + b.twice() + c.twice();
  const int d = a.twice() - b.twice();
  return s % 2 == 0 && c.twice() >= (d < 0 ? -d : d) && c.twice() <= a.twice() + b.twice();
}

}  // namespace hfslock
