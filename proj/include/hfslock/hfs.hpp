#pragma once

// Hyperfine-structure bookkeeping: levels, dipole transitions, Casimir shifts
// and the F -> F' component list of a transition.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfslock/half_int.hpp"

namespace hfslock {

/// Magnetic dipole (A) and electric quadrupole (B) coupling constants, MHz.
struct HfsConstants {
  double a = 0.0;
  double b = 0.0;
};

enum class Parity { even, odd };

char parity_code(Parity p) noexcept;

/// Level energy in cm^-1 held as an integer count of 1e-6 cm^-1, so that
/// differences of energies (Ritz wavenumbers) add up exactly.
class Wavenumber {
 public:
  static constexpr std::int64_t units_per_cm1 = 1'000'000;

  constexpr Wavenumber() = default;
  static constexpr Wavenumber from_units(std::int64_t units) { return Wavenumber(units); }
  static Wavenumber from_cm1(double cm1);
  /// Exact decimal parse ("16502.616"); at most six fractional digits.
  static Wavenumber parse(std::string_view text);

  constexpr std::int64_t units() const noexcept { return units_; }
  constexpr double cm1() const noexcept { return static_cast<double>(units_) / units_per_cm1; }

  friend constexpr Wavenumber operator-(Wavenumber a, Wavenumber b) { return Wavenumber(a.units_ - b.units_); }
  friend constexpr Wavenumber operator+(Wavenumber a, Wavenumber b) { return Wavenumber(a.units_ + b.units_); }
  friend constexpr auto operator<=>(Wavenumber, Wavenumber) = default;

 private:
  constexpr explicit Wavenumber(std::int64_t u) : units_(u) {}
  std::int64_t units_ = 0;
};

struct Level {
  std::string label;
  Wavenumber energy;
  HalfInt j;
  Parity parity = Parity::even;
  std::optional<HfsConstants> hfs;
  std::string source;
};

/// Electric-dipole selection rules between two fine-structure levels
/// (order-independent): opposite parity, |dJ| <= 1, not 0 -> 0.
bool dipole_allowed(const Level& a, const Level& b) noexcept;

/// J-only part of the selection rules.
bool dipole_allowed(HalfInt j_a, HalfInt j_b) noexcept;

class Transition {
 public:
  /// Throws ValidationError unless upper lies above lower and the pair is dipole allowed.
  Transition(Level lower, Level upper, HalfInt nuclear_spin);

  const Level& lower() const noexcept { return lower_; }
  const Level& upper() const noexcept { return upper_; }
  HalfInt nuclear_spin() const noexcept { return spin_; }

 private:
  Level lower_;
  Level upper_;
  HalfInt spin_;
};

struct HfsComponent {
  HalfInt f_lower;
  HalfInt f_upper;
  double offset = 0.0;         // MHz from the centre of gravity
  double rel_intensity = 0.0;  // normalised over the transition
  bool diagonal = false;       // dF == dJ
};

/// First-order hyperfine shift of sublevel F (Casimir's formula), MHz.
/// The quadrupole term is zero when I <= 1/2 or J <= 1/2.
/// Throws ValidationError when F is outside |J-I| .. J+I.
double casimir_shift(HalfInt i, HalfInt j, HalfInt f, const HfsConstants& c);

/// Number of hyperfine sublevels of a level: 2J+1 for J < I, otherwise 2I+1.
int sublevel_count(HalfInt i, HalfInt j) noexcept;

/// Hyperfine F values of a level, ascending.
std::vector<HalfInt> f_values(HalfInt i, HalfInt j);

/// Six-j symbol { j1 j2 j3 ; j4 j5 j6 } from the Racah sum. Zero when a
/// triangle condition fails.
double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

/// Unnormalised line strength (2F+1)(2F'+1){J F I; F' J' 1}^2.
/// Throws ValidationError if (F, F') breaks a triangle condition.
double line_strength(HalfInt i, HalfInt j_lower, HalfInt j_upper, HalfInt f, HalfInt f_prime);

/// Line strength of (F, F') normalised over every allowed pair of the transition.
double relative_intensity(const Transition& t, HalfInt f, HalfInt f_prime);

/// All (F, F') pairs with dF in {0, +-1}, F + F' >= 1, ordered by (F, F').
/// Offsets are filled when both constant sets are given, otherwise left at 0.
/// Intensities carry the normalised line strengths.
std::vector<HfsComponent> enumerate_components(HalfInt i, HalfInt j_lower, HalfInt j_upper,
                                               const std::optional<HfsConstants>& lower = std::nullopt,
                                               const std::optional<HfsConstants>& upper = std::nullopt);

std::vector<HfsComponent> enumerate_components(const Transition& t);

}  // namespace hfslock
