#pragma once

// Physical constants used across the library (CODATA 2018, exact where defined).
namespace hfslock::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double ln2 = 0.69314718055994530942;

inline constexpr double speed_of_light = 299792458.0;        // m s^-1
inline constexpr double boltzmann = 1.380649e-23;             // J K^-1
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

/// hc/k_B in cm K, converts a level energy in cm^-1 to a temperature.
inline constexpr double second_radiation_constant = 1.438776877;

/// Mass of 141Pr in u.
inline constexpr double praseodymium_141_mass = 140.9076576;

}  // namespace hfslock::constants
