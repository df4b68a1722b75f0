#pragma once

// Closed-loop simulation of a dither lock onto a hyperfine component:
// drifting laser, LIF discriminator, lock-in demodulation and a PID stage
// updated once per demodulation window.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hfslock/lineshape.hpp"

namespace hfslock {

struct LaserModel {
  double start_frequency = 0.0;    // MHz; on the lock point when unset in configs
  double drift_rate = 0.0;         // MHz per hour
  double random_walk_sigma = 0.0;  // MHz / sqrt(s)
  double white_noise_sigma = 0.0;  // MHz per sample
  std::uint64_t seed = 1;
};

struct PidGains {
  double kp = 0.0;  // MHz of correction per MHz of detuning
  double ki = 0.0;  // 1/s
  double kd = 0.0;  // s
  double output_limit = 1000.0;  // MHz, clamps both the output and the integral term
};

struct LockConfig {
  double dither_frequency = 8.2;        // Hz
  double dither_amplitude = 0.0;        // MHz; 0 selects FWHM / 20
  double lockin_time_constant = 0.0;    // s; 0 selects one dither period
  PidGains pid;
  double sample_rate = 8200.0;          // Hz
  double detector_noise_sigma = 0.0;    // detector units
  std::uint64_t detector_seed = 2;
  SpectrumModel discriminator;
  std::size_t target_component = 0;
  double duration = 600.0;              // s
  std::vector<double> averaging_times = {0.2, 1.0, 10.0, 60.0};

  double effective_dither_amplitude() const;
  double effective_time_constant() const;
  std::size_t samples_per_window() const;

  /// Throws ValidationError when a documented constraint is broken.
  void validate() const;
};

/// Peak position and discriminator slope of the lock target.
struct Discriminator {
  double lock_point = 0.0;  // MHz, model maximum nearest the target component
  double peak_value = 0.0;  // model value at the lock point
  double peak_height = 0.0; // above the baseline
  double fwhm = 0.0;        // Voigt FWHM of the components, MHz
  double slope = 0.0;       // demodulated output per MHz of detuning at the lock point
};

struct StabilityStats {
  std::map<double, double> windowed_spread;  // averaging time (s) -> max - min of window means (MHz)
  double drift_slope = 0.0;                  // MHz/h, least-squares line
  std::map<double, double> allan_deviation;  // averaging time (s) -> MHz
};

struct LockSample {
  double t = 0.0;                // s, window centre
  double laser_frequency = 0.0;  // MHz, window mean without dither
  double error = 0.0;            // detuning read from the discriminator, MHz
  double control = 0.0;          // MHz, correction applied during the window
};

struct LockRun {
  std::vector<LockSample> series;
  bool engaged = false;
  bool locked = false;  // engaged and never outside +-FWHM of the lock point
  std::optional<double> lock_lost_at;  // s
  Discriminator discriminator;
  StabilityStats stats;                // of the true laser frequency
  StabilityStats discriminator_stats;  // of lock_point + error, as a free-running laser is characterised
};

/// Noise-free model value at nu plus Gaussian detector noise drawn from `rng`.
double lif_response(const SpectrumModel& model, double nu, double noise_sigma, std::mt19937_64& rng);

/// (2/N) sum s[n] sin(2 pi f_d n / f_s + phase). The window must hold an
/// integer number of dither periods (ValidationError otherwise).
double lockin_demodulate(std::span<const double> samples, double dither_frequency, double sample_rate,
                         double phase = 0.0);

/// Noise-free demodulated output with the laser parked at `nu` over one window.
double demodulated_error(const SpectrumModel& model, double nu, double dither_amplitude, double dither_frequency,
                         double sample_rate, std::size_t window_samples);

Discriminator make_discriminator(const LockConfig& config);

/// Fixed-step simulation over config.duration. With `engaged` false the
/// control output stays 0 and only the discriminator reading is recorded.
LockRun run_lock(const LaserModel& laser, const LockConfig& config, bool engaged);

/// Non-overlapping window means for each averaging time; spread is max - min,
/// Allan deviation the two-sample deviation of consecutive means. Throws
/// ValidationError if the series spans less than 3x the longest averaging time.
StabilityStats stability_stats(std::span<const double> t, std::span<const double> value,
                               const std::vector<double>& averaging_times);

}  // namespace hfslock
