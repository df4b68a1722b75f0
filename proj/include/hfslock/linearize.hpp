#pragma once

// Frequency axis of a piezo scan from Fabry-Perot transmission markers and a
// single absolute wavemeter reading.

#include <cstddef>
#include <vector>

#include "hfslock/lineshape.hpp"

namespace hfslock {

struct MarkerSet {
  std::vector<double> peak_positions;  // fractional sample index, increasing
  double fsr = 2109.0;                 // MHz between adjacent markers
  double fsr_uncertainty = 12.0;       // MHz

  /// Throws ValidationError unless positions are strictly increasing (at
  /// least two) and fsr > 0.
  void validate() const;
};

/// Finds marker peaks in the fpi channel: 5-point moving average, local
/// maxima whose topographic prominence is at least `min_prominence` times the
/// smoothed channel range, then a parabola through the three samples around
/// each maximum. Throws ValidationError without an fpi channel and
/// NumericalError when fewer than two peaks qualify.
MarkerSet detect_markers(const Trace& trace, double min_prominence = 0.2);

struct AxisAnchor {
  double sample = 0.0;       // fractional sample index
  double frequency = 0.0;    // MHz
  double uncertainty = 0.0;  // MHz
};

struct FrequencyAxis {
  std::vector<double> frequency;  // MHz, one per sample
  std::vector<double> knot_positions;
  std::vector<double> knot_frequencies;  // relative, k * fsr
  AxisAnchor anchor;
  double offset = 0.0;  // added to the relative frequencies
  double fsr = 0.0;
  double fsr_uncertainty = 0.0;
  /// Relative scale uncertainty of frequency differences (fsr_uncertainty / fsr).
  double scale_uncertainty = 0.0;
  bool monotone = false;

  /// Absolute frequency at a fractional sample position.
  double at(double position) const;
  /// Frequency relative to marker 0.
  double relative_at(double position) const;
};

/// Monotone piecewise-cubic (Fritsch-Carlson) map through (position_k,
/// k * fsr), extended linearly past the outer markers, shifted so that
/// `anchor.sample` lands on `anchor.frequency`.
FrequencyAxis build_axis(const MarkerSet& markers, std::size_t n_samples, const AxisAnchor& anchor);

/// Copy of `trace` with the abscissa replaced by the axis frequencies.
Trace apply_axis(const Trace& trace, const FrequencyAxis& axis);

}  // namespace hfslock
