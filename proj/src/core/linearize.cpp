#include "hfslock/linearize.hpp"

#include <algorithm>
#include <cmath>

#include "hfslock/error.hpp"
#include "hfslock/text.hpp"

namespace hfslock {

void MarkerSet::validate() const {
  if (peak_positions.size() < 2) throw ValidationError("need at least two FPI markers");
  for (std::size_t k = 0; k < peak_positions.size(); ++k) {
    if (!std::isfinite(peak_positions[k])) throw ValidationError("marker position is not finite");
    if (k > 0 && !(peak_positions[k] > peak_positions[k - 1]))
      throw ValidationError("marker positions must be strictly increasing");
  }
  if (!(fsr > 0.0) || !std::isfinite(fsr)) throw ValidationError("fsr must be positive");
  if (!(fsr_uncertainty >= 0.0)) throw ValidationError("fsr uncertainty must be non-negative");
}

namespace {

std::vector<double> moving_average(const std::vector<double>& v, std::size_t width) {
  const std::size_t half = width / 2;
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(v.size() - 1, k + half);
    double s = 0.0;
    for (std::size_t m = lo; m <= hi; ++m) s += v[m];
    out[k] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// Height of peak k above the higher of the two lowest points separating it
// from taller terrain (or the ends of the channel).
double prominence(const std::vector<double>& s, std::size_t k) {
  double left_min = s[k];
  for (std::size_t m = k; m-- > 0;) {
    if (s[m] > s[k]) break;
    left_min = std::min(left_min, s[m]);
  }
  double right_min = s[k];
  for (std::size_t m = k + 1; m < s.size(); ++m) {
    if (s[m] > s[k]) break;
    right_min = std::min(right_min, s[m]);
  }
  return s[k] - std::max(left_min, right_min);
}

}  // namespace

MarkerSet detect_markers(const Trace& trace, double min_prominence) {
  if (!trace.fpi) throw ValidationError("trace has no fpi channel");
  if (!(min_prominence > 0.0 && min_prominence < 1.0)) throw ValidationError("min_prominence must lie in (0, 1)");
  const auto& raw = *trace.fpi;
  if (raw.size() < 5) throw NumericalError("fpi channel too short to find markers");

  const auto s = moving_average(raw, 5);
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw NumericalError("fpi channel is flat; no markers found");
  const double threshold = min_prominence * range;

  MarkerSet m;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    // Plateaus count once, at their first sample.
    if (!(s[k] > s[k - 1] && s[k] >= s[k + 1])) continue;
    if (prominence(s, k) < threshold) continue;
    const double y0 = s[k - 1], y1 = s[k], y2 = s[k + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    double shift = denom < 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    m.peak_positions.push_back(static_cast<double>(k) + shift);
  }
  if (m.peak_positions.size() < 2)
    throw NumericalError("found " + std::to_string(m.peak_positions.size()) + " FPI marker(s); need at least 2");
  return m;
}

namespace {

// Fritsch-Carlson derivatives; end slopes are the end-interval secants.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  std::vector<double> d(n);
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      d[k] = 0.0;
      continue;
    }
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  return d;
}

struct Pchip {
  std::vector<double> x, y, d;

  double operator()(double t) const {
    const std::size_t n = x.size();
    if (t <= x.front()) return y.front() + d.front() * (t - x.front());
    if (t >= x.back()) return y.back() + d.back() * (t - x.back());
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
    if (k + 1 >= n) return y.back();
    const double h = x[k + 1] - x[k];
    const double u = (t - x[k]) / h;
    if (u == 0.0) return y[k];
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u, h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return h00 * y[k] + h10 * h * d[k] + h01 * y[k + 1] + h11 * h * d[k + 1];
  }
};

Pchip make_pchip(const FrequencyAxis& a) {
  return {a.knot_positions, a.knot_frequencies, pchip_slopes(a.knot_positions, a.knot_frequencies)};
}

}  // namespace

double FrequencyAxis::relative_at(double position) const {
  if (knot_positions.size() < 2) throw ValidationError("frequency axis has no knots");
  return make_pchip(*this)(position);
}

double FrequencyAxis::at(double position) const { return relative_at(position) + offset; }

FrequencyAxis build_axis(const MarkerSet& markers, std::size_t n_samples, const AxisAnchor& anchor) {
  markers.validate();
  if (n_samples < 2) throw ValidationError("scan needs at least two samples");
  if (!(anchor.sample >= 0.0 && anchor.sample <= static_cast<double>(n_samples - 1)))
    throw ValidationError("anchor sample " + text::format_double(anchor.sample) + " lies outside the scan");
  if (!std::isfinite(anchor.frequency)) throw ValidationError("anchor frequency must be finite");

  FrequencyAxis a;
  a.knot_positions = markers.peak_positions;
  a.knot_frequencies.resize(markers.peak_positions.size());
  for (std::size_t k = 0; k < a.knot_frequencies.size(); ++k) a.knot_frequencies[k] = static_cast<double>(k) * markers.fsr;
  a.anchor = anchor;
  a.fsr = markers.fsr;
  a.fsr_uncertainty = markers.fsr_uncertainty;
  a.scale_uncertainty = markers.fsr_uncertainty / markers.fsr;

  const Pchip p = make_pchip(a);
  a.offset = anchor.frequency - p(anchor.sample);
  a.frequency.resize(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) a.frequency[k] = p(static_cast<double>(k)) + a.offset;

  a.monotone = true;
  for (std::size_t k = 1; k < n_samples; ++k)
    if (!(a.frequency[k] > a.frequency[k - 1])) a.monotone = false;
  if (!a.monotone) throw NumericalError("reconstructed frequency axis is not strictly increasing");
  return a;
}

Trace apply_axis(const Trace& trace, const FrequencyAxis& axis) {
  if (axis.frequency.size() != trace.size()) throw ValidationError("frequency axis and trace lengths differ");
  Trace out = trace;
  out.abscissa = axis.frequency;
  out.frequency_axis_valid = true;
  out.validate();
  return out;
}

}  // namespace hfslock
