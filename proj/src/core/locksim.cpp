#include "hfslock/locksim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hfslock/constants.hpp"
#include "hfslock/error.hpp"
#include "hfslock/simd/kernels.hpp"

namespace hfslock {

namespace {

bool near_integer(double v, double tol = 1e-6) { return std::abs(v - std::round(v)) <= tol * std::max(1.0, std::abs(v)); }

double components_fwhm(const SpectrumModel& m) { return voigt_fwhm(m.gaussian_fwhm, m.lorentzian_fwhm); }

std::vector<double> reference_sine(std::size_t n, double fd, double fs, double phase) {
  std::vector<double> ref(n);
  for (std::size_t k = 0; k < n; ++k)
    ref[k] = std::sin(2.0 * constants::pi * fd * static_cast<double>(k) / fs + phase);
  return ref;
}

}  // namespace

double LockConfig::effective_dither_amplitude() const {
  return dither_amplitude > 0.0 ? dither_amplitude : components_fwhm(discriminator) / 20.0;
}

double LockConfig::effective_time_constant() const {
  return lockin_time_constant > 0.0 ? lockin_time_constant : 1.0 / dither_frequency;
}

std::size_t LockConfig::samples_per_window() const {
  return static_cast<std::size_t>(std::llround(effective_time_constant() * sample_rate));
}

void LockConfig::validate() const {
  if (!(dither_frequency > 0.0)) throw ValidationError("dither_frequency must be positive");
  if (!(sample_rate >= 20.0 * dither_frequency))
    throw ValidationError("sample_rate must be at least 20 x dither_frequency");
  if (dither_amplitude < 0.0) throw ValidationError("dither_amplitude must be non-negative");
  if (lockin_time_constant < 0.0) throw ValidationError("lockin_time_constant must be non-negative");
  const double tau = effective_time_constant();
  const double periods = tau * dither_frequency;
  if (!(periods >= 1.0 - 1e-9) || !near_integer(periods))
    throw ValidationError("lockin_time_constant must span a whole number (>= 1) of dither periods");
  if (!near_integer(tau * sample_rate))
    throw ValidationError("lockin window must hold a whole number of samples (time_constant x sample_rate)");
  if (!near_integer(static_cast<double>(samples_per_window()) * dither_frequency / sample_rate))
    throw ValidationError("dither periods must hold a whole number of samples over one lock-in window");
  if (detector_noise_sigma < 0.0) throw ValidationError("detector_noise_sigma must be non-negative");
  if (!(duration > 0.0)) throw ValidationError("duration must be positive");
  discriminator.validate();
  if (target_component >= discriminator.components.size())
    throw ValidationError("target_component " + std::to_string(target_component) + " out of range (" +
                          std::to_string(discriminator.components.size()) + " components)");
  if (averaging_times.empty()) throw ValidationError("averaging_times must not be empty");
  for (double a : averaging_times)
    if (!(a > 0.0)) throw ValidationError("averaging times must be positive");
  const double longest = *std::max_element(averaging_times.begin(), averaging_times.end());
  if (duration < 3.0 * longest)
    throw ValidationError("duration must be at least 3 x the longest averaging time");
  if (!(pid.output_limit > 0.0)) throw ValidationError("pid.output_limit must be positive");
}

double lif_response(const SpectrumModel& model, double nu, double noise_sigma, std::mt19937_64& rng) {
  double v = model.evaluate(nu);
  if (noise_sigma > 0.0) v += std::normal_distribution<double>(0.0, noise_sigma)(rng);
  return v;
}

double lockin_demodulate(std::span<const double> samples, double dither_frequency, double sample_rate, double phase) {
  if (samples.empty()) throw ValidationError("lock-in window is empty");
  const double periods = static_cast<double>(samples.size()) * dither_frequency / sample_rate;
  if (periods < 1.0 - 1e-9 || !near_integer(periods))
    throw ValidationError("lock-in window must hold a whole number of dither periods");
  const auto ref = reference_sine(samples.size(), dither_frequency, sample_rate, phase);
  return 2.0 / static_cast<double>(samples.size()) * simd::dot(samples, ref);
}

double demodulated_error(const SpectrumModel& model, double nu, double dither_amplitude, double dither_frequency,
                         double sample_rate, std::size_t window_samples) {
  std::vector<double> axis(window_samples);
  for (std::size_t k = 0; k < window_samples; ++k)
    axis[k] = nu + dither_amplitude * std::sin(2.0 * constants::pi * dither_frequency * static_cast<double>(k) / sample_rate);
  const auto lif = model.evaluate(std::span<const double>(axis));
  return lockin_demodulate(lif, dither_frequency, sample_rate);
}

Discriminator make_discriminator(const LockConfig& config) {
  const SpectrumModel& m = config.discriminator;
  m.validate();
  if (config.target_component >= m.components.size()) throw ValidationError("target_component out of range");
  Discriminator d;
  d.fwhm = components_fwhm(m);

  // Golden-section search for the maximum within half a FWHM of the component.
  const double c = m.cog + m.components[config.target_component].offset;
  double lo = c - 0.5 * d.fwhm, hi = c + 0.5 * d.fwhm;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = m.evaluate(x1), f2 = m.evaluate(x2);
  while (hi - lo > 1e-7 * d.fwhm) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = m.evaluate(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = m.evaluate(x1);
    }
  }
  d.lock_point = 0.5 * (lo + hi);
  d.peak_value = m.evaluate(d.lock_point);
  d.peak_height = d.peak_value - m.baseline(d.lock_point);

  const double a = config.effective_dither_amplitude();
  const std::size_t n = config.samples_per_window();
  const double h = 1e-3 * d.fwhm;
  const double ep = demodulated_error(m, d.lock_point + h, a, config.dither_frequency, config.sample_rate, n);
  const double em = demodulated_error(m, d.lock_point - h, a, config.dither_frequency, config.sample_rate, n);
  d.slope = (ep - em) / (2.0 * h);
  if (!(d.slope < 0.0)) throw NumericalError("discriminator slope at the lock point is not negative");
  return d;
}

namespace {

class Pid {
 public:
  explicit Pid(const PidGains& g) : g_(g) {}

  // Setpoint 0; the measurement is the detuning estimate.
  double update(double measurement, double dt) {
    const double e = -measurement;
    if (first_) {
      prev_error_ = e;
      prev_measurement_ = measurement;
    }
    integral_ += 0.5 * dt * (e + prev_error_);
    double i_term = g_.ki * integral_;
    if (std::abs(i_term) > g_.output_limit) {
      i_term = std::copysign(g_.output_limit, i_term);
      integral_ = i_term / g_.ki;
    }
    const double d_term = first_ ? 0.0 : -g_.kd * (measurement - prev_measurement_) / dt;
    prev_error_ = e;
    prev_measurement_ = measurement;
    first_ = false;
    return std::clamp(g_.kp * e + i_term + d_term, -g_.output_limit, g_.output_limit);
  }

 private:
  PidGains g_;
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  double prev_measurement_ = 0.0;
  bool first_ = true;
};

}  // namespace

LockRun run_lock(const LaserModel& laser, const LockConfig& config, bool engaged) {
  config.validate();
  if (laser.random_walk_sigma < 0.0 || laser.white_noise_sigma < 0.0)
    throw ValidationError("laser noise amplitudes must be non-negative");

  LockRun run;
  run.engaged = engaged;
  run.discriminator = make_discriminator(config);
  const Discriminator& disc = run.discriminator;

  const double fs = config.sample_rate;
  const double fd = config.dither_frequency;
  const double dt = 1.0 / fs;
  const std::size_t n = config.samples_per_window();
  const double window = static_cast<double>(n) * dt;
  const auto windows = static_cast<std::size_t>(std::floor(config.duration / window + 1e-9));
  const double a = config.effective_dither_amplitude();
  const double drift_per_s = laser.drift_rate / 3600.0;
  const double rw_step = laser.random_walk_sigma * std::sqrt(dt);

  std::mt19937_64 laser_rng(laser.seed);
  std::mt19937_64 detector_rng(config.detector_seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  const auto dither = reference_sine(n, fd, fs, 0.0);
  std::vector<double> nu(n), base(n), lif(n);
  Pid pid(config.pid);
  double control = 0.0;
  double walk = 0.0;
  run.locked = engaged;
  run.series.reserve(windows);

  for (std::size_t w = 0; w < windows; ++w) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(w * n + k) * dt;
      walk += rw_step == 0.0 ? 0.0 : rw_step * unit(laser_rng);
      const double white = laser.white_noise_sigma == 0.0 ? 0.0 : laser.white_noise_sigma * unit(laser_rng);
      base[k] = laser.start_frequency + drift_per_s * t + walk + white + control;
      nu[k] = base[k] + a * dither[k];
      mean += base[k];
    }
    mean /= static_cast<double>(n);

    lif = config.discriminator.evaluate(std::span<const double>(nu));
    if (config.detector_noise_sigma > 0.0)
      for (double& v : lif) v += config.detector_noise_sigma * unit(detector_rng);
    const double demod = 2.0 / static_cast<double>(n) * simd::dot(lif, dither);
    const double detuning = demod / disc.slope;

    LockSample s;
    s.t = (static_cast<double>(w) + 0.5) * window;
    s.laser_frequency = mean;
    s.error = detuning;
    s.control = control;
    run.series.push_back(s);

    if (engaged && run.locked && std::abs(mean - disc.lock_point) > disc.fwhm) {
      run.locked = false;
      run.lock_lost_at = s.t;
    }
    if (engaged) control = pid.update(detuning, window);
  }

  std::vector<double> t(run.series.size()), f(run.series.size()), read(run.series.size());
  for (std::size_t k = 0; k < run.series.size(); ++k) {
    t[k] = run.series[k].t;
    f[k] = run.series[k].laser_frequency;
    read[k] = disc.lock_point + run.series[k].error;
  }
  run.stats = stability_stats(t, f, config.averaging_times);
  run.discriminator_stats = stability_stats(t, read, config.averaging_times);
  return run;
}

StabilityStats stability_stats(std::span<const double> t, std::span<const double> value,
                               const std::vector<double>& averaging_times) {
  if (t.size() != value.size()) throw ValidationError("stability_stats: time and value lengths differ");
  if (t.size() < 2) throw ValidationError("stability_stats: need at least two samples");
  for (std::size_t k = 1; k < t.size(); ++k)
    if (!(t[k] > t[k - 1])) throw ValidationError("stability_stats: times must be strictly increasing");
  if (averaging_times.empty()) throw ValidationError("stability_stats: no averaging times");

  // Each sample stands for an interval of the mean spacing around it.
  const double spacing = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  const double start = t.front() - 0.5 * spacing;
  const double span = t.back() - t.front() + spacing;
  const double longest = *std::max_element(averaging_times.begin(), averaging_times.end());
  if (span < 3.0 * longest * (1.0 - 1e-9))
    throw ValidationError("stability_stats: run of " + std::to_string(span) + " s is shorter than 3 x " +
                          std::to_string(longest) + " s");

  StabilityStats st;
  for (double tau : averaging_times) {
    if (!(tau > 0.0)) throw ValidationError("stability_stats: averaging times must be positive");
    const auto n_windows = static_cast<std::size_t>(std::floor(span / tau + 1e-9));
    std::vector<double> sum(n_windows, 0.0);
    std::vector<std::size_t> count(n_windows, 0);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto w = static_cast<std::size_t>(std::floor((t[k] - start) / tau));
      if (w >= n_windows) continue;
      sum[w] += value[k];
      ++count[w];
    }
    std::vector<double> means;
    for (std::size_t w = 0; w < n_windows; ++w)
      if (count[w] > 0) means.push_back(sum[w] / static_cast<double>(count[w]));
    if (means.size() < 2) throw ValidationError("stability_stats: averaging time shorter than the sample spacing");
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    st.windowed_spread[tau] = *hi - *lo;
    double avar = 0.0;
    for (std::size_t w = 1; w < means.size(); ++w) avar += (means[w] - means[w - 1]) * (means[w] - means[w - 1]);
    st.allan_deviation[tau] = std::sqrt(0.5 * avar / static_cast<double>(means.size() - 1));
  }

  double tm = 0.0, vm = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    tm += t[k];
    vm += value[k];
  }
  tm /= static_cast<double>(t.size());
  vm /= static_cast<double>(t.size());
  double stt = 0.0, stv = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - tm) * (t[k] - tm);
    stv += (t[k] - tm) * (value[k] - vm);
  }
  st.drift_slope = stv / stt * 3600.0;
  return st;
}

}  // namespace hfslock
