#pragma once

// Line profiles and synthetic hyperfine scans.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hfslock/hfs.hpp"
#include "hfslock/simd/kernels.hpp"

namespace hfslock {

/// Unit-peak Voigt profile at detuning x (MHz). Either width may be zero, not both.
double voigt(double x, double gaussian_fwhm, double lorentzian_fwhm);

/// Olivero-Longbothum estimate of the Voigt FWHM (accurate to about 0.02 %).
double voigt_fwhm(double gaussian_fwhm, double lorentzian_fwhm);

/// Doppler FWHM in MHz for a transition at `wavelength_nm`, gas temperature in K
/// and atomic mass in u.
double doppler_fwhm(double wavelength_nm, double temperature_k, double mass_u);

/// Scaling constants for repeated profile evaluation at fixed widths.
simd::VoigtShape make_voigt_shape(double gaussian_fwhm, double lorentzian_fwhm);

/// Parametric model of a hyperfine scan: a sum of Voigt components sharing
/// one Gaussian and one Lorentzian width, on an affine baseline.
struct SpectrumModel {
  std::vector<HfsComponent> components;
  double cog = 0.0;              // MHz
  double gaussian_fwhm = 0.0;    // MHz
  double lorentzian_fwhm = 0.0;  // MHz
  double amplitude = 1.0;
  double baseline_offset = 0.0;
  double baseline_slope = 0.0;  // per MHz, measured from cog

  /// Throws ValidationError on negative/zero widths or non-positive amplitude.
  void validate() const;

  /// Noise-free value at optical frequency nu (MHz).
  double evaluate(double nu) const;

  /// Noise-free values over an axis; uses the vectorised profile kernel.
  std::vector<double> evaluate(std::span<const double> nu) const;

  double baseline(double nu) const { return baseline_offset + baseline_slope * (nu - cog); }
};

/// A recorded or synthetic scan: detector (LIF) channel and optional
/// Fabry-Perot marker channel against a common abscissa.
struct Trace {
  std::vector<double> abscissa;  // sample index or frequency (MHz)
  std::vector<double> lif;
  std::optional<std::vector<double>> fpi;
  bool frequency_axis_valid = false;

  std::size_t size() const noexcept { return abscissa.size(); }

  /// Strictly increasing abscissa, finite detector values, matching lengths.
  void validate() const;
};

struct GaussianNoise {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Sample `model` on `axis` (strictly increasing, MHz). Noise is added in
/// index order from a generator seeded with `noise.seed`, so a fixed seed
/// reproduces the trace bit for bit.
Trace synthesize(const SpectrumModel& model, std::span<const double> axis,
                 const std::optional<GaussianNoise>& noise = std::nullopt);

/// CSV with header `abscissa,lif,fpi` preceded by a `# abscissa_unit=` line
/// recording whether the abscissa is a frequency axis. A missing fpi channel is
/// written as an empty field.
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);
Trace read_trace_csv(const std::filesystem::path& path);

}  // namespace hfslock
