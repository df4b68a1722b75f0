#include "hfslock/lineshape.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "hfslock/constants.hpp"
#include "hfslock/error.hpp"
#include "hfslock/text.hpp"

namespace hfslock {

namespace {

void check_widths(double g, double l) {
  if (!(g >= 0.0) || !(l >= 0.0) || !std::isfinite(g) || !std::isfinite(l))
    throw ValidationError("line widths must be finite and non-negative");
  if (g == 0.0 && l == 0.0) throw ValidationError("Gaussian and Lorentzian widths cannot both be zero");
}

}  // namespace

simd::VoigtShape make_voigt_shape(double gaussian_fwhm, double lorentzian_fwhm) {
  check_widths(gaussian_fwhm, lorentzian_fwhm);
  const double sqrt_ln2 = std::sqrt(constants::ln2);
  simd::VoigtShape s;
  if (lorentzian_fwhm == 0.0) {
    s.kind = simd::VoigtShape::Kind::gaussian;
    s.scale = 2.0 * sqrt_ln2 / gaussian_fwhm;
    s.peak_norm = 1.0;
  } else if (gaussian_fwhm == 0.0) {
    s.kind = simd::VoigtShape::Kind::lorentzian;
    s.scale = 2.0 / lorentzian_fwhm;
    s.peak_norm = 1.0;
  } else {
    s.kind = simd::VoigtShape::Kind::voigt;
    s.scale = 2.0 * sqrt_ln2 / gaussian_fwhm;
    s.damping = sqrt_ln2 * lorentzian_fwhm / gaussian_fwhm;
    s.peak_norm = 1.0 / simd::faddeeva_real(0.0, s.damping);
  }
  return s;
}

double voigt(double x, double gaussian_fwhm, double lorentzian_fwhm) {
  const auto s = make_voigt_shape(gaussian_fwhm, lorentzian_fwhm);
  double out = 0.0;
  simd::detail::voigt_profile_scalar(&x, 1, 0.0, s, &out);
  return out;
}

double voigt_fwhm(double gaussian_fwhm, double lorentzian_fwhm) {
  check_widths(gaussian_fwhm, lorentzian_fwhm);
  return 0.5346 * lorentzian_fwhm +
         std::sqrt(0.2166 * lorentzian_fwhm * lorentzian_fwhm + gaussian_fwhm * gaussian_fwhm);
}

double doppler_fwhm(double wavelength_nm, double temperature_k, double mass_u) {
  if (!(wavelength_nm > 0.0) || !(temperature_k > 0.0) || !(mass_u > 0.0))
    throw ValidationError("doppler_fwhm: wavelength, temperature and mass must be positive");
  const double mass = mass_u * constants::atomic_mass_unit;
  const double v = std::sqrt(8.0 * constants::ln2 * constants::boltzmann * temperature_k / mass);
  return v / (wavelength_nm * 1e-9) * 1e-6;
}

void SpectrumModel::validate() const {
  check_widths(gaussian_fwhm, lorentzian_fwhm);
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ValidationError("amplitude must be positive");
  if (!std::isfinite(cog) || !std::isfinite(baseline_offset) || !std::isfinite(baseline_slope))
    throw ValidationError("model parameters must be finite");
  for (const auto& c : components)
    if (!(c.rel_intensity >= 0.0) || !std::isfinite(c.offset))
      throw ValidationError("component intensities must be non-negative and offsets finite");
}

double SpectrumModel::evaluate(double nu) const {
  const auto s = make_voigt_shape(gaussian_fwhm, lorentzian_fwhm);
  double sum = 0.0;
  for (const auto& c : components) {
    double v = 0.0;
    simd::detail::voigt_profile_scalar(&nu, 1, cog + c.offset, s, &v);
    sum += c.rel_intensity * v;
  }
  return baseline(nu) + amplitude * sum;
}

std::vector<double> SpectrumModel::evaluate(std::span<const double> nu) const {
  const auto s = make_voigt_shape(gaussian_fwhm, lorentzian_fwhm);
  std::vector<double> peaks(nu.size(), 0.0);
  std::vector<double> profile(nu.size());
  for (const auto& c : components) {
    simd::voigt_profile(nu, cog + c.offset, s, profile);
    for (std::size_t k = 0; k < nu.size(); ++k) peaks[k] += c.rel_intensity * profile[k];
  }
  for (std::size_t k = 0; k < nu.size(); ++k) peaks[k] = baseline(nu[k]) + amplitude * peaks[k];
  return peaks;
}

void Trace::validate() const {
  if (lif.size() != abscissa.size()) throw ValidationError("trace: lif and abscissa lengths differ");
  if (fpi && fpi->size() != abscissa.size()) throw ValidationError("trace: fpi and abscissa lengths differ");
  for (std::size_t k = 0; k < abscissa.size(); ++k) {
    if (!std::isfinite(abscissa[k])) throw ValidationError("trace: non-finite abscissa at row " + std::to_string(k));
    if (!std::isfinite(lif[k])) throw ValidationError("trace: non-finite lif at row " + std::to_string(k));
    if (k > 0 && !(abscissa[k] > abscissa[k - 1]))
      throw ValidationError("trace: abscissa not strictly increasing at row " + std::to_string(k));
  }
}

Trace synthesize(const SpectrumModel& model, std::span<const double> axis, const std::optional<GaussianNoise>& noise) {
  model.validate();
  for (std::size_t k = 1; k < axis.size(); ++k)
    if (!(axis[k] > axis[k - 1])) throw ValidationError("synthesize: axis must be strictly increasing");

  Trace t;
  t.abscissa.assign(axis.begin(), axis.end());
  t.lif = model.evaluate(axis);
  t.frequency_axis_valid = true;
  if (noise && noise->sigma > 0.0) {
    std::mt19937_64 rng(noise->seed);
    std::normal_distribution<double> gauss(0.0, noise->sigma);
    for (double& v : t.lif) v += gauss(rng);
  }
  return t;
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  trace.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "# abscissa_unit=" << (trace.frequency_axis_valid ? "MHz" : "sample") << '\n';
  out << "abscissa,lif,fpi\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << text::format_double(trace.abscissa[k]) << ',' << text::format_double(trace.lif[k]) << ',';
    if (trace.fpi) out << text::format_double((*trace.fpi)[k]);
    out << '\n';
  }
  if (!out) throw ValidationError("error while writing " + path.string());
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  const std::string src = path.string();

  Trace t;
  bool header_seen = false;
  std::optional<bool> has_fpi;
  std::vector<double> fpi;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view sv = text::trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      const auto body = text::trim(sv.substr(1));
      if (body.starts_with("abscissa_unit=")) {
        const auto unit = text::trim(body.substr(14));
        if (unit == "MHz") t.frequency_axis_valid = true;
        else if (unit == "sample") t.frequency_axis_valid = false;
        else throw ParseError(src, lineno, 1, "unknown abscissa unit '" + std::string(unit) + "'");
      }
      continue;
    }
    if (!header_seen) {
      if (sv != "abscissa,lif,fpi") throw ParseError(src, lineno, 1, "expected header 'abscissa,lif,fpi'");
      header_seen = true;
      continue;
    }
    const auto fields = text::split(sv, ',');
    if (fields.size() != 3) throw ParseError(src, lineno, 1, "expected 3 fields, found " + std::to_string(fields.size()));
    const auto x = text::parse_double(fields[0]);
    if (!x) throw ParseError(src, lineno, 1, "bad abscissa '" + std::string(fields[0]) + "'");
    const auto y = text::parse_double(fields[1]);
    if (!y) throw ParseError(src, lineno, 2, "bad lif value '" + std::string(fields[1]) + "'");
    const bool row_has_fpi = !text::trim(fields[2]).empty();
    if (has_fpi && *has_fpi != row_has_fpi) throw ParseError(src, lineno, 3, "fpi channel present on some rows only");
    has_fpi = row_has_fpi;
    if (row_has_fpi) {
      const auto f = text::parse_double(fields[2]);
      if (!f) throw ParseError(src, lineno, 3, "bad fpi value '" + std::string(fields[2]) + "'");
      fpi.push_back(*f);
    }
    t.abscissa.push_back(*x);
    t.lif.push_back(*y);
  }
  if (!header_seen) throw ParseError(src, lineno, 1, "missing header 'abscissa,lif,fpi'");
  if (has_fpi.value_or(false)) t.fpi = std::move(fpi);
  t.validate();
  return t;
}

}  // namespace hfslock
