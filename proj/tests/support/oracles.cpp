#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using boost::multiprecision::cpp_rational;

namespace {

cpp_rational half(int twice) { return cpp_rational(twice, 2); }

bool tri(int a, int b, int c) { return (a + b + c) % 2 == 0 && c >= std::abs(a - b) && c <= a + b; }

double sign_of(int twice_s) { return (twice_s / 2) % 2 == 0 ? 1.0 : -1.0; }

}  // namespace

double casimir_exact(int ti, int tj, int tf, double a, double b) {
  const cpp_rational i = half(ti), j = half(tj), f = half(tf);
  const cpp_rational k = f * (f + 1) - i * (i + 1) - j * (j + 1);
  cpp_rational shift = k * cpp_rational(a) / 2;
  if (ti > 1 && tj > 1) {
    const cpp_rational num = cpp_rational(3, 4) * k * (k + 1) - i * (i + 1) * j * (j + 1);
    const cpp_rational den = 2 * i * (2 * i - 1) * j * (2 * j - 1);
    shift += cpp_rational(b) * num / den;
  }
  return static_cast<double>(shift);
}

double sixj_with_one(int ta, int tb, int tc, int te, int tf) {
  if (!tri(ta, tb, tc) || !tri(ta, te, tf) || !tri(2, tb, tf) || !tri(2, te, tc)) return 0.0;
  const int dc = (te - tc) / 2, db = (tf - tb) / 2;
  // Reduce to the four tabulated forms with the column and row-pair symmetries.
  if (dc == 0 && db == -1) return sixj_with_one(ta, tc, tb, tf, te);
  if (dc == 0 && db == 1) return sixj_with_one(ta, tc, tf, tb, te);
  if (dc == 1 && db == -1) return sixj_with_one(ta, tc, tb, tf, te);
  if (dc == 1 && db == 0) return sixj_with_one(ta, te, tf, tb, tc);
  if (dc == 1 && db == 1) return sixj_with_one(ta, te, tf, tb, tc);

  const double a = ta / 2.0, b = tb / 2.0, c = tc / 2.0;
  const int ts = ta + tb + tc;
  const double s = ts / 2.0;
  const double sg = sign_of(ts);
  if (dc == -1 && db == -1) {
    const double num = s * (s + 1) * (s - 2 * a - 1) * (s - 2 * a);
    const double den = (2 * b - 1) * 2 * b * (2 * b + 1) * (2 * c - 1) * 2 * c * (2 * c + 1);
    return sg * std::sqrt(num / den);
  }
  if (dc == -1 && db == 0) {
    const double num = 2 * (s + 1) * (s - 2 * a) * (s - 2 * b) * (s - 2 * c + 1);
    const double den = 2 * b * (2 * b + 1) * (2 * b + 2) * (2 * c - 1) * 2 * c * (2 * c + 1);
    return sg * std::sqrt(num / den);
  }
  if (dc == -1 && db == 1) {
    const double num = (s - 2 * b - 1) * (s - 2 * b) * (s - 2 * c + 1) * (s - 2 * c + 2);
    const double den = (2 * b + 1) * (2 * b + 2) * (2 * b + 3) * (2 * c - 1) * 2 * c * (2 * c + 1);
    return sg * std::sqrt(num / den);
  }
  // dc == 0 && db == 0
  const double num = 2 * (b * (b + 1) + c * (c + 1) - a * (a + 1));
  const double den = std::sqrt(2 * b * (2 * b + 1) * (2 * b + 2) * 2 * c * (2 * c + 1) * (2 * c + 2));
  return -sg * num / den;
}

double voigt_convolution(double x, double g, double l) {
  if (g <= 0.0 && l <= 0.0) throw std::invalid_argument("both widths zero");
  const double ln2 = std::log(2.0);
  if (l <= 0.0) return std::exp(-4.0 * ln2 * x * x / (g * g));
  if (g <= 0.0) return 1.0 / (1.0 + 4.0 * x * x / (l * l));
  const double gamma = 0.5 * l;
  const double sigma = g / (2.0 * std::sqrt(2.0 * ln2));
  const double pi = std::acos(-1.0);
  // With t = x - gamma tan(theta) the Lorentzian weight becomes dtheta / pi.
  auto value_at = [&](double xx) {
    auto integrand = [&](double theta) {
      const double t = xx - gamma * std::tan(theta);
      return std::exp(-0.5 * t * t / (sigma * sigma));
    };
    // Outside +-10 sigma the Gaussian is below exp(-50), so only that window
    // is integrated.
    const double lo = std::atan((xx - 10.0 * sigma) / gamma), hi = std::atan((xx + 10.0 * sigma) / gamma);
    const double mid = std::atan(xx / gamma);
    using boost::math::quadrature::gauss_kronrod;
    const double total = gauss_kronrod<double, 61>::integrate(integrand, lo, mid, 12, 1e-13) +
                         gauss_kronrod<double, 61>::integrate(integrand, mid, hi, 12, 1e-13);
    return total / pi;
  };
  return value_at(x) / value_at(0.0);
}

double doppler_fwhm_monte_carlo(double wavelength_nm, double temperature_k, double mass_u, std::size_t n,
                                std::uint64_t seed) {
  const double kb = 1.380649e-23, amu = 1.66053906660e-27, c = 299792458.0;
  const double sigma_v = std::sqrt(kb * temperature_k / (mass_u * amu));
  const double nu0 = c / (wavelength_nm * 1e-9);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> vel(0.0, sigma_v);
  std::vector<double> shift(n);
  for (auto& s : shift) s = nu0 * vel(rng) / c * 1e-6;  // MHz

  // Histogram over a range fixed from the sample spread.
  double mean = 0.0, m2 = 0.0;
  for (double s : shift) mean += s;
  mean /= static_cast<double>(n);
  for (double s : shift) m2 += (s - mean) * (s - mean);
  const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
  const int bins = 121;
  const double lo = mean - 2.5 * sd, hi = mean + 2.5 * sd, width = (hi - lo) / bins;
  std::vector<double> x(bins), y(bins, 0.0);
  for (int k = 0; k < bins; ++k) x[k] = lo + (k + 0.5) * width;
  for (double s : shift) {
    const auto k = static_cast<long>(std::floor((s - lo) / width));
    if (k >= 0 && k < bins) y[static_cast<std::size_t>(k)] += 1.0;
  }
  // Peak height from a least-squares parabola through the central bins.
  const int c0 = bins / 2, half = 12;
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (int k = c0 - half; k <= c0 + half; ++k) {
    const double u = (x[k] - x[c0]) / sd;
    s0 += 1; s1 += u; s2 += u * u; s3 += u * u * u; s4 += u * u * u * u;
    t0 += y[k]; t1 += u * y[k]; t2 += u * u * y[k];
  }
  // Solve the 3x3 normal equations by Cramer's rule.
  auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  const double d = det3(s0, s1, s2, s1, s2, s3, s2, s3, s4);
  const double p0 = det3(t0, s1, s2, t1, s2, s3, t2, s3, s4) / d;
  const double p1 = det3(s0, t0, s2, s1, t1, s3, s2, t2, s4) / d;
  const double p2 = det3(s0, s1, t0, s1, s2, t1, s2, s3, t2) / d;
  const double u_peak = -p1 / (2 * p2);
  const double peak = p0 + p1 * u_peak + p2 * u_peak * u_peak;

  // Half-maximum crossings from local straight-line fits on each flank.
  auto crossing = [&](int from, int step) {
    int k = from;
    while (k > 0 && k < bins - 1 && y[static_cast<std::size_t>(k)] > 0.5 * peak) k += step;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int q = k - 4; q <= k + 4; ++q) {
      sx += x[q]; sy += y[q]; sxx += x[q] * x[q]; sxy += x[q] * y[q]; ++m;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / m;
    return (0.5 * peak - icpt) / slope;
  };
  return crossing(c0, 1) - crossing(c0, -1);
}

double sampled_fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  const auto it = std::max_element(y.begin(), y.end());
  const double half = 0.5 * *it;
  std::size_t k = static_cast<std::size_t>(it - y.begin());
  std::size_t r = k, l = k;
  while (r + 1 < y.size() && y[r + 1] > half) ++r;
  while (l > 0 && y[l - 1] > half) --l;
  if (r + 1 >= y.size() || l == 0) throw std::runtime_error("half maximum outside the sampled range");
  const double xr = x[r] + (half - y[r]) * (x[r + 1] - x[r]) / (y[r + 1] - y[r]);
  const double xl = x[l - 1] + (half - y[l - 1]) * (x[l] - x[l - 1]) / (y[l] - y[l - 1]);
  return xr - xl;
}

}  // namespace oracle
