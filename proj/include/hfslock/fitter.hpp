#pragma once

// Least-squares fit of a hyperfine scan with component positions locked to
// Casimir's formula: the only free position parameter beyond the hyperfine
// constants is the centre of gravity.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hfslock/hfs.hpp"
#include "hfslock/lineshape.hpp"

namespace hfslock {

/// Named parameter set of the fit model, in user units (MHz, detector units).
struct FitParameters {
  HfsConstants lower;
  HfsConstants upper;
  double cog = 0.0;
  double gaussian_fwhm = 0.0;
  double lorentzian_fwhm = 0.0;
  double amplitude = 1.0;
  double baseline_offset = 0.0;
  double baseline_slope = 0.0;  // per MHz from cog
  std::vector<double> intensities;  // one per component, summing to 1
};

/// Positions of the scalar parameters in the flattened vector; component
/// intensities follow from `first_intensity` on.
enum class Param : std::size_t {
  a_lower,
  b_lower,
  a_upper,
  b_upper,
  cog,
  gaussian_fwhm,
  lorentzian_fwhm,
  amplitude,
  baseline_offset,
  baseline_slope,
  first_intensity,
};

inline constexpr std::size_t index(Param p) noexcept { return static_cast<std::size_t>(p); }

/// "A_lower", "B_lower", ..., "intensity_0", ...
std::vector<std::string> parameter_names(std::size_t n_components);

std::vector<double> flatten(const FitParameters& p);
FitParameters unflatten(const std::vector<double>& v);

struct FitProblem {
  Trace trace;
  HalfInt i;
  HalfInt j_lower;
  HalfInt j_upper;
  FitParameters initial;
  /// true = held fixed. Empty means every parameter is free. Intensity
  /// entries must be all fixed or all free; with free intensities the overall
  /// amplitude follows from them and must not be fixed on its own.
  std::vector<bool> fix_mask;

  std::size_t component_count() const;

  /// Fills empty initial intensities with the normalised line strengths and
  /// checks every precondition of `fit`. Throws ValidationError.
  void prepare();

  bool is_fixed(std::size_t flat_index) const { return !fix_mask.empty() && fix_mask[flat_index]; }
};

struct FitOptions {
  double relative_step = 1e-6;
  double step_floor_mhz = 1e-3;
  double damping_initial = 1e-3;
  double damping_factor = 3.0;
  double damping_max = 1e16;
  double chi2_tolerance = 1e-10;
  int chi2_patience = 3;
  double step_tolerance = 1e-8;
  /// Total across stages.
  int max_iterations = 500;
  /// Fit with B and the intensities held first, then release them in turn.
  bool staged = true;
  /// Reciprocal condition number of the scaled normal matrix below which the
  /// parametrisation counts as degenerate.
  double min_rcond = 1e-12;
};

enum class Termination { chi2_stalled, small_step, exact_fit, damping_overflow, iteration_limit, degenerate };

std::string to_string(Termination t);

struct FitResult {
  FitParameters parameters;
  /// Aligned with parameter_names(); empty entries for fixed parameters, and
  /// all empty unless the fit converged with a well-conditioned normal matrix.
  std::vector<std::optional<double>> sigmas;
  double chi2 = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;
  Termination termination = Termination::iteration_limit;
  std::size_t free_parameters = 0;
  std::vector<double> model;      // best-fit model on the trace abscissa
  std::vector<double> deviation;  // data - model
  std::vector<double> chi2_history;  // chi2 after each accepted step, starting with the initial value
};

/// Component list (F, F', offset, intensity) for a parameter set.
std::vector<HfsComponent> model_components(const FitProblem& problem, const FitParameters& params);

/// Predicted detector values on the trace abscissa.
std::vector<double> model_eval(const FitProblem& problem, const FitParameters& params);

/// Damped (Levenberg-Marquardt) least squares with a forward-difference Jacobian.
FitResult fit(FitProblem problem, const FitOptions& options = {});

/// Peak of the fitted model above its baseline divided by the RMS of the
/// deviation curve. +infinity for an exact fit.
double snr_estimate(const Trace& trace, const FitResult& result);

namespace detail {

/// Forward-difference Jacobian of the model at `params`, row-major
/// trace.size() x n_free. Columns follow the flat parameter order over the
/// free parameters, in internal coordinates: widths enter as log-widths and,
/// when intensities are free, the intensity columns are component heights
/// (amplitude x intensity) and there is no amplitude column.
struct Jacobian {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> flat_index;  // public parameter of each column
};
Jacobian forward_jacobian(FitProblem problem, const FitParameters& params, const FitOptions& options = {});

}  // namespace detail

}  // namespace hfslock
