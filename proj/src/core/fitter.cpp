#include "hfslock/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "hfslock/error.hpp"

namespace hfslock {

std::vector<std::string> parameter_names(std::size_t n_components) {
  std::vector<std::string> names = {"A_lower",        "B_lower",         "A_upper",   "B_upper",
                                    "cog",            "gaussian_fwhm",   "lorentzian_fwhm",
                                    "amplitude",      "baseline_offset", "baseline_slope"};
  for (std::size_t k = 0; k < n_components; ++k) names.push_back("intensity_" + std::to_string(k));
  return names;
}

std::vector<double> flatten(const FitParameters& p) {
  std::vector<double> v = {p.lower.a,     p.lower.b,         p.upper.a,          p.upper.b,
                           p.cog,         p.gaussian_fwhm,   p.lorentzian_fwhm,  p.amplitude,
                           p.baseline_offset, p.baseline_slope};
  v.insert(v.end(), p.intensities.begin(), p.intensities.end());
  return v;
}

FitParameters unflatten(const std::vector<double>& v) {
  if (v.size() < index(Param::first_intensity)) throw ValidationError("parameter vector too short");
  FitParameters p;
  p.lower = {v[0], v[1]};
  p.upper = {v[2], v[3]};
  p.cog = v[4];
  p.gaussian_fwhm = v[5];
  p.lorentzian_fwhm = v[6];
  p.amplitude = v[7];
  p.baseline_offset = v[8];
  p.baseline_slope = v[9];
  p.intensities.assign(v.begin() + static_cast<std::ptrdiff_t>(index(Param::first_intensity)), v.end());
  return p;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::chi2_stalled:
      return "chi2_stalled";
    case Termination::small_step:
      return "small_step";
    case Termination::exact_fit:
      return "exact_fit";
    case Termination::damping_overflow:
      return "damping_overflow";
    case Termination::iteration_limit:
      return "iteration_limit";
    case Termination::degenerate:
      return "degenerate";
  }
  return "unknown";
}

std::size_t FitProblem::component_count() const {
  return enumerate_components(i, j_lower, j_upper).size();
}

void FitProblem::prepare() {
  trace.validate();
  if (!trace.frequency_axis_valid)
    throw ValidationError("trace has no frequency axis; run `linearize` on it first");
  if (!dipole_allowed(j_lower, j_upper))
    throw ValidationError("J=" + j_lower.str() + " -> J'=" + j_upper.str() + " is not dipole allowed");

  const auto pattern = enumerate_components(i, j_lower, j_upper);
  const std::size_t n = pattern.size();
  if (initial.intensities.empty()) {
    for (const auto& c : pattern) initial.intensities.push_back(c.rel_intensity);
  }
  if (initial.intensities.size() != n)
    throw ValidationError("initial intensities: expected " + std::to_string(n) + " values for J=" + j_lower.str() +
                          " -> J'=" + j_upper.str() + ", got " + std::to_string(initial.intensities.size()));
  double total = 0.0;
  for (double w : initial.intensities) {
    if (!(w >= 0.0)) throw ValidationError("initial intensities must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("initial intensities sum to zero");
  for (double& w : initial.intensities) w /= total;

  const std::size_t np = index(Param::first_intensity) + n;
  if (!fix_mask.empty() && fix_mask.size() != np)
    throw ValidationError("fix_mask: expected " + std::to_string(np) + " entries, got " + std::to_string(fix_mask.size()));
  const bool w_fixed = is_fixed(index(Param::first_intensity));
  for (std::size_t k = 0; k < n; ++k)
    if (is_fixed(index(Param::first_intensity) + k) != w_fixed)
      throw ValidationError("fix_mask: component intensities must be fixed or freed together");
  if (!w_fixed && is_fixed(index(Param::amplitude)))
    throw ValidationError("fix_mask: amplitude cannot be fixed while intensities are free");

  if (!std::isfinite(initial.gaussian_fwhm) || !std::isfinite(initial.lorentzian_fwhm) ||
      initial.gaussian_fwhm < 0.0 || initial.lorentzian_fwhm < 0.0)
    throw ValidationError("initial widths must be finite and non-negative");
  if (initial.gaussian_fwhm == 0.0 && initial.lorentzian_fwhm == 0.0)
    throw ValidationError("initial widths cannot both be zero");
  if (!is_fixed(index(Param::gaussian_fwhm)) && !(initial.gaussian_fwhm > 0.0))
    throw ValidationError("gaussian_fwhm must be positive when free (fix it to fit a pure Lorentzian)");
  if (!is_fixed(index(Param::lorentzian_fwhm)) && !(initial.lorentzian_fwhm > 0.0))
    throw ValidationError("lorentzian_fwhm must be positive when free (fix it to fit a pure Gaussian)");

  std::size_t free = 0;
  for (std::size_t k = 0; k < np; ++k)
    if (!is_fixed(k) && !(k == index(Param::amplitude) && !w_fixed)) ++free;
  if (free == 0) throw ValidationError("every parameter is fixed");
  if (trace.size() < 3 * free)
    throw ValidationError("need at least 3 samples per free parameter (" + std::to_string(trace.size()) +
                          " samples, " + std::to_string(free) + " free parameters)");
}

std::vector<HfsComponent> model_components(const FitProblem& problem, const FitParameters& params) {
  auto comps = enumerate_components(problem.i, problem.j_lower, problem.j_upper, params.lower, params.upper);
  if (params.intensities.size() != comps.size()) throw ValidationError("intensity count does not match components");
  for (std::size_t k = 0; k < comps.size(); ++k) comps[k].rel_intensity = params.intensities[k];
  return comps;
}

std::vector<double> model_eval(const FitProblem& problem, const FitParameters& params) {
  SpectrumModel m;
  m.components = model_components(problem, params);
  m.cog = params.cog;
  m.gaussian_fwhm = params.gaussian_fwhm;
  m.lorentzian_fwhm = params.lorentzian_fwhm;
  m.amplitude = params.amplitude;
  m.baseline_offset = params.baseline_offset;
  m.baseline_slope = params.baseline_slope;
  return m.evaluate(problem.trace.abscissa);
}

namespace {

constexpr std::size_t kA_lo = 0, kB_lo = 1, kA_up = 2, kB_up = 3, kCog = 4, kG = 5, kL = 6, kAmp = 7, kOff = 8,
                      kSlope = 9, kFirstW = 10;

// Internal coordinates: the flat layout with cog measured from the axis
// centre, free widths as logarithms and, with free intensities, heights
// (amplitude x intensity) in the intensity slots.
class Model {
 public:
  Model(const FitProblem& p, const FitOptions& opt) : problem_(p), opt_(opt) {
    const auto& x = p.trace.abscissa;
    ref_ = 0.5 * (x.front() + x.back());
    x_rel_.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) x_rel_[k] = x[k] - ref_;
    span_ = std::max(x.back() - x.front(), 1e-9);

    const auto pattern = enumerate_components(p.i, p.j_lower, p.j_upper);
    n_ = pattern.size();
    for (const auto& c : pattern) {
      ka_lo_.push_back(casimir_shift(p.i, p.j_lower, c.f_lower, {1.0, 0.0}));
      kb_lo_.push_back(casimir_shift(p.i, p.j_lower, c.f_lower, {0.0, 1.0}));
      ka_up_.push_back(casimir_shift(p.i, p.j_upper, c.f_upper, {1.0, 0.0}));
      kb_up_.push_back(casimir_shift(p.i, p.j_upper, c.f_upper, {0.0, 1.0}));
    }
    heights_ = !p.is_fixed(kFirstW);
    log_g_ = !p.is_fixed(kG);
    log_l_ = !p.is_fixed(kL);

    const auto [lo, hi] = std::minmax_element(p.trace.lif.begin(), p.trace.lif.end());
    signal_scale_ = *hi - *lo;
    if (!(signal_scale_ > 0.0)) signal_scale_ = std::max(std::abs(*hi), 1.0);

    const std::size_t np = kFirstW + n_;
    for (std::size_t k = 0; k < np; ++k) {
      if (p.is_fixed(k)) continue;
      if (k == kAmp && heights_) continue;
      free_.push_back(k);
    }
    profiles_.assign(n_, std::vector<double>(x.size()));
  }

  std::size_t rows() const { return x_rel_.size(); }
  const std::vector<std::size_t>& free() const { return free_; }
  bool heights() const { return heights_; }

  std::vector<double> to_internal(const FitParameters& p) const {
    std::vector<double> t = flatten(p);
    t[kCog] = p.cog - ref_;
    if (log_g_) t[kG] = std::log(p.gaussian_fwhm);
    if (log_l_) t[kL] = std::log(p.lorentzian_fwhm);
    if (heights_)
      for (std::size_t k = 0; k < n_; ++k) t[kFirstW + k] = p.amplitude * p.intensities[k];
    return t;
  }

  FitParameters to_public(const std::vector<double>& t) const {
    FitParameters p = unflatten(t);
    p.cog = t[kCog] + ref_;
    if (log_g_) p.gaussian_fwhm = std::exp(t[kG]);
    if (log_l_) p.lorentzian_fwhm = std::exp(t[kL]);
    if (heights_) {
      double total = 0.0;
      for (std::size_t k = 0; k < n_; ++k) total += t[kFirstW + k];
      p.amplitude = total;
      for (std::size_t k = 0; k < n_; ++k)
        p.intensities[k] = total > 0.0 ? t[kFirstW + k] / total : 1.0 / static_cast<double>(n_);
    }
    return p;
  }

  /// Keeps a trial point feasible: non-negative heights / amplitude, free
  /// widths between 1e-3 MHz and 100x the scan span.
  void project(std::vector<double>& t) const {
    const double lo = std::log(1e-3), hi = std::log(100.0 * span_);
    if (log_g_) t[kG] = std::clamp(t[kG], lo, hi);
    if (log_l_) t[kL] = std::clamp(t[kL], lo, hi);
    if (heights_) {
      for (std::size_t k = 0; k < n_; ++k) t[kFirstW + k] = std::max(t[kFirstW + k], 0.0);
    } else {
      t[kAmp] = std::max(t[kAmp], 0.0);
    }
  }

  void compute_profiles(const std::vector<double>& t, std::vector<std::vector<double>>& out) const {
    const double g = log_g_ ? std::exp(t[kG]) : t[kG];
    const double l = log_l_ ? std::exp(t[kL]) : t[kL];
    const auto shape = make_voigt_shape(g, l);
    for (std::size_t k = 0; k < n_; ++k) {
      const double offset = t[kA_up] * ka_up_[k] + t[kB_up] * kb_up_[k] - t[kA_lo] * ka_lo_[k] - t[kB_lo] * kb_lo_[k];
      simd::voigt_profile(x_rel_, t[kCog] + offset, shape, out[k]);
    }
  }

  void combine(const std::vector<double>& t, const std::vector<std::vector<double>>& prof, std::vector<double>& out) const {
    out.resize(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = t[kOff] + t[kSlope] * (x_rel_[r] - t[kCog]);
    for (std::size_t k = 0; k < n_; ++k) {
      const double c = heights_ ? t[kFirstW + k] : t[kAmp] * t[kFirstW + k];
      if (c == 0.0) continue;
      const auto& pk = prof[k];
      for (std::size_t r = 0; r < rows(); ++r) out[r] += c * pk[r];
    }
  }

  /// Evaluates the model and keeps the component profiles for the Jacobian.
  void evaluate(const std::vector<double>& t, std::vector<double>& out) {
    compute_profiles(t, profiles_);
    combine(t, profiles_, out);
  }

  static bool nonlinear(std::size_t k) { return k <= kL; }

  /// Parameters with a lower bound of zero in internal coordinates.
  bool bounded(std::size_t k) const { return heights_ ? k >= kFirstW : k == kAmp; }

  double step(const std::vector<double>& t, std::size_t k) const {
    return std::max(opt_.relative_step * std::abs(t[k]), floor(k));
  }

  /// Typical magnitude used to scale the step-size convergence test.
  double typical(const std::vector<double>& t, std::size_t k) const {
    if (k == kG || k == kL) return (k == kG ? log_g_ : log_l_) ? 1.0 : std::max(std::abs(t[k]), 1.0);
    if (k <= kCog) return std::max(std::abs(t[k]), 1.0);
    if (k == kSlope) return std::max(std::abs(t[k]), signal_scale_ / span_);
    return std::max(std::abs(t[k]), signal_scale_);
  }

  /// Forward differences around `t`, whose model `m0` was produced by the
  /// last call to evaluate().
  Eigen::MatrixXd jacobian(const std::vector<double>& t, const std::vector<double>& m0) const {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(free_.size()));
    std::vector<std::vector<double>> prof(n_, std::vector<double>(rows()));
    std::vector<double> m1;
    std::vector<double> tp = t;
    for (std::size_t c = 0; c < free_.size(); ++c) {
      const std::size_t k = free_[c];
      const double h_nominal = step(t, k);
      tp[k] = t[k] + h_nominal;
      const double h = tp[k] - t[k];
      if (nonlinear(k)) {
        compute_profiles(tp, prof);
        combine(tp, prof, m1);
      } else {
        combine(tp, profiles_, m1);
      }
      for (std::size_t r = 0; r < rows(); ++r) jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (m1[r] - m0[r]) / h;
      tp[k] = t[k];
    }
    return jac;
  }

 private:
  double floor(std::size_t k) const {
    if (k <= kCog) return opt_.step_floor_mhz;
    if (k == kG || k == kL) return (k == kG ? log_g_ : log_l_) ? opt_.relative_step : opt_.step_floor_mhz;
    if (k == kSlope) return opt_.relative_step * signal_scale_ / span_;
    return opt_.relative_step * signal_scale_;
  }

  const FitProblem& problem_;
  const FitOptions& opt_;
  double ref_ = 0.0;
  double span_ = 1.0;
  double signal_scale_ = 1.0;
  std::size_t n_ = 0;
  bool heights_ = true;
  bool log_g_ = true;
  bool log_l_ = true;
  std::vector<double> x_rel_;
  std::vector<double> ka_lo_, kb_lo_, ka_up_, kb_up_;
  std::vector<std::size_t> free_;
  std::vector<std::vector<double>> profiles_;
};

double sum_squares(const std::vector<double>& y, const std::vector<double>& m) {
  double s = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double d = y[k] - m[k];
    s += d * d;
  }
  return s;
}

}  // namespace

namespace detail {

Jacobian forward_jacobian(FitProblem problem, const FitParameters& params, const FitOptions& options) {
  problem.prepare();
  Model model(problem, options);
  const auto t = model.to_internal(params);
  std::vector<double> m0;
  model.evaluate(t, m0);
  const Eigen::MatrixXd jac = model.jacobian(t, m0);
  Jacobian out;
  out.rows = static_cast<std::size_t>(jac.rows());
  out.cols = static_cast<std::size_t>(jac.cols());
  out.flat_index = model.free();
  out.values.resize(out.rows * out.cols);
  for (std::size_t r = 0; r < out.rows; ++r)
    for (std::size_t c = 0; c < out.cols; ++c)
      out.values[r * out.cols + c] = jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return out;
}

}  // namespace detail

namespace {

struct Stage {
  bool done = false;
  Termination termination = Termination::iteration_limit;
};

// Damped Gauss-Newton iterations over the model's free set, updating the
// internal vector `t` (whose model values are `m`) and `chi2` in place.
// Heights (or the amplitude) sitting on their zero bound with a gradient
// pointing outward are held for the iteration.
Stage lm_stage(Model& model, const std::vector<double>& y, std::vector<double>& t, std::vector<double>& m,
               double& chi2, FitResult& result, const FitOptions& options, double exact_threshold) {
  const auto& free = model.free();
  const std::size_t n_rows = model.rows();
  const std::size_t n_free = free.size();
  Stage st;
  if (chi2 <= exact_threshold) {
    st.done = true;
    st.termination = Termination::exact_fit;
    return st;
  }
  double lambda = options.damping_initial;
  int small_changes = 0;
  Eigen::VectorXd resid(static_cast<Eigen::Index>(n_rows));
  std::vector<double> trial, m_trial;
  while (result.iterations < static_cast<std::size_t>(options.max_iterations)) {
    ++result.iterations;
    const Eigen::MatrixXd jac = model.jacobian(t, m);
    for (std::size_t r = 0; r < n_rows; ++r) resid(static_cast<Eigen::Index>(r)) = y[r] - m[r];
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * resid;
    const double max_diag = normal.diagonal().maxCoeff();

    std::vector<bool> held(n_free, false);
    for (std::size_t c = 0; c < n_free; ++c)
      held[c] = model.bounded(free[c]) && t[free[c]] <= 0.0 && grad(static_cast<Eigen::Index>(c)) <= 0.0;

    for (;;) {
      Eigen::MatrixXd damped = normal;
      Eigen::VectorXd rhs = grad;
      for (Eigen::Index k = 0; k < damped.rows(); ++k) {
        const double d = normal(k, k) > 0.0 ? normal(k, k) : max_diag * 1e-12 + 1e-300;
        damped(k, k) += lambda * d;
      }
      for (std::size_t c = 0; c < n_free; ++c) {
        if (!held[c]) continue;
        const auto k = static_cast<Eigen::Index>(c);
        damped.row(k).setZero();
        damped.col(k).setZero();
        damped(k, k) = 1.0;
        rhs(k) = 0.0;
      }
      const Eigen::VectorXd delta = damped.ldlt().solve(rhs);

      trial = t;
      for (std::size_t c = 0; c < n_free; ++c) trial[free[c]] += delta(static_cast<Eigen::Index>(c));
      model.project(trial);
      double scaled_norm = 0.0;
      for (std::size_t c = 0; c < n_free; ++c) {
        const double s = (trial[free[c]] - t[free[c]]) / model.typical(t, free[c]);
        scaled_norm += s * s;
      }
      scaled_norm = std::sqrt(scaled_norm);

      bool finite = delta.allFinite();
      double chi2_trial = std::numeric_limits<double>::infinity();
      if (finite) {
        model.evaluate(trial, m_trial);
        chi2_trial = sum_squares(y, m_trial);
        finite = std::isfinite(chi2_trial);
      }

      if (finite && chi2_trial < chi2) {
        const double rel = (chi2 - chi2_trial) / chi2;
        small_changes = rel < options.chi2_tolerance ? small_changes + 1 : 0;
        t.swap(trial);
        m.swap(m_trial);
        chi2 = chi2_trial;
        result.chi2_history.push_back(chi2);
        lambda = std::max(lambda / options.damping_factor, 1e-300);
        if (chi2 <= exact_threshold) st.termination = Termination::exact_fit;
        else if (small_changes >= options.chi2_patience) st.termination = Termination::chi2_stalled;
        else if (scaled_norm < options.step_tolerance) st.termination = Termination::small_step;
        else break;
        st.done = true;
        return st;
      }
      lambda *= options.damping_factor;
      if (lambda > options.damping_max) {
        // No downhill step at any damping: a numerical stationary point.
        model.evaluate(t, m);
        st.done = true;
        st.termination = Termination::damping_overflow;
        return st;
      }
    }
  }
  model.evaluate(t, m);
  return st;
}

}  // namespace

FitResult fit(FitProblem problem, const FitOptions& options) {
  problem.prepare();
  const auto& y = problem.trace.lif;
  const std::size_t n_rows = y.size();
  const std::size_t np = index(Param::first_intensity) + problem.initial.intensities.size();

  // Continuation: quadrupole constants and intensities join the fit after
  // the dipole structure has settled.
  const std::vector<bool> user = problem.fix_mask.empty() ? std::vector<bool>(np, false) : problem.fix_mask;
  std::vector<std::vector<bool>> masks;
  if (options.staged) {
    auto held_w = user;
    for (std::size_t k = index(Param::first_intensity); k < np; ++k) held_w[k] = true;
    auto held_wb = held_w;
    held_wb[index(Param::b_lower)] = true;
    held_wb[index(Param::b_upper)] = true;
    masks = {held_wb, held_w};
  }
  masks.push_back(user);
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());

  double signal_power = 0.0;
  for (double v : y) signal_power += v * v;
  const double exact_threshold = 1e-28 * std::max(signal_power, std::numeric_limits<double>::min());

  FitResult result;
  FitParameters current = problem.initial;
  const double start_chi2 = sum_squares(y, model_eval(problem, problem.initial));
  std::optional<Model> model;
  std::vector<double> t, m;
  Stage st;

  if (options.staged) {
    // Coarse pass on a threefold Gaussian width: the smoothed chi2 surface
    // pulls the two A constants into the right basin before any fine
    // structure is fitted. Only A and cog are carried forward.
    FitProblem coarse = problem;
    coarse.initial.gaussian_fwhm *= 3.0;
    coarse.fix_mask = masks.front();
    coarse.fix_mask[kG] = coarse.fix_mask[kL] = true;
    FitOptions loose = options;
    loose.max_iterations = std::min(options.max_iterations, 60);
    loose.chi2_tolerance = 1e-6;
    model.emplace(coarse, loose);
    t = model->to_internal(coarse.initial);
    model->evaluate(t, m);
    double chi2 = sum_squares(y, m);
    FitResult scratch;
    lm_stage(*model, y, t, m, chi2, scratch, loose, exact_threshold);
    const FitParameters c = model->to_public(t);
    current.lower.a = c.lower.a;
    current.upper.a = c.upper.a;
    current.cog = c.cog;
    result.iterations = scratch.iterations;
  }
  for (std::size_t s = 0; s < masks.size(); ++s) {
    problem.fix_mask = masks[s];
    model.emplace(problem, options);
    t = model->to_internal(current);
    model->evaluate(t, m);
    double chi2 = sum_squares(y, m);
    if (s == 0) result.chi2_history.push_back(chi2);
    st = lm_stage(*model, y, t, m, chi2, result, options, exact_threshold);
    current = model->to_public(t);
    if (!st.done) break;
  }
  problem.fix_mask = user;
  // The coarse pass optimises a different surface, so an early stop can
  // leave the fit worse off than where it began.
  if (!st.done && sum_squares(y, model_eval(problem, current)) > start_chi2) current = problem.initial;
  if (masks.back() != user || !st.done) {
    // Stopped early: report in the caller's parametrisation.
    model.emplace(problem, options);
    t = model->to_internal(current);
  }
  const std::size_t n_free = model->free().size();
  const auto& free = model->free();
  result.free_parameters = n_free;
  result.converged = st.done;
  result.termination = st.termination;

  result.parameters = current;
  result.model = model_eval(problem, result.parameters);
  result.deviation.resize(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) result.deviation[r] = y[r] - result.model[r];
  result.chi2 = 0.0;
  for (double d : result.deviation) result.chi2 += d * d;

  // Uncertainties from the normal matrix at the solution.
  result.sigmas.assign(np, std::nullopt);
  model->evaluate(t, m);
  const Eigen::MatrixXd jac = model->jacobian(t, m);
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  Eigen::VectorXd scale = normal.diagonal().cwiseSqrt();
  bool degenerate = (scale.array() <= 0.0).any();
  Eigen::MatrixXd cov;
  if (!degenerate) {
    const Eigen::MatrixXd scaled = scale.cwiseInverse().asDiagonal() * normal * scale.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
    const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    degenerate = !(hi > 0.0) || !(lo / hi >= options.min_rcond);
    if (!degenerate) {
      const Eigen::MatrixXd inv_scaled = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                                         eig.eigenvectors().transpose();
      cov = scale.cwiseInverse().asDiagonal() * inv_scaled * scale.cwiseInverse().asDiagonal();
    }
  }
  result.degenerate = degenerate;
  if (degenerate && result.converged) result.termination = Termination::degenerate;

  if (result.converged && !degenerate && n_rows > n_free) {
    const double sigma2 = result.chi2 / static_cast<double>(n_rows - n_free);
    cov *= sigma2;
    const auto& pub = result.parameters;
    std::vector<std::ptrdiff_t> col_of(np, -1);
    for (std::size_t c = 0; c < n_free; ++c) col_of[free[c]] = static_cast<std::ptrdiff_t>(c);
    auto var = [&](std::size_t k) { return cov(col_of[k], col_of[k]); };

    for (std::size_t k = 0; k < index(Param::first_intensity); ++k) {
      if (col_of[k] < 0) continue;
      double s = std::sqrt(std::max(var(k), 0.0));
      if (k == kG) s *= pub.gaussian_fwhm;
      if (k == kL) s *= pub.lorentzian_fwhm;
      result.sigmas[k] = s;
    }
    if (model->heights()) {
      // amplitude = sum h, w_k = h_k / amplitude.
      const std::size_t n = pub.intensities.size();
      const double amp = pub.amplitude;
      std::vector<Eigen::Index> cols(n);
      for (std::size_t k = 0; k < n; ++k) cols[k] = col_of[kFirstW + k];
      double var_amp = 0.0;
      for (auto a : cols)
        for (auto b : cols) var_amp += cov(a, b);
      result.sigmas[kAmp] = std::sqrt(std::max(var_amp, 0.0));
      if (amp > 0.0) {
        for (std::size_t k = 0; k < n; ++k) {
          double v = 0.0;
          for (std::size_t a = 0; a < n; ++a) {
            const double ta = ((a == k ? 1.0 : 0.0) - pub.intensities[k]) / amp;
            for (std::size_t b = 0; b < n; ++b) {
              const double tb = ((b == k ? 1.0 : 0.0) - pub.intensities[k]) / amp;
              v += ta * tb * cov(cols[a], cols[b]);
            }
          }
          result.sigmas[kFirstW + k] = std::sqrt(std::max(v, 0.0));
        }
      }
    }
  }
  return result;
}

double snr_estimate(const Trace& trace, const FitResult& result) {
  if (result.model.size() != trace.size() || result.deviation.size() != trace.size())
    throw ValidationError("snr_estimate: fit result does not belong to this trace");
  const auto& p = result.parameters;
  double peak = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double base = p.baseline_offset + p.baseline_slope * (trace.abscissa[k] - p.cog);
    peak = std::max(peak, result.model[k] - base);
  }
  double ss = 0.0;
  for (double d : result.deviation) ss += d * d;
  const double rms = trace.size() ? std::sqrt(ss / static_cast<double>(trace.size())) : 0.0;
  if (!(rms > 0.0)) return std::numeric_limits<double>::infinity();
  return peak / rms;
}

}  // namespace hfslock
