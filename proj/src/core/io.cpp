#include "hfslock/io.hpp"

#include <cmath>
#include <fstream>

#include "hfslock/error.hpp"
#include "hfslock/text.hpp"

namespace hfslock::io {

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json stats_map(const std::map<double, double>& m) {
  json arr = json::array();
  for (const auto& [tau, v] : m) arr.push_back({{"averaging_time_s", tau}, {"value_mhz", v}});
  return arr;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

}  // namespace

json to_json(const Level& level) {
  json j = {{"label", level.label},
            {"energy_cm1", level.energy.cm1()},
            {"J", level.j.str()},
            {"parity", level.parity == Parity::even ? "even" : "odd"}};
  if (level.hfs) {
    j["A_mhz"] = level.hfs->a;
    j["B_mhz"] = level.hfs->b;
  } else {
    j["A_mhz"] = nullptr;
    j["B_mhz"] = nullptr;
  }
  return j;
}

json to_json(const PredictedLine& line) {
  json fl = json::array();
  for (const auto& f : line.fluorescence_candidates)
    fl.push_back({{"final_level", to_json(f.final_level)},
                  {"vacuum_wavelength_nm", f.vacuum_wavelength},
                  {"air_wavelength_nm", f.air_wavelength}});
  json j = {{"lower", to_json(line.lower)},
            {"upper", to_json(line.upper)},
            {"wavenumber_cm1", line.wavenumber.cm1()},
            {"vacuum_wavelength_nm", line.vacuum_wavelength},
            {"boltzmann_weight", line.boltzmann_weight},
            {"fluorescence_candidates", fl}};
  if (line.match_quality) j["match_quality_nm"] = *line.match_quality;
  return j;
}

json to_json(const std::vector<PredictedLine>& lines) {
  json arr = json::array();
  for (const auto& l : lines) arr.push_back(to_json(l));
  return arr;
}

json to_json(const StabilityStats& stats) {
  return {{"windowed_spread", stats_map(stats.windowed_spread)},
          {"drift_slope_mhz_per_h", stats.drift_slope},
          {"allan_deviation", stats_map(stats.allan_deviation)}};
}

json fit_result_json(const FitProblem& problem, const FitResult& result) {
  const auto& p = result.parameters;
  const auto names = parameter_names(p.intensities.size());
  const auto values = flatten(p);
  json params = json::array();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto& s = k < result.sigmas.size() ? result.sigmas[k] : std::nullopt;
    params.push_back({{"name", names[k]},
                      {"value", values[k]},
                      {"sigma", s ? json(*s) : json(nullptr)},
                      {"fixed", problem.is_fixed(k)}});
  }
  json comps = json::array();
  for (const auto& c : model_components(problem, p))
    comps.push_back({{"F", c.f_lower.str()},
                     {"F_prime", c.f_upper.str()},
                     {"offset_mhz", c.offset},
                     {"intensity", c.rel_intensity},
                     {"diagonal", c.diagonal}});
  double ss = 0.0;
  for (double d : result.deviation) ss += d * d;
  const double rms = result.deviation.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(result.deviation.size()));
  return {{"quantum_numbers", {{"I", problem.i.str()}, {"J_lower", problem.j_lower.str()}, {"J_upper", problem.j_upper.str()}}},
          {"converged", result.converged},
          {"degenerate", result.degenerate},
          {"termination", to_string(result.termination)},
          {"iterations", result.iterations},
          {"samples", problem.trace.size()},
          {"free_parameters", result.free_parameters},
          {"chi2", result.chi2},
          {"deviation_rms", rms},
          {"snr", number_or_null(result.model.empty() ? 0.0 : snr_estimate(problem.trace, result))},
          {"parameters", params},
          {"components", comps}};
}

json axis_json(const FrequencyAxis& axis) {
  return {{"marker_positions", axis.knot_positions},
          {"marker_frequencies_mhz", axis.knot_frequencies},
          {"fsr_mhz", axis.fsr},
          {"fsr_uncertainty_mhz", axis.fsr_uncertainty},
          {"scale_uncertainty", axis.scale_uncertainty},
          {"anchor", {{"sample", axis.anchor.sample},
                      {"frequency_mhz", axis.anchor.frequency},
                      {"uncertainty_mhz", axis.anchor.uncertainty}}},
          {"offset_mhz", axis.offset},
          {"monotone", axis.monotone},
          {"samples", axis.frequency.size()}};
}

json lock_stats_json(const LockRun& run) {
  const auto& d = run.discriminator;
  return {{"engaged", run.engaged},
          {"locked", run.locked},
          {"lock_lost_at_s", run.lock_lost_at ? json(*run.lock_lost_at) : json(nullptr)},
          {"windows", run.series.size()},
          {"discriminator", {{"lock_point_mhz", d.lock_point},
                             {"peak_height", d.peak_height},
                             {"fwhm_mhz", d.fwhm},
                             {"slope_per_mhz", d.slope}}},
          {"laser", to_json(run.stats)},
          {"discriminator_reading", to_json(run.discriminator_stats)}};
}

void write_deviation_csv(const Trace& trace, const FitResult& result, const std::filesystem::path& path) {
  if (result.model.size() != trace.size()) throw ValidationError("fit result does not match trace");
  auto out = open_out(path);
  out << "abscissa,data,model,deviation\n";
  for (std::size_t k = 0; k < trace.size(); ++k)
    out << text::format_double(trace.abscissa[k]) << ',' << text::format_double(trace.lif[k]) << ','
        << text::format_double(result.model[k]) << ',' << text::format_double(result.deviation[k]) << '\n';
}

void write_lock_csv(const LockRun& run, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,frequency_mhz,error,control\n";
  for (const auto& s : run.series)
    out << text::format_double(s.t) << ',' << text::format_double(s.laser_frequency) << ','
        << text::format_double(s.error) << ',' << text::format_double(s.control) << '\n';
}

void write_json(const json& j, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw ValidationError("error while writing " + path.string());
}

}  // namespace hfslock::io
