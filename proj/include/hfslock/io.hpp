#pragma once

// JSON and CSV forms of the library's results.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfslock/fitter.hpp"
#include "hfslock/levels.hpp"
#include "hfslock/linearize.hpp"
#include "hfslock/locksim.hpp"

namespace hfslock::io {

using json = nlohmann::ordered_json;

json to_json(const Level& level);
json to_json(const PredictedLine& line);
json to_json(const std::vector<PredictedLine>& lines);
json to_json(const StabilityStats& stats);

/// Names, values and 1-sigma uncertainties (null when absent) of the fitted
/// parameters, plus fit diagnostics and the component table.
json fit_result_json(const FitProblem& problem, const FitResult& result);

/// Marker positions, fsr, anchor and the monotone flag of a reconstructed axis.
json axis_json(const FrequencyAxis& axis);

/// Lock run summary: discriminator, lock state and both stability summaries.
json lock_stats_json(const LockRun& run);

/// Columns abscissa,data,model,deviation.
void write_deviation_csv(const Trace& trace, const FitResult& result, const std::filesystem::path& path);

/// Columns t,frequency_mhz,error,control.
void write_lock_csv(const LockRun& run, const std::filesystem::path& path);

/// Pretty-printed with a trailing newline.
void write_json(const json& j, const std::filesystem::path& path);

}  // namespace hfslock::io
