#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hfslock/cli.hpp"
#include "hfslock/error.hpp"
#include "hfslock/fitter.hpp"
#include "hfslock/io.hpp"
#include "hfslock/kv_config.hpp"
#include "hfslock/levels.hpp"
#include "hfslock/linearize.hpp"
#include "hfslock/locksim.hpp"
#include "hfslock/simd/kernels.hpp"
#include "hfslock/text.hpp"
#include "hfslock/version.hpp"

namespace hfslock::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string manifest;
  std::string isa;
};

// 64-bit FNV-1a of a file, recorded so a manifest pins its inputs.
std::string file_digest(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "";
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize k = 0; k < in.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 1099511628211ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args) {
    j_ = {{"tool", "hfslock"},
          {"version", version},
          {"command", std::move(command)},
          {"arguments", std::move(args)},
          {"isa", std::string(simd::isa_name(simd::active_isa()))},
          {"config", json::object()},
          {"seeds", json::object()},
          {"inputs", json::array()},
          {"outputs", json::array()}};
  }
  void input(const fs::path& p) { j_["inputs"].push_back({{"path", p.string()}, {"fnv1a64", file_digest(p)}}); }
  void output(const fs::path& p) { j_["outputs"].push_back(p.string()); }
  void seed(const std::string& name, std::uint64_t v) { j_["seeds"][name] = v; }
  void config(const std::string& k, const json& v) { j_["config"][k] = v; }
  void config(const KvConfig& c) {
    for (const auto& [k, v] : c.resolved()) j_["config"][k] = v;
  }
  void write(const fs::path& p) {
    j_["outputs"].push_back(p.string());
    io::write_json(j_, p);
  }

 private:
  json j_;
};

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

fs::path manifest_path(const Globals& g, const fs::path& out) {
  if (!g.manifest.empty()) return g.manifest;
  return sibling(out, ".manifest.json");
}

void emit_json(const json& j, const std::string& out, std::ostream& stdout_stream) {
  if (out == "-") stdout_stream << j.dump(2) << '\n';
  else io::write_json(j, out);
}

// Spectrum model keys shared by synth, fit and lock configs, under `prefix`.
struct LineSpec {
  HalfInt i, j_lower, j_upper;
};

LineSpec read_line_spec(const KvConfig& c, const std::string& prefix) {
  LineSpec s{c.get_half_int(prefix + "I"), c.get_half_int(prefix + "J_lower"), c.get_half_int(prefix + "J_upper")};
  if (!dipole_allowed(s.j_lower, s.j_upper))
    throw ValidationError(c.source() + ": fields '" + prefix + "J_lower'/'" + prefix + "J_upper': J=" + s.j_lower.str() +
                          " -> J'=" + s.j_upper.str() + " violates |dJ| <= 1 (or is 0 -> 0)");
  return s;
}

SpectrumModel read_model(const KvConfig& c, const std::string& prefix, const LineSpec& line) {
  const HfsConstants lower{c.get_double(prefix + "lower.A"), c.get_double(prefix + "lower.B", 0.0)};
  const HfsConstants upper{c.get_double(prefix + "upper.A"), c.get_double(prefix + "upper.B", 0.0)};
  SpectrumModel m;
  m.components = enumerate_components(line.i, line.j_lower, line.j_upper, lower, upper);
  if (c.has(prefix + "intensities")) {
    auto w = c.get_double_list(prefix + "intensities");
    if (w.size() != m.components.size())
      throw ValidationError(c.source() + ": field '" + prefix + "intensities' needs " +
                            std::to_string(m.components.size()) + " values");
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) throw ValidationError(c.source() + ": field '" + prefix + "intensities' sums to zero");
    for (std::size_t k = 0; k < w.size(); ++k) m.components[k].rel_intensity = w[k] / total;
  }
  m.cog = c.get_double(prefix + "cog", 0.0);
  m.gaussian_fwhm = c.get_double(prefix + "width.gaussian");
  m.lorentzian_fwhm = c.get_double(prefix + "width.lorentzian");
  m.amplitude = c.get_double(prefix + "amplitude", 1.0);
  m.baseline_offset = c.get_double(prefix + "baseline.offset", 0.0);
  m.baseline_slope = c.get_double(prefix + "baseline.slope", 0.0);
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(c.source() + ": " + e.what());
  }
  return m;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Globals& g, const std::string& config_path, const std::vector<std::string>& args) {
  KvConfig c = KvConfig::load(config_path);
  const LineSpec line = read_line_spec(c, "");
  const SpectrumModel model = read_model(c, "", line);

  const double start = c.get_double("axis.start");
  const double stop = c.get_double("axis.stop");
  const long long points = c.get_int("axis.points", 2001);
  if (points < 2) throw ValidationError(c.source() + ": field 'axis.points' must be at least 2");
  if (!(stop > start)) throw ValidationError(c.source() + ": field 'axis.stop' must exceed 'axis.start'");
  std::vector<double> axis(static_cast<std::size_t>(points));
  for (long long k = 0; k < points; ++k)
    axis[static_cast<std::size_t>(k)] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(points - 1);

  std::optional<GaussianNoise> noise;
  const auto sigma = c.find_double("noise.sigma");
  const auto snr = c.find_double("noise.snr");
  if (sigma && snr) throw ValidationError(c.source() + ": give either 'noise.sigma' or 'noise.snr', not both");
  std::uint64_t seed = c.get_seed("noise.seed", 1);
  if (g.seed) {
    seed = *g.seed;
    c.record("noise.seed", std::to_string(seed));
  }
  if (sigma || snr) {
    double s = sigma.value_or(0.0);
    if (snr) {
      if (!(*snr > 0.0)) throw ValidationError(c.source() + ": field 'noise.snr' must be positive");
      const auto clean = model.evaluate(std::span<const double>(axis));
      double peak = 0.0;
      for (std::size_t k = 0; k < axis.size(); ++k) peak = std::max(peak, clean[k] - model.baseline(axis[k]));
      s = peak / *snr;
      c.record("noise.sigma", text::format_double(s));
    }
    if (s < 0.0) throw ValidationError(c.source() + ": field 'noise.sigma' must be non-negative");
    noise = GaussianNoise{s, seed};
  }
  c.reject_unused();

  const Trace trace = synthesize(model, axis, noise);
  const fs::path out = g.out.empty() ? "trace.csv" : g.out;
  write_trace_csv(trace, out);

  Manifest m("synth", args);
  m.input(config_path);
  m.config(c);
  m.config("components", model.components.size());
  m.seed("noise", seed);
  m.output(out);
  m.write(manifest_path(g, out));
  return success;
}

// ---------------------------------------------------------------- fit

std::vector<bool> parse_fix_list(const std::vector<std::string>& names, std::size_t n_components, const std::string& src) {
  const auto all = parameter_names(n_components);
  std::vector<bool> mask(all.size(), false);
  for (const auto& name : names) {
    if (name == "intensities") {
      for (std::size_t k = index(Param::first_intensity); k < all.size(); ++k) mask[k] = true;
      continue;
    }
    const auto it = std::find(all.begin(), all.end(), name);
    if (it == all.end()) throw ValidationError(src + ": field 'fix': unknown parameter '" + name + "'");
    mask[static_cast<std::size_t>(it - all.begin())] = true;
  }
  return mask;
}

int cmd_fit(const Globals& g, const std::string& trace_path, const std::string& config_path, const std::string& i_flag,
            const std::string& jl_flag, const std::string& ju_flag, const std::vector<std::string>& args) {
  KvConfig c;
  if (!config_path.empty()) c = KvConfig::load(config_path);
  if (!i_flag.empty()) c.set("I", i_flag);
  if (!jl_flag.empty()) c.set("J_lower", jl_flag);
  if (!ju_flag.empty()) c.set("J_upper", ju_flag);

  FitProblem problem;
  problem.trace = read_trace_csv(trace_path);
  if (!problem.trace.frequency_axis_valid)
    throw ValidationError(trace_path + " has no frequency axis (abscissa in samples); run `hfslock linearize` on it first");
  const LineSpec line = read_line_spec(c, "");
  problem.i = line.i;
  problem.j_lower = line.j_lower;
  problem.j_upper = line.j_upper;

  const auto& x = problem.trace.abscissa;
  const auto& y = problem.trace.lif;
  const double y_min = *std::min_element(y.begin(), y.end());
  const double y_max = *std::max_element(y.begin(), y.end());
  double centroid = 0.0, weight = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    centroid += x[k] * (y[k] - y_min);
    weight += y[k] - y_min;
  }
  centroid = weight > 0.0 ? centroid / weight : 0.5 * (x.front() + x.back());

  FitParameters& p = problem.initial;
  p.lower = {c.get_double("lower.A"), c.get_double("lower.B", 0.0)};
  p.upper = {c.get_double("upper.A"), c.get_double("upper.B", 0.0)};
  p.cog = c.get_double("cog", centroid);
  p.gaussian_fwhm = c.get_double("width.gaussian", 300.0);
  p.lorentzian_fwhm = c.get_double("width.lorentzian", 30.0);
  p.baseline_offset = c.get_double("baseline.offset", y_min);
  p.baseline_slope = c.get_double("baseline.slope", 0.0);
  if (c.has("intensities")) p.intensities = c.get_double_list("intensities");
  const std::size_t n = problem.component_count();
  problem.fix_mask = parse_fix_list(c.get_string_list("fix"), n, c.source());
  if (const auto amp = c.find_double("amplitude")) {
    p.amplitude = *amp;
  } else {
    // Scale a unit-amplitude model to the observed peak height.
    FitProblem probe = problem;
    probe.initial.amplitude = 1.0;
    probe.initial.baseline_offset = 0.0;
    probe.initial.baseline_slope = 0.0;
    probe.prepare();
    const auto unit = model_eval(probe, probe.initial);
    const double peak = *std::max_element(unit.begin(), unit.end());
    p.amplitude = peak > 0.0 ? (y_max - p.baseline_offset) / peak : 1.0;
    c.record("amplitude", text::format_double(p.amplitude));
  }
  FitOptions options;
  options.max_iterations = static_cast<int>(c.get_int("max_iterations", options.max_iterations));
  c.reject_unused();

  const FitResult result = fit(problem, options);
  problem.prepare();

  const fs::path out = g.out.empty() ? "fit.json" : g.out;
  const fs::path dev = sibling(out, ".deviation.csv");
  json j = io::fit_result_json(problem, result);
  j["deviation_csv"] = dev.filename().string();
  io::write_json(j, out);
  io::write_deviation_csv(problem.trace, result, dev);

  Manifest m("fit", args);
  m.input(trace_path);
  if (!config_path.empty()) m.input(config_path);
  m.config(c);
  m.output(out);
  m.output(dev);
  m.write(manifest_path(g, out));
  return result.converged ? success : numerical_failure;
}

// ---------------------------------------------------------------- predict / classify / mg-offset

int cmd_predict(const Globals& g, const std::string& db_path, double lo, double hi, double temperature,
                const std::vector<std::string>& args, std::ostream& out_stream) {
  const auto db = load_database(db_path);
  PredictOptions opt;
  opt.temperature = temperature;
  const auto lines = predict(db, lo, hi, opt);
  const std::string out = g.out.empty() ? "predict.json" : g.out;
  emit_json(io::to_json(lines), out, out_stream);

  Manifest m("predict", args);
  m.input(db_path);
  m.config("lambda_min_nm", lo);
  m.config("lambda_max_nm", hi);
  m.config("temperature_k", temperature);
  if (out != "-") {
    m.output(out);
    m.write(manifest_path(g, out));
  } else if (!g.manifest.empty()) {
    m.write(g.manifest);
  }
  return success;
}

int cmd_classify(const Globals& g, const std::string& db_path, double wavelength, double tolerance, double temperature,
                 const std::vector<std::string>& args, std::ostream& out_stream) {
  const auto db = load_database(db_path);
  PredictOptions opt;
  opt.temperature = temperature;
  const auto lines = classify(db, wavelength, tolerance, opt);
  const std::string out = g.out.empty() ? "classify.json" : g.out;
  emit_json(io::to_json(lines), out, out_stream);

  Manifest m("classify", args);
  m.input(db_path);
  m.config("wavelength_nm", wavelength);
  m.config("tolerance_nm", tolerance);
  m.config("temperature_k", temperature);
  if (out != "-") {
    m.output(out);
    m.write(manifest_path(g, out));
  } else if (!g.manifest.empty()) {
    m.write(g.manifest);
  }
  return success;
}

int cmd_mg_offset(const Globals& g, double wavelength, const std::vector<int>& isotopes,
                  const std::vector<std::string>& args, std::ostream& out_stream) {
  json arr = json::array();
  std::vector<MgReference> refs;
  if (isotopes.empty()) refs.assign(mg_reference_table().begin(), mg_reference_table().end());
  for (int iso : isotopes) refs.push_back(mg_reference(iso));
  for (const auto& r : refs)
    arr.push_back({{"isotope", r.isotope},
                   {"fundamental_nm", r.fundamental},
                   {"fourth_subharmonic_nm", r.fourth_subharmonic},
                   {"wavelength_nm", wavelength},
                   {"offset_mhz", mg_offset(wavelength, r)}});
  const std::string out = g.out.empty() ? "mg-offset.json" : g.out;
  emit_json(arr, out, out_stream);

  Manifest m("mg-offset", args);
  m.config("wavelength_nm", wavelength);
  if (out != "-") {
    m.output(out);
    m.write(manifest_path(g, out));
  } else if (!g.manifest.empty()) {
    m.write(g.manifest);
  }
  return success;
}

// ---------------------------------------------------------------- linearize

struct LinearizeArgs {
  std::string trace;
  double fsr = 2109.0;
  double fsr_uncertainty = 12.0;
  double anchor_sample = 0.0;
  double anchor_frequency = 0.0;
  double anchor_uncertainty = 50.0;
  double prominence = 0.2;
};

int cmd_linearize(const Globals& g, const LinearizeArgs& a, const std::vector<std::string>& args) {
  const Trace trace = read_trace_csv(a.trace);
  if (trace.frequency_axis_valid) throw ValidationError(a.trace + " already has a frequency axis");
  MarkerSet markers = detect_markers(trace, a.prominence);
  markers.fsr = a.fsr;
  markers.fsr_uncertainty = a.fsr_uncertainty;
  const FrequencyAxis axis = build_axis(markers, trace.size(), {a.anchor_sample, a.anchor_frequency, a.anchor_uncertainty});
  const Trace calibrated = apply_axis(trace, axis);

  const fs::path out = g.out.empty() ? "linearized.csv" : g.out;
  const fs::path sidecar = sibling(out, ".axis.json");
  write_trace_csv(calibrated, out);
  io::write_json(io::axis_json(axis), sidecar);

  Manifest m("linearize", args);
  m.input(a.trace);
  m.config("fsr_mhz", a.fsr);
  m.config("fsr_uncertainty_mhz", a.fsr_uncertainty);
  m.config("anchor_sample", a.anchor_sample);
  m.config("anchor_frequency_mhz", a.anchor_frequency);
  m.config("anchor_uncertainty_mhz", a.anchor_uncertainty);
  m.config("min_prominence", a.prominence);
  m.output(out);
  m.output(sidecar);
  m.write(manifest_path(g, out));
  return success;
}

// ---------------------------------------------------------------- lock

int cmd_lock(const Globals& g, const std::string& config_path, std::optional<bool> engaged_flag,
             const std::vector<std::string>& args) {
  KvConfig c = KvConfig::load(config_path);
  const LineSpec line = read_line_spec(c, "discriminator.");
  LockConfig cfg;
  cfg.discriminator = read_model(c, "discriminator.", line);

  const HalfInt tf = c.get_half_int("discriminator.target.F");
  const HalfInt tfp = c.get_half_int("discriminator.target.F_prime");
  const auto& comps = cfg.discriminator.components;
  const auto it = std::find_if(comps.begin(), comps.end(),
                               [&](const HfsComponent& h) { return h.f_lower == tf && h.f_upper == tfp; });
  if (it == comps.end())
    throw ValidationError(c.source() + ": fields 'discriminator.target.F'/'F_prime': no component F=" + tf.str() +
                          " -> F'=" + tfp.str());
  cfg.target_component = static_cast<std::size_t>(it - comps.begin());

  cfg.dither_frequency = c.get_double("dither.frequency", cfg.dither_frequency);
  cfg.dither_amplitude = c.get_double("dither.amplitude", 0.0);
  cfg.lockin_time_constant = c.get_double("lockin.time_constant", 0.0);
  cfg.sample_rate = c.get_double("sample_rate", cfg.sample_rate);
  cfg.duration = c.get_double("duration", cfg.duration);
  cfg.pid.kp = c.get_double("pid.kp", 0.0);
  cfg.pid.ki = c.get_double("pid.ki", 0.0);
  cfg.pid.kd = c.get_double("pid.kd", 0.0);
  cfg.pid.output_limit = c.get_double("pid.limit", cfg.pid.output_limit);
  if (c.has("stats.averaging_times")) cfg.averaging_times = c.get_double_list("stats.averaging_times");

  LaserModel laser;
  laser.drift_rate = c.get_double("laser.drift_rate", 0.0);
  laser.random_walk_sigma = c.get_double("laser.random_walk", 0.0);
  laser.white_noise_sigma = c.get_double("laser.white_noise", 0.0);
  laser.seed = c.get_seed("laser.seed", 1);
  cfg.detector_seed = c.get_seed("detector.seed", 2);
  if (g.seed) {
    laser.seed = *g.seed;
    cfg.detector_seed = *g.seed + 1;
    c.record("laser.seed", std::to_string(laser.seed));
    c.record("detector.seed", std::to_string(cfg.detector_seed));
  }
  const double detuning = c.get_double("laser.detuning", 0.0);
  const auto sigma = c.find_double("detector.noise_sigma");
  const auto snr = c.find_double("detector.snr");
  if (sigma && snr) throw ValidationError(c.source() + ": give either 'detector.noise_sigma' or 'detector.snr', not both");
  bool engaged = c.get_bool("engaged", true);
  if (engaged_flag) {
    engaged = *engaged_flag;
    c.record("engaged", engaged ? "true" : "false");
  }
  c.reject_unused();

  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(c.source() + ": " + e.what());
  }
  const Discriminator disc = make_discriminator(cfg);
  laser.start_frequency = disc.lock_point + detuning;
  if (snr) {
    if (!(*snr > 0.0)) throw ValidationError(c.source() + ": field 'detector.snr' must be positive");
    cfg.detector_noise_sigma = disc.peak_height / *snr;
    c.record("detector.noise_sigma", text::format_double(cfg.detector_noise_sigma));
  } else {
    cfg.detector_noise_sigma = sigma.value_or(0.0);
  }

  const LockRun run = run_lock(laser, cfg, engaged);

  const fs::path dir = g.out.empty() ? "lock_out" : g.out;
  fs::create_directories(dir);
  const fs::path csv = dir / "run.csv";
  const fs::path stats = dir / "stats.json";
  io::write_lock_csv(run, csv);
  io::write_json(io::lock_stats_json(run), stats);

  Manifest m("lock", args);
  m.input(config_path);
  m.config(c);
  m.seed("laser", laser.seed);
  m.seed("detector", cfg.detector_seed);
  m.output(csv);
  m.output(stats);
  m.write(g.manifest.empty() ? dir / "manifest.json" : fs::path(g.manifest));
  return success;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperfine spectra, line prediction and laser lock simulation", "hfslock"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(version));

  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override every RNG seed of the command");
  app.add_option("--out", g.out, "Output file (directory for lock; '-' writes JSON to stdout)");
  app.add_option("--manifest", g.manifest, "Manifest path (default: next to the output)");
  app.add_option("--isa", g.isa, "Kernel instruction set: scalar or avx2 (default: best available)")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  std::string config, trace, db, i_flag, jl_flag, ju_flag;
  auto* synth = app.add_subcommand("synth", "Synthesize a hyperfine scan from a config file");
  synth->add_option("config", config, "key=value spectrum config")->required();

  auto* fitc = app.add_subcommand("fit", "Fit a calibrated scan");
  fitc->add_option("trace", trace, "Trace CSV with a frequency axis")->required();
  fitc->add_option("--config", config, "key=value initial guesses and fixed parameters");
  fitc->add_option("--I", i_flag, "Nuclear spin, e.g. 5/2");
  fitc->add_option("--J-lower", jl_flag, "Lower-level J");
  fitc->add_option("--J-upper", ju_flag, "Upper-level J");

  double lo = 0.0, hi = 0.0, temperature = 2000.0;
  auto* pred = app.add_subcommand("predict", "Ritz lines of a level table inside a vacuum-wavelength window");
  pred->add_option("db", db, "Level TSV")->required();
  pred->add_option("--min", lo, "Window start, nm")->required();
  pred->add_option("--max", hi, "Window end, nm")->required();
  pred->add_option("--temperature", temperature, "Boltzmann temperature, K");

  double wavelength = 0.0, tolerance = 0.005;
  auto* cls = app.add_subcommand("classify", "Level pairs matching a measured vacuum wavelength");
  cls->add_option("db", db, "Level TSV")->required();
  cls->add_option("--wavelength", wavelength, "Measured vacuum wavelength, nm")->required();
  cls->add_option("--tolerance", tolerance, "Match tolerance, nm");
  cls->add_option("--temperature", temperature, "Boltzmann temperature, K");

  LinearizeArgs la;
  auto* lin = app.add_subcommand("linearize", "Frequency axis from FPI markers and a wavemeter anchor");
  lin->add_option("trace", la.trace, "Trace CSV with an fpi channel")->required();
  lin->add_option("--fsr", la.fsr, "Marker spacing, MHz");
  lin->add_option("--fsr-uncertainty", la.fsr_uncertainty, "MHz");
  lin->add_option("--anchor-sample", la.anchor_sample, "Sample index of the wavemeter reading");
  lin->add_option("--anchor-frequency", la.anchor_frequency, "Frequency at the anchor sample, MHz")->required();
  lin->add_option("--anchor-uncertainty", la.anchor_uncertainty, "MHz");
  lin->add_option("--prominence", la.prominence, "Minimum marker prominence, fraction of the channel range");

  auto* lock = app.add_subcommand("lock", "Simulate the dither lock and its stability statistics");
  lock->add_option("config", config, "key=value lock config")->required();
  bool open_loop = false, closed_loop = false;
  lock->add_flag("--open-loop", open_loop, "Leave the regulator disengaged");
  lock->add_flag("--engaged", closed_loop, "Engage the regulator");

  std::vector<int> isotopes;
  auto* mg = app.add_subcommand("mg-offset", "Offset of a line from the Mg+ D2 fourth sub-harmonics");
  mg->add_option("--wavelength", wavelength, "Vacuum wavelength, nm")->required();
  mg->add_option("--isotope", isotopes, "24, 25 or 26 (default: all)");


  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? success : validation_error;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (!g.isa.empty()) simd::set_active_isa(g.isa == "avx2" ? simd::Isa::avx2 : simd::Isa::scalar);
    if (synth->parsed()) return cmd_synth(g, config, args);
    if (fitc->parsed()) return cmd_fit(g, trace, config, i_flag, jl_flag, ju_flag, args);
    if (pred->parsed()) return cmd_predict(g, db, lo, hi, temperature, args, out);
    if (cls->parsed()) return cmd_classify(g, db, wavelength, tolerance, temperature, args, out);
    if (lin->parsed()) return cmd_linearize(g, la, args);
    if (mg->parsed()) return cmd_mg_offset(g, wavelength, isotopes, args, out);
    if (lock->parsed()) {
      if (open_loop && closed_loop) throw ValidationError("--open-loop and --engaged are mutually exclusive");
      std::optional<bool> engaged;
      if (open_loop) engaged = false;
      if (closed_loop) engaged = true;
      return cmd_lock(g, config, engaged, args);
    }
  } catch (const NumericalError& e) {
    err << "hfslock: numerical failure: " << e.what() << '\n';
    return numerical_failure;
  } catch (const ValidationError& e) {
    err << "hfslock: " << e.what() << '\n';
    return validation_error;
  } catch (const std::exception& e) {
    err << "hfslock: " << e.what() << '\n';
    return numerical_failure;
  }
  return validation_error;
}

}  // namespace hfslock::cli
